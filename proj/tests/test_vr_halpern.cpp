#include <doctest.h>

#include <cmath>
#include <numeric>

#include "svi/errors.hpp"
#include "svi/minibatch_fbf.hpp"
#include "svi/problems.hpp"
#include "svi/vr_halpern.hpp"

using namespace svi;
using namespace svi::vr;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

VrHalpernConfig sweep_config(std::int64_t K, std::uint64_t seed = 0) {
  VrHalpernConfig c;
  c.iterations = K;
  c.theory_mode = false;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("schedules") {
  const auto s = schedules(0, 0.1, 1.0);
  CHECK(s.beta == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(s.alpha == doctest::Approx(2 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(s.gamma == 0.25);
  CHECK(s.tau == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-15));
  const auto late = schedules(1'000'000, 0.1, 2.0);
  CHECK(late.beta < 1e-5);
  CHECK(late.alpha < 3e-3);
  CHECK(late.tau < 1e-4);
  CHECK(late.gamma == 0.125);
}

TEST_CASE("rho bound") {
  CHECK(rho_max(1.0, 0.0, 1e-12) == doctest::Approx(0.0625).epsilon(1e-9));
  CHECK(rho_max(1.0, 0.0, 0.1) == doctest::Approx(0.03644111349384208).epsilon(1e-12));
  CHECK(rho_max(1.0, 1.0, 1.0 / 219) == doctest::Approx(0.05849407012755937).epsilon(1e-12));
  CHECK(rho_max(1.0, 1.0, 1.0 / 219) > 0.0);
  CHECK(rho_max(2.0, 0.0, 0.1) == doctest::Approx(rho_max(1.0, 0.0, 0.1) / 2).epsilon(1e-12));
  double prev = rho_max(1.0, 0.5, 1e-4);
  for (double t = 2e-4; t < 1.0; t *= 1.1) {
    const double cur = rho_max(1.0, 0.5, t);
    REQUIRE(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("tau_bar cap") {
  CHECK(tau_bar_cap(1.0, 0.0) == doctest::Approx(1.0 / 7).epsilon(1e-15));
  CHECK(tau_bar_cap(1.0, 1.0) == doctest::Approx(1.0 / 219).epsilon(1e-15));
  CHECK(tau_bar_cap(1.0, 0.1) == doctest::Approx(1.0 / 7.2).epsilon(1e-15));
}

TEST_CASE("STORM update identities") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.5));
  const Vector z = vec2(1, 2), zn = vec2(-0.5, 0.3), g = vec2(0.1, 0.2);
  CountingOracle c(o);
  SUBCASE("unit weight is a fresh sample") {
    const auto [fresh, unused] = o.sample_pair(zn, z, 17);
    CHECK(storm_update(g, z, zn, 1.0, c, 17) == fresh);
    CHECK(c.calls() == 2);
  }
  SUBCASE("repeated point gives exponential averaging") {
    const Vector s = o.sample(z, 17);
    const Vector expected = 0.3 * s + 0.7 * g;
    CHECK((storm_update(g, z, z, 0.3, c, 17) - expected).norm() <= 1e-15);
  }
  SUBCASE("noise-free exact estimate is propagated") {
    const auto clean = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::none());
    CountingOracle cc(clean);
    CHECK(storm_update(clean.problem()(z), z, zn, 0.4, cc, 3) == clean.problem()(zn));
  }
  SUBCASE("single-point oracles are refused") {
    const auto single = o.single_point();
    CountingOracle cs(single);
    CHECK_THROWS_AS(storm_update(g, z, zn, 0.5, cs, 1), CapabilityError);
  }
}

TEST_CASE("construction checks") {
  const auto q = make_quadratic(1.0, 0.1);
  CHECK_THROWS_AS(VrHalpern(attach_noise(q, NoiseSpec::gaussian(0.1)).single_point(), {}), CapabilityError);
  // rho = 0.1 exceeds the bound at every tau_bar, since the bound never passes 1/16.
  CHECK_THROWS_AS(VrHalpern(attach_noise(q, NoiseSpec::gaussian(0.1)), {}), RegimeError);
  const auto small = attach_noise(make_quadratic(1.0, 0.02), NoiseSpec::gaussian(0.1));
  const VrHalpern ok(small, {});
  CHECK(ok.tau_bar() == doctest::Approx(0.9 / 7));
  CHECK(ok.warnings().empty());
  VrHalpernConfig too_big;
  too_big.tau_bar = 0.2;
  CHECK_THROWS_AS(VrHalpern(small, too_big), RegimeError);
  VrHalpernConfig tuned;
  tuned.tuned_weights = TunedStormWeights{0.5, 10.0};
  CHECK_THROWS_AS(VrHalpern(small, tuned), InvalidArgument);
  VrHalpernConfig bad_gamma;
  bad_gamma.gamma_override = 0.0;
  CHECK_THROWS_AS(VrHalpern(small, bad_gamma), InvalidArgument);
}

TEST_CASE("sweep mode bypasses the regime checks with a warning") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.1));
  const VrHalpern off(o, sweep_config(10));
  CHECK(off.tau_bar() == doctest::Approx(0.3));
  REQUIRE(off.warnings().size() == 1);
  CHECK(off.warnings()[0] == "theory mode off: regime checks bypassed");
  VrHalpernConfig g;
  g.gamma_override = 0.01;
  const VrHalpern overridden(o, g);
  REQUIRE(overridden.warnings().size() == 1);
  CHECK(overridden.warnings()[0] == "gamma override set: theory-mode checks bypassed");
  CHECK(overridden.gamma(5) == 0.01);
  CHECK(overridden.run().warnings == overridden.warnings());
  const auto multiplicative = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::multiplicative(1.0, 0.1));
  CHECK(VrHalpern(multiplicative, sweep_config(10)).tau_bar() == doctest::Approx(0.9 / 219));
}

TEST_CASE("STORM weights") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.1));
  const VrHalpern theory(o, sweep_config(10));
  CHECK(theory.storm_weight(0) == 1.0);
  CHECK(theory.storm_weight(1) == 1.0);
  CHECK(theory.storm_weight(2) == doctest::Approx(2 / std::sqrt(5.0)));
  auto c = sweep_config(10);
  c.tuned_weights = TunedStormWeights{0.5, 4.0};
  const VrHalpern tuned(o, c);
  CHECK(tuned.storm_weight(0) == 0.5);
  CHECK(tuned.storm_weight(12) == doctest::Approx(0.25));
}

TEST_CASE("unanchored unit-relaxation step is Tseng's step") {
  const auto o = attach_noise(make_quadratic(1.0, 0.05), NoiseSpec::none());
  const double eta = fbf::default_eta(1.0);
  VrHalpernConfig c;
  c.use_anchoring = false;
  c.gamma_override = eta;
  c.tau_bar = std::sqrt(3.0);  // tau_0 = 1
  const VrHalpern vr(o, c);
  CHECK(vr.tau(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vr.beta(0) == 0.0);

  const Vector z0 = vec2(0.8, -1.1);
  CountingOracle counter(o);
  VrState s = vr.initial_state(z0, counter);
  CHECK(s.g == o.problem()(z0));
  const Vector half = vr.step(s, counter);

  fbf::MinibatchFbfConfig fc;
  fc.eta = eta;
  CountingOracle fcounter(o);
  const auto st = fbf::MinibatchFbf(o, fc).step(z0, 0, fcounter);
  CHECK((half - st.z_half).norm() <= 1e-14);
  CHECK((s.z - st.z_next).norm() <= 1e-14);
}

TEST_CASE("solution is a fixed point") {
  const auto o = attach_noise(make_quadratic(1.0, 0.02), NoiseSpec::none());
  const VrHalpern vr(o, {});
  CountingOracle counter(o);
  VrState s = vr.initial_state(Vector::Zero(2), counter);
  for (int k = 0; k < 20; ++k) {
    CHECK(vr.step(s, counter).isZero());
    CHECK(s.z.isZero());
  }
  CHECK(counter.calls() == 1 + 3 * 20);
}

TEST_CASE("STORM estimate stays exact without noise") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::none());
  const VrHalpern vr(o, sweep_config(1000));
  CountingOracle counter(o);
  VrState s = vr.initial_state(Vector::Ones(2), counter);
  for (int k = 0; k < 1000; ++k) {
    vr.step(s, counter);
    REQUIRE(s.g == o.problem()(s.z));
  }
}

TEST_CASE("output distribution") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.1));
  const VrHalpern vr(o, sweep_config(10));
  for (std::int64_t K : {1, 7, 1000}) {
    const auto p = vr.output_probabilities(K);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < p.size(); ++k) REQUIRE(p[k] > p[k - 1]);
  }
  CHECK(vr.output_weight(6) == doctest::Approx(0.3 * 3.0));
  auto c = sweep_config(1);
  const auto rec = VrHalpern(o, c).run();
  CHECK(rec.output_index == 0);
}

TEST_CASE("run accounting, determinism and labels") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::student_t(1.0));
  auto c = sweep_config(50, 3);
  const auto a = VrHalpern(o, c).run();
  CHECK(a.algorithm == "vr_halpern");
  for (std::size_t k = 0; k < a.iterations.size(); ++k) REQUIRE(a.iterations[k].oracle_calls == 1 + 3 * (k + 1));
  const auto b = VrHalpern(o, c).run();
  CHECK(a.output_point == b.output_point);
  for (std::size_t k = 0; k < a.iterations.size(); ++k) REQUIRE(a.iterations[k].residual == b.iterations[k].residual);
  c.use_anchoring = false;
  CHECK(VrHalpern(o, c).run().algorithm == "vr_halpern_beta0");
}

TEST_CASE("noisy quadratic converges in sweep mode") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.1));
  double sum = 0.0, initial = 0.0;
  for (std::uint64_t seed = 0; seed < 7; ++seed) {
    auto c = sweep_config(5000, seed);
    c.tau_bar = 0.5;
    const auto rec = VrHalpern(o, c).run();
    sum += rec.output_residual / 7;
    initial = rec.initial_residual;
  }
  CHECK(sum < 0.2 * initial);
}
