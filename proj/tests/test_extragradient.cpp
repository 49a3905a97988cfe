#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "svi/errors.hpp"
#include "svi/extragradient.hpp"
#include "svi/problems.hpp"

using namespace svi;
using std::numbers::pi;

namespace {

Matrix eg_map(const Matrix& A, double gamma) {
  return Matrix::Identity(A.rows(), A.cols()) - gamma * A + gamma * gamma * A * A;
}

}  // namespace

TEST_CASE("solution is a fixed point") {
  const auto o = attach_noise(make_rotation(1.0, 2 * pi / 3), NoiseSpec::none());
  CountingOracle c(o);
  CHECK(eg::eg_step(Vector::Zero(2), c, 1.0, false, 0).isZero());
  CHECK(c.calls() == 2);
}

TEST_CASE("deterministic step is the linear EG map") {
  for (auto [theta, gamma] : {std::pair{2 * pi / 3, 1.0}, {pi / 2, 0.5}, {0.3, 0.7}}) {
    const auto p = make_rotation(1.0, theta);
    const auto o = attach_noise(p, NoiseSpec::gaussian(1.0));  // noise ignored when deterministic
    CountingOracle c(o);
    const Vector z = (Vector(2) << 0.4, -1.3).finished();
    CHECK((eg::eg_step(z, c, gamma, false, 5) - eg_map(*p.linear_map(), gamma) * z).norm() <= 1e-14);
  }
}

TEST_CASE("spectral radius certificates") {
  CHECK(oracles::spectral_radius(eg_map(oracles::rotation(1.0, 2 * pi / 3), 1.0)) > 1.0);
  CHECK(oracles::spectral_radius(eg_map(oracles::rotation(1.0, pi / 2), 0.5)) < 1.0);
}

TEST_CASE("counter-example diverges without a guard") {
  const auto o = attach_noise(make_rotation(1.0, 2 * pi / 3), NoiseSpec::none());
  eg::EgConfig c;
  c.gamma = 1.0;
  c.iterations = 200;
  c.control.divergence_threshold = std::numeric_limits<double>::infinity();
  const auto rec = eg::run(o, c);
  CHECK(rec.stop_cause == StopCause::kCompleted);
  CHECK(rec.iterations.size() == 200);
  CHECK(rec.final_norm() >= 10 * std::sqrt(2.0));
}

TEST_CASE("divergence guard stops the counter-example") {
  const auto o = attach_noise(make_rotation(1.0, 2 * pi / 3), NoiseSpec::none());
  eg::EgConfig c;
  c.iterations = 1000;
  const auto rec = eg::run(o, c);
  CHECK(rec.stop_cause == StopCause::kDiverged);
  CHECK(rec.iterations.size() < 1000);
  CHECK(rec.final_norm() > 1e12);
}

TEST_CASE("distance to the solution is nonincreasing on monotone rotations") {
  const double L = 1.3;
  for (double theta : {0.1, 0.5, 1.0, pi / 4, pi / 2}) {
    for (double gamma : {0.05, 0.3, 1 / (std::sqrt(2.0) * L)}) {
      const auto o = attach_noise(make_rotation(L, theta), NoiseSpec::none());
      eg::EgConfig c;
      c.gamma = gamma;
      c.iterations = 200;
      const auto rec = eg::run(o, c);
      double prev = std::sqrt(2.0);
      for (const auto& it : rec.iterations) {
        REQUIRE(it.norm_z <= prev * (1 + 1e-12));
        prev = it.norm_z;
      }
    }
  }
}

TEST_CASE("stochastic runs are reproducible and counted") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::gaussian(0.1));
  eg::EgConfig c;
  c.gamma = 0.5;
  c.stochastic = true;
  c.iterations = 40;
  c.seed = 2;
  const auto a = eg::run(o, c);
  const auto b = eg::run(o, c);
  CHECK(a.output_point == b.output_point);
  CHECK(a.output_index == 40);  // z_K
  for (std::size_t k = 0; k < a.iterations.size(); ++k) REQUIRE(a.iterations[k].oracle_calls == 2 * (k + 1));
  c.seed = 3;
  CHECK(eg::run(o, c).output_point != a.output_point);
  c.stochastic = false;
  CHECK(eg::run(o, c).output_point == eg::run(attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::none()), c).output_point);
}

TEST_CASE("constrained step stays feasible") {
  Matrix cpl(1, 1);
  cpl << 3.0;
  const auto o = attach_noise(make_bilinear_box(cpl, 0.5), NoiseSpec::none());
  eg::EgConfig c;
  c.gamma = 0.2;
  c.iterations = 50;
  c.control.record_points = true;
  const auto rec = eg::run(o, c);
  for (std::size_t k = 1; k < rec.points.size(); ++k) CHECK(o.problem().regularizer().contains(rec.points[k], 1e-15));
}

TEST_CASE("invalid step size") {
  const auto o = attach_noise(make_quadratic(1.0, 0.1), NoiseSpec::none());
  eg::EgConfig c;
  c.gamma = 0.0;
  CHECK_THROWS_AS(eg::run(o, c), InvalidArgument);
}
