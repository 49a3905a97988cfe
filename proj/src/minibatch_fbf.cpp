#include "svi/minibatch_fbf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "run_tracker.hpp"
#include "svi/errors.hpp"

namespace svi::fbf {
namespace {

const double kSqrt6 = std::sqrt(6.0);

}  // namespace

double delta(double L, double rho, double eta) noexcept {
  return 1.0 - (2.0 + 2.0 / kSqrt6) * rho / eta -
         (30.0 / 29.0) * eta * L * L * (eta + 31.0 * (1.0 + kSqrt6) * rho / 15.0);
}

double admissible_rho_bound(double L) noexcept { return 72.0 / ((360.0 + 205.0 * kSqrt6) * L); }

double default_eta(double L) noexcept { return 1.0 / (kSqrt6 * L); }

std::uint64_t batch_size(double bbar, std::uint64_t k) {
  if (!(bbar > 0.0)) throw InvalidArgument("bbar must be > 0");
  const double lg = std::log(static_cast<double>(k) + 3.0);
  const double raw = std::ceil(bbar * (static_cast<double>(k) + 1.0) * lg * lg);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
}

double bbar_default(double B, double L, double delta) {
  if (!(delta > 0.0)) throw RegimeError("bbar_default requires delta > 0");
  if (B == 0.0) return 1.0;
  return (306.0 + 31.0 * kSqrt6) * B * B / (2.0 * L * L * delta);
}

MinibatchFbf::MinibatchFbf(const StochasticOracle& oracle, MinibatchFbfConfig config)
    : oracle_(oracle), config_(std::move(config)) {
  const ProblemInstance& p = oracle_.problem();
  const double L = p.lipschitz();
  eta_ = config_.eta.value_or(default_eta(L));
  if (!(eta_ > 0.0)) throw InvalidArgument("eta must be > 0");
  if (config_.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (config_.batch_cap < 1) throw InvalidArgument("batch cap must be >= 1");
  delta_ = fbf::delta(L, p.rho(), eta_);
  if (!(delta_ > 0.0)) {
    throw RegimeError("mini-batch FBF needs delta(L, rho, eta) > 0; got " + std::to_string(delta_) +
                      " (rho must stay below " + std::to_string(admissible_rho_bound(L)) +
                      " at the default step)");
  }
  bbar_ = config_.bbar.value_or(bbar_default(oracle_.bound_B(), L, delta_));
  if (!(bbar_ > 0.0)) throw InvalidArgument("bbar must be > 0");
  if (config_.initial_point) p.check_dimension(*config_.initial_point, "initial point");
}

std::uint64_t MinibatchFbf::batch(std::int64_t k) const {
  return std::min(batch_size(bbar_, static_cast<std::uint64_t>(k)), config_.batch_cap);
}

FbfStep MinibatchFbf::step(const Vector& z, std::int64_t k, CountingOracle& counter) const {
  const ProblemInstance& p = oracle_.problem();
  p.check_dimension(z, "state");
  const int m = p.dimension();
  FbfStep out{Vector(m), Vector(m), batch(k)};
  Vector g_base(m), g_half(m), scratch(m);

  SeedStream base_stream(derive_seed(config_.seed, {static_cast<std::uint64_t>(k), 0}));
  SeedStream half_stream(derive_seed(config_.seed, {static_cast<std::uint64_t>(k), 1}));

  counter.minibatch_into(z, out.batch, base_stream, g_base, scratch);
  p.regularizer().prox_into(eta_, z - eta_ * g_base, out.z_half);
  counter.minibatch_into(out.z_half, out.batch, half_stream, g_half, scratch);
  out.z_next = out.z_half - eta_ * (g_half - g_base);
  return out;
}

RunRecord MinibatchFbf::run() const {
  const ProblemInstance& p = oracle_.problem();
  const double L = p.lipschitz();
  detail::DigestBuilder digest;
  digest.add("algorithm", std::string("fbf_minibatch"))
      .add("problem", p.name())
      .add("L", L)
      .add("rho", p.rho())
      .add("noise", std::string(to_string(oracle_.noise_model())))
      .add("eta", eta_)
      .add("bbar", bbar_)
      .add("K", config_.iterations)
      .add("cap", config_.batch_cap)
      .add("seed", config_.seed);

  Vector z = config_.initial_point.value_or(Vector::Ones(p.dimension()));
  digest.add("z0", z);
  detail::RunTracker tracker("fbf_minibatch", config_.seed, digest.digest(), config_.control, p);
  tracker.set_initial(z);
  if (batch_size(bbar_, static_cast<std::uint64_t>(config_.iterations - 1)) > config_.batch_cap) {
    tracker.warn("batch size capped at " + std::to_string(config_.batch_cap));
  }

  CountingOracle counter(oracle_);
  std::vector<Vector> halves;
  halves.reserve(static_cast<std::size_t>(config_.iterations));
  for (std::int64_t k = 0; k < config_.iterations; ++k) {
    FbfStep s = step(z, k, counter);
    z = std::move(s.z_next);
    const double res = residual(p, s.z_half);
    halves.push_back(std::move(s.z_half));
    if (!tracker.log(k, counter.calls(), z, res)) break;
  }

  CounterRng select(derive_seed(config_.seed, {0x6f7574ULL}));
  const auto k_hat = static_cast<std::int64_t>(select.below(halves.size()));
  return tracker.finish(halves[static_cast<std::size_t>(k_hat)], k_hat);
}

}  // namespace svi::fbf
