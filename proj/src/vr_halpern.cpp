#include "svi/vr_halpern.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "run_tracker.hpp"
#include "svi/errors.hpp"

namespace svi::vr {
namespace {

const double kSqrt3 = std::sqrt(3.0);

enum SeedRole : std::uint64_t { kHalf = 0, kStorm = 1 };

}  // namespace

Schedule schedules(std::int64_t k, double tau_bar, double L) {
  if (k < 0) throw InvalidArgument("iteration index must be >= 0");
  const double s = std::sqrt(static_cast<double>(k) + 3.0);
  return {1.0 / (static_cast<double>(k) + 3.0), 2.0 / s, 1.0 / (4.0 * L), tau_bar / s};
}

double rho_max(double L, double B, double tau_bar) {
  if (!(L > 0.0)) throw InvalidArgument("L must be > 0");
  const double L2 = L * L;
  const double t1 = (L / 55.0) * (83.0 / (24.0 * L2) - 9.0 * tau_bar / (kSqrt3 * L2));
  const double t2 = 1.0 / (12.0 * L);
  const double t3 = 1.0 / (16.0 * L * (1.0 + tau_bar)) -
                    (2.0 * tau_bar / (17.0 * kSqrt3 * L)) * (9.0 * B * B / L2 + 3.0);
  return std::min({t1, t2, t3});
}

double tau_bar_cap(double L, double B) noexcept {
  const double L2 = L * L;
  const double second = L2 / (20.0 * B * B + 7.0 * L2);
  if (B == 0.0) return second;
  return std::min(L2 / (219.0 * B * B), second);
}

Vector storm_update(const Vector& g, const Vector& z, const Vector& z_next, double alpha,
                    CountingOracle& counter, std::uint64_t seed) {
  if (!counter.oracle().multi_point()) throw CapabilityError("STORM needs shared-seed oracle evaluations");
  if (!(alpha >= 0.0) || alpha > 1.0) throw InvalidArgument("STORM weight must lie in [0, 1]");
  Vector at_next(z.size()), at_prev(z.size());
  counter.sample_pair_into(z_next, z, seed, at_next, at_prev);
  return at_next + (1.0 - alpha) * (g - at_prev);
}

VrHalpern::VrHalpern(const StochasticOracle& oracle, VrHalpernConfig config)
    : oracle_(oracle), config_(std::move(config)) {
  if (!oracle_.multi_point()) throw CapabilityError("variance-reduced FBF needs a multi-point oracle");
  const ProblemInstance& p = oracle_.problem();
  const double L = p.lipschitz();
  const double B = oracle_.bound_B();
  if (config_.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (config_.initial_point) p.check_dimension(*config_.initial_point, "initial point");
  if (config_.gamma_override && !(*config_.gamma_override > 0.0)) throw InvalidArgument("gamma must be > 0");

  const bool theory = config_.theory_mode && !config_.gamma_override;
  const double cap = tau_bar_cap(L, B);
  tau_bar_ = config_.tau_bar.value_or(theory || B > 0.0 ? 0.9 * cap : 0.3);
  if (!(tau_bar_ > 0.0)) throw InvalidArgument("tau_bar must be > 0");
  if (config_.tuned_weights) {
    if (config_.theory_mode && !config_.gamma_override) {
      throw InvalidArgument("tuned STORM weights are only available outside theory mode");
    }
    if (!(config_.tuned_weights->alpha0 > 0.0) || config_.tuned_weights->alpha0 > 1.0 ||
        !(config_.tuned_weights->c > 0.0)) {
      throw InvalidArgument("tuned STORM weights need alpha0 in (0, 1] and c > 0");
    }
  }

  if (theory) {
    if (tau_bar_ > cap) {
      throw RegimeError("tau_bar = " + std::to_string(tau_bar_) + " exceeds its cap " + std::to_string(cap));
    }
    const double bound = rho_max(L, B, tau_bar_);
    if (p.rho() > bound) {
      throw RegimeError("rho = " + std::to_string(p.rho()) + " exceeds the admissible bound " +
                        std::to_string(bound) + " at tau_bar = " + std::to_string(tau_bar_));
    }
  } else {
    warnings_.push_back(config_.gamma_override
                            ? "gamma override set: theory-mode checks bypassed"
                            : "theory mode off: regime checks bypassed");
  }
}

double VrHalpern::gamma(std::int64_t) const noexcept {
  return config_.gamma_override.value_or(0.25 / oracle_.problem().lipschitz());
}

double VrHalpern::beta(std::int64_t k) const noexcept {
  return config_.use_anchoring ? 1.0 / (static_cast<double>(k) + 3.0) : 0.0;
}

double VrHalpern::storm_weight(std::int64_t k) const noexcept {
  const double kk = static_cast<double>(k);
  if (config_.tuned_weights) {
    return std::min(1.0, config_.tuned_weights->alpha0 / std::sqrt(kk / config_.tuned_weights->c + 1.0));
  }
  return std::min(1.0, 2.0 / std::sqrt(kk + 3.0));
}

double VrHalpern::tau(std::int64_t k) const noexcept {
  return tau_bar_ / std::sqrt(static_cast<double>(k) + 3.0);
}

double VrHalpern::output_weight(std::int64_t k) const noexcept {
  return tau(k) * (static_cast<double>(k) + 3.0);
}

std::vector<double> VrHalpern::output_probabilities(std::int64_t K) const {
  if (K < 1) throw InvalidArgument("K must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(K));
  double total = 0.0;
  for (std::int64_t k = 0; k < K; ++k) total += w[static_cast<std::size_t>(k)] = output_weight(k);
  for (double& x : w) x /= total;
  return w;
}

VrState VrHalpern::initial_state(const Vector& z0, CountingOracle& counter) const {
  oracle_.problem().check_dimension(z0, "initial point");
  VrState s{z0, Vector(z0.size()), z0, 0};
  counter.sample_into(z0, derive_seed(config_.seed, {0x696e6974ULL}), s.g);
  return s;
}

Vector VrHalpern::step(VrState& s, CountingOracle& counter) const {
  const ProblemInstance& p = oracle_.problem();
  p.check_dimension(s.z, "state");
  const std::int64_t k = s.k;
  const double b = beta(k);
  const double gm = gamma(k);
  const double t = tau(k);
  const auto kk = static_cast<std::uint64_t>(k);

  const Vector z_bar = b * s.anchor + (1.0 - b) * s.z;
  Vector half(s.z.size()), g_half(s.z.size());
  p.regularizer().prox_into(gm, z_bar - gm * s.g, half);
  counter.sample_into(half, derive_seed(config_.seed, {kk, kHalf}), g_half);
  Vector z_next = z_bar - t * (z_bar - half - gm * s.g + gm * g_half);
  s.g = storm_update(s.g, s.z, z_next, storm_weight(k), counter, derive_seed(config_.seed, {kk, kStorm}));
  s.z = std::move(z_next);
  s.k = k + 1;
  return half;
}

RunRecord VrHalpern::run() const {
  const ProblemInstance& p = oracle_.problem();
  const std::string name = config_.use_anchoring ? "vr_halpern" : "vr_halpern_beta0";
  detail::DigestBuilder digest;
  digest.add("algorithm", name)
      .add("problem", p.name())
      .add("L", p.lipschitz())
      .add("rho", p.rho())
      .add("noise", std::string(to_string(oracle_.noise_model())))
      .add("tau_bar", tau_bar_)
      .add("gamma", gamma(0))
      .add("theory", config_.theory_mode)
      .add("K", config_.iterations)
      .add("seed", config_.seed);
  if (config_.tuned_weights) {
    digest.add("alpha0", config_.tuned_weights->alpha0).add("c", config_.tuned_weights->c);
  }
  Vector z0 = config_.initial_point.value_or(Vector::Ones(p.dimension()));
  digest.add("z0", z0);
  detail::RunTracker tracker(name, config_.seed, digest.digest(), config_.control, p);
  for (const auto& w : warnings_) tracker.warn(w);
  tracker.set_initial(z0);

  CountingOracle counter(oracle_);
  VrState state = initial_state(z0, counter);
  std::vector<Vector> halves;
  halves.reserve(static_cast<std::size_t>(config_.iterations));
  for (std::int64_t k = 0; k < config_.iterations; ++k) {
    Vector half = step(state, counter);
    const double res = residual(p, half);
    halves.push_back(std::move(half));
    if (!tracker.log(k, counter.calls(), state.z, res)) break;
  }

  // Draw k with probability tau_k (k+3) / sum_i tau_i (i+3) over the completed iterations.
  double total = 0.0;
  for (std::size_t i = 0; i < halves.size(); ++i) total += output_weight(static_cast<std::int64_t>(i));
  CounterRng select(derive_seed(config_.seed, {0x6f7574ULL}));
  const double target = select.uniform() * total;
  std::size_t k_hat = halves.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < halves.size(); ++i) {
    acc += output_weight(static_cast<std::int64_t>(i));
    if (target < acc) {
      k_hat = i;
      break;
    }
  }
  return tracker.finish(halves[k_hat], static_cast<std::int64_t>(k_hat));
}

}  // namespace svi::vr
