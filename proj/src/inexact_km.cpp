#include <algorithm>
#include <cmath>
#include <string>

#include "run_tracker.hpp"
#include "svi/errors.hpp"
#include "svi/mlmc_km.hpp"

namespace svi::mlmc {
namespace {

std::uint64_t scaled_ceil(double raw, double scale) {
  const double v = std::ceil(scale * raw);
  if (!(v < 1.8e19)) throw RegimeError("MLMC budget overflows 64-bit range; lower the budget scale");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
}

}  // namespace

double km_weight(std::int64_t k, double alpha, double alpha_scale) noexcept {
  const double kk = static_cast<double>(k);
  return alpha_scale * alpha / (std::sqrt(kk + 2.0) * std::log(kk + 3.0));
}

MlmcBudget budgets(std::int64_t k, double alpha, double C1, double C2, double budget_scale,
                   double alpha_scale) {
  if (!(alpha > 0.0) || alpha > 1.0) throw InvalidArgument("KM alpha must lie in (0, 1]");
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw InvalidArgument("rate constants must be > 0");
  if (!(budget_scale > 0.0) || budget_scale > 1.0) throw InvalidArgument("budget scale must lie in (0, 1]");
  if (k < 0) throw InvalidArgument("iteration index must be >= 0");
  MlmcBudget b;
  b.C1 = C1;
  b.C2 = C2;
  b.alpha_k = km_weight(k, alpha, alpha_scale);
  b.b_sq = b.alpha_k / (120.0 * alpha * (static_cast<double>(k) + 1.0));
  const double cmax = std::max(C1, C2);
  const double n_raw = 2.0 * cmax / std::min(b.b_sq, b.v_sq / 2.0);
  const double n_full = std::ceil(n_raw);
  b.N = scaled_ceil(n_raw, budget_scale);
  b.M = scaled_ceil(28.0 * cmax * std::log2(n_full) / b.v_sq, budget_scale);
  return b;
}

double default_eta(double L, double rho) noexcept { return rho > 0.0 ? 0.5 * (rho + 1.0 / L) : 0.9 / L; }

InexactKm::InexactKm(const StochasticOracle& oracle, KmConfig config)
    : oracle_(oracle), config_(std::move(config)) {
  const ProblemInstance& p = oracle_.problem();
  const double L = p.lipschitz();
  const double rho = p.rho();
  eta_ = config_.eta.value_or(default_eta(L, rho));
  if (!(eta_ > 0.0)) throw InvalidArgument("eta must be > 0");
  if (!(rho < eta_)) {
    throw RegimeError("inexact KM needs rho < eta (rho = " + std::to_string(rho) +
                      ", eta = " + std::to_string(eta_) + "); no admissible eta exists once rho >= 1/L");
  }
  if (!(eta_ * L < 1.0)) {
    throw RegimeError("inexact KM needs eta < 1/L (eta = " + std::to_string(eta_) + ")");
  }
  alpha_ = 1.0 - rho / eta_;
  if (config_.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (!(config_.alpha_scale > 0.0)) throw InvalidArgument("alpha scale must be > 0");
  if (!(weight(0) < 1.0)) throw InvalidArgument("KM weight alpha_0 must be < 1; lower the alpha scale");
  if (!(config_.budget_scale > 0.0) || config_.budget_scale > 1.0) {
    throw InvalidArgument("budget scale must lie in (0, 1]");
  }
  if (config_.initial_point) p.check_dimension(*config_.initial_point, "initial point");
  const ResolventSubproblem probe = subproblem(Vector::Zero(p.dimension()));
  C1_ = probe.C1();
  C2_ = probe.C2();
}

MlmcBudget InexactKm::budget(std::int64_t k) const {
  return budgets(k, alpha_, C1_, C2_, config_.budget_scale, config_.alpha_scale);
}

ResolventSubproblem InexactKm::subproblem(const Vector& anchor) const {
  return ResolventSubproblem(oracle_, anchor, eta_, config_.inner_initial_step);
}

Vector InexactKm::estimate_resolvent(const Vector& z, std::int64_t k, CountingOracle& counter) const {
  const MlmcBudget b = budget(k);
  const ResolventSubproblem sub = subproblem(z);
  Vector sum = Vector::Zero(z.size());
  for (std::uint64_t m = 0; m < b.M; ++m) {
    sum += mlmc_estimate(sub, b.N, derive_seed(config_.seed, {static_cast<std::uint64_t>(k), m}), counter).estimate;
  }
  return sum / static_cast<double>(b.M);
}

Vector InexactKm::extract_output(const std::vector<Vector>& trajectory, std::uint64_t seed,
                                 CountingOracle& counter, std::int64_t* chosen) const {
  if (trajectory.empty()) throw InvalidArgument("trajectory is empty");
  CounterRng rng(seed);
  const auto k_hat = static_cast<std::size_t>(rng.below(trajectory.size()));
  if (chosen) *chosen = static_cast<std::int64_t>(k_hat);
  const Vector& z = trajectory[k_hat];
  const ResolventSubproblem sub = subproblem(z);
  const double tau = sub.step(0);
  Vector b(z.size()), half(z.size());
  sub.sample_into(z, derive_seed(seed, {1}), counter, b);
  sub.prox_into(tau, z - tau * b, half);
  return half;
}

RunRecord InexactKm::run() const {
  const ProblemInstance& p = oracle_.problem();
  detail::DigestBuilder digest;
  digest.add("algorithm", std::string("mlmc_km"))
      .add("problem", p.name())
      .add("L", p.lipschitz())
      .add("rho", p.rho())
      .add("noise", std::string(to_string(oracle_.noise_model())))
      .add("eta", eta_)
      .add("alpha_scale", config_.alpha_scale)
      .add("budget_scale", config_.budget_scale)
      .add("inner_step", config_.inner_initial_step.value_or(0.0))
      .add("K", config_.iterations)
      .add("seed", config_.seed);
  Vector z = config_.initial_point.value_or(Vector::Ones(p.dimension()));
  digest.add("z0", z);
  detail::RunTracker tracker("mlmc_km", config_.seed, digest.digest(), config_.control, p);
  tracker.set_initial(z);

  CountingOracle counter(oracle_);
  std::vector<Vector> trajectory;
  trajectory.reserve(static_cast<std::size_t>(config_.iterations));
  for (std::int64_t k = 0; k < config_.iterations; ++k) {
    trajectory.push_back(z);
    const Vector j = estimate_resolvent(z, k, counter);
    const double gap = (z - j).norm();
    const double a = weight(k);
    z = (1.0 - a) * z + a * j;
    if (!tracker.log(k, counter.calls(), z, residual(p, z), gap)) break;
  }

  std::int64_t k_hat = 0;
  Vector out = extract_output(trajectory, derive_seed(config_.seed, {0x6f7574ULL}), counter, &k_hat);
  return tracker.finish(std::move(out), k_hat);
}

}  // namespace svi::mlmc
