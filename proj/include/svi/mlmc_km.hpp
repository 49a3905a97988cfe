#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svi/oracle.hpp"
#include "svi/run_record.hpp"

namespace svi::mlmc {

// Strongly monotone subproblem 0 in x + eta (G + dr)(x) - anchor, whose solution is the
// resolvent J_{eta(G + dr)}(anchor). Holds a reference to the base oracle.
class ResolventSubproblem {
 public:
  // `initial_step`, when given, rescales the inner step schedule so that tau_0 equals it.
  ResolventSubproblem(const StochasticOracle& oracle, Vector anchor, double eta,
                      std::optional<double> initial_step = std::nullopt);

  const StochasticOracle& oracle() const noexcept { return *oracle_; }
  const Vector& anchor() const noexcept { return anchor_; }
  double eta() const noexcept { return eta_; }
  double mu() const noexcept { return mu_; }                    // 1 - eta L
  double lipschitz_B() const noexcept { return lipschitz_B_; }  // 1 + eta L
  double noise_B() const noexcept { return noise_B_; }          // eta B
  double noise_sigma() const noexcept { return noise_sigma_; }  // eta sigma
  double M() const noexcept { return M_; }                      // max(L_B, eta B)
  double kappa() const noexcept { return kappa_; }              // 144 M^2 / mu^2

  // tau_t = 4 / ((t+1) mu + 144 M^2 / mu), times the optional rescaling.
  double step(std::int64_t t) const noexcept;

  // Deterministic B(x) = x + eta G(x) - anchor.
  void apply(const Vector& x, Vector& out) const;
  // Sampled B~(x, seed); counts one oracle call.
  void sample_into(const Vector& x, std::uint64_t seed, CountingOracle& counter, Vector& out) const;
  // prox of tau * eta * r.
  void prox_into(double tau, const Vector& x, Vector& out) const;

  // C1 = 3 kappa, C2 = 282 / mu^2.
  double C1() const noexcept { return 3.0 * kappa_; }
  double C2() const noexcept { return 282.0 / (mu_ * mu_); }
  // 3 kappa d0^2 + 282 sigma^2 / mu^2 with d0^2 = ||x* - x0||^2.
  double rate_constant(double dist0_sq) const noexcept;
  // rate_constant / (T + kappa).
  double rate_bound(double dist0_sq, std::int64_t T) const noexcept;

 private:
  const StochasticOracle* oracle_;
  Vector anchor_;
  double eta_;
  double mu_;
  double lipschitz_B_;
  double noise_B_;
  double noise_sigma_;
  double M_;
  double kappa_;
  double step_scale_ = 1.0;
};

double inner_step(double mu, double M, std::int64_t t) noexcept;

enum class TrajectoryRecording { kNone, kDyadic, kFull };

struct InnerTrajectory {
  Vector final_point;
  // kDyadic: dyadic[i] = x_{2^i} for every 2^i <= T. kFull: full[t] = x_t for t = 0..T.
  std::vector<Vector> dyadic;
  std::vector<Vector> full;
};

// T stochastic FBF steps on the subproblem starting at x0; 2T oracle calls.
InnerTrajectory inner_fbf(const ResolventSubproblem& sub, const Vector& x0, std::int64_t T,
                          SeedStream& seeds, CountingOracle& counter,
                          TrajectoryRecording recording = TrajectoryRecording::kNone);

struct MlmcDraw {
  Vector estimate;
  int level = 0;  // the geometric draw I >= 1
  bool truncated = false;
  std::uint64_t oracle_calls = 0;
};

// One multilevel estimate of J(anchor) with level cap N; everything keyed by `seed`.
MlmcDraw mlmc_estimate(const ResolventSubproblem& sub, std::uint64_t N, std::uint64_t seed,
                       CountingOracle& counter);

// Exact expected oracle calls of one mlmc_estimate with cap N.
double expected_mlmc_calls(std::uint64_t N) noexcept;

struct MlmcBudget {
  std::uint64_t N = 1;
  std::uint64_t M = 1;
  double alpha_k = 0.0;
  double b_sq = 0.0;
  double v_sq = 1.0 / 60.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

// alpha_scale * alpha / (sqrt(k+2) ln(k+3)).
double km_weight(std::int64_t k, double alpha, double alpha_scale = 1.0) noexcept;

// N_k = ceil(scale * max(2C1, 2C2) / min(b_k^2, v^2/2)), M_k = ceil(scale * 28 max(C1, C2) log2(N_k) / v^2),
// with b_k^2 = alpha_k / (120 alpha (k+1)); both at least 1. The log uses the unscaled N_k.
MlmcBudget budgets(std::int64_t k, double alpha, double C1, double C2, double budget_scale = 1.0,
                   double alpha_scale = 1.0);

// (rho + 1/L)/2 for rho > 0 and 0.9/L for rho = 0.
double default_eta(double L, double rho) noexcept;

struct KmConfig {
  std::optional<double> eta;
  double alpha_scale = 1.0;
  double budget_scale = 1.0;
  std::optional<double> inner_initial_step;
  std::int64_t iterations = 100;
  std::uint64_t seed = 0;
  std::optional<Vector> initial_point;  // default: all ones
  RunControl control;
};

class InexactKm {
 public:
  // Throws RegimeError unless rho < eta < 1/L.
  InexactKm(const StochasticOracle& oracle, KmConfig config);

  double eta() const noexcept { return eta_; }
  double alpha() const noexcept { return alpha_; }
  double weight(std::int64_t k) const noexcept { return km_weight(k, alpha_, config_.alpha_scale); }
  MlmcBudget budget(std::int64_t k) const;
  ResolventSubproblem subproblem(const Vector& anchor) const;
  const KmConfig& config() const noexcept { return config_; }

  // Averages M_k multilevel draws at z, draw m keyed by (seed, k, m).
  Vector estimate_resolvent(const Vector& z, std::int64_t k, CountingOracle& counter) const;

  RunRecord run() const;

  // Picks k uniformly from `trajectory` and returns the half-point of one stochastic FBF
  // step on the subproblem anchored at z_k, started from z_k.
  Vector extract_output(const std::vector<Vector>& trajectory, std::uint64_t seed,
                        CountingOracle& counter, std::int64_t* chosen = nullptr) const;

 private:
  const StochasticOracle& oracle_;
  KmConfig config_;
  double eta_;
  double alpha_;
  double C1_;
  double C2_;
};

}  // namespace svi::mlmc
