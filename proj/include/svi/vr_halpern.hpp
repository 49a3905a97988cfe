#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svi/oracle.hpp"
#include "svi/run_record.hpp"

namespace svi::vr {

struct Schedule {
  double beta;   // 1/(k+3)
  double alpha;  // 2/sqrt(k+3), unclamped
  double gamma;  // 1/(4L)
  double tau;    // tau_bar / sqrt(k+3)
};

Schedule schedules(std::int64_t k, double tau_bar, double L);

// Three-term bound on rho admitted by the anchored method at step parameter tau_bar.
double rho_max(double L, double B, double tau_bar);
// min{L^2 / (219 B^2), L^2 / (20 B^2 + 7 L^2)}.
double tau_bar_cap(double L, double B) noexcept;

// Tuned STORM weights alpha_k = alpha0 / sqrt(k/c + 1), clamped to 1.
struct TunedStormWeights {
  double alpha0 = 1.0;
  double c = 1.0;
};

struct VrHalpernConfig {
  std::optional<double> tau_bar;
  std::int64_t iterations = 100;
  bool use_anchoring = true;
  // Replaces gamma_k = 1/(4L) by a constant and turns theory checks off.
  std::optional<double> gamma_override;
  bool theory_mode = true;
  std::optional<TunedStormWeights> tuned_weights;  // only outside theory mode
  std::uint64_t seed = 0;
  std::optional<Vector> initial_point;  // default: all ones
  RunControl control;
};

struct VrState {
  Vector z;
  Vector g;
  Vector anchor;
  std::int64_t k = 0;
};

// g_k' = G~(z_next, xi) + (1 - alpha)(g - G~(z, xi)) with one shared seed; two oracle calls.
Vector storm_update(const Vector& g, const Vector& z, const Vector& z_next, double alpha,
                    CountingOracle& counter, std::uint64_t seed);

class VrHalpern {
 public:
  // Throws CapabilityError for single-point oracles and RegimeError when theory checks fail.
  VrHalpern(const StochasticOracle& oracle, VrHalpernConfig config);

  double tau_bar() const noexcept { return tau_bar_; }
  double gamma(std::int64_t k) const noexcept;
  double beta(std::int64_t k) const noexcept;
  double storm_weight(std::int64_t k) const noexcept;
  double tau(std::int64_t k) const noexcept;
  // Unnormalized probability of returning the k-th half-point: tau_k (k+3).
  double output_weight(std::int64_t k) const noexcept;
  // Normalized output distribution over the first K half-points.
  std::vector<double> output_probabilities(std::int64_t K) const;
  const VrHalpernConfig& config() const noexcept { return config_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // z0 as the anchor and g_0 = G~(z0, xi_0); one oracle call.
  VrState initial_state(const Vector& z0, CountingOracle& counter) const;
  // Advances the state by one iteration (three oracle calls) and returns z_{k+1/2}.
  Vector step(VrState& state, CountingOracle& counter) const;

  RunRecord run() const;

 private:
  const StochasticOracle& oracle_;
  VrHalpernConfig config_;
  double tau_bar_;
  std::vector<std::string> warnings_;
};

}  // namespace svi::vr
