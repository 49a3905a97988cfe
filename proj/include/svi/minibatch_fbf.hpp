#pragma once

#include <cstdint>
#include <optional>

#include "svi/oracle.hpp"
#include "svi/run_record.hpp"

namespace svi::fbf {

// 1 - (2 + 2/sqrt6) rho/eta - (30/29) eta L^2 (eta + 31 (1 + sqrt6) rho / 15); positive iff admissible.
double delta(double L, double rho, double eta) noexcept;
// Largest rho for which delta(L, rho, 1/(sqrt6 L)) > 0: 72 / ((360 + 205 sqrt6) L).
double admissible_rho_bound(double L) noexcept;
double default_eta(double L) noexcept;
// ceil(bbar (k+1) ln^2(k+3)), at least 1 (uncapped).
std::uint64_t batch_size(double bbar, std::uint64_t k);
// (306 + 31 sqrt6) B^2 / (2 L^2 delta); 1 when B = 0.
double bbar_default(double B, double L, double delta);

struct MinibatchFbfConfig {
  std::optional<double> eta;   // default 1/(sqrt6 L)
  std::optional<double> bbar;  // default bbar_default(B, L, delta)
  std::int64_t iterations = 100;
  std::uint64_t seed = 0;
  std::uint64_t batch_cap = 1'000'000;
  std::optional<Vector> initial_point;  // default: all ones
  RunControl control;
};

struct FbfStep {
  Vector z_next;
  Vector z_half;
  std::uint64_t batch = 0;
};

class MinibatchFbf {
 public:
  // Throws RegimeError when delta(L, rho, eta) <= 0.
  MinibatchFbf(const StochasticOracle& oracle, MinibatchFbfConfig config);

  double eta() const noexcept { return eta_; }
  double bbar() const noexcept { return bbar_; }
  double delta() const noexcept { return delta_; }
  const MinibatchFbfConfig& config() const noexcept { return config_; }

  // Batch used at iteration k, after the cap.
  std::uint64_t batch(std::int64_t k) const;

  // One step from z at iteration k; batches are drawn from seed streams keyed by (seed, k).
  FbfStep step(const Vector& z, std::int64_t k, CountingOracle& counter) const;

  RunRecord run() const;

 private:
  const StochasticOracle& oracle_;
  MinibatchFbfConfig config_;
  double eta_;
  double delta_;
  double bbar_;
};

}  // namespace svi::fbf
