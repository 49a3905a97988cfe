#pragma once

#include <cstdint>
#include <optional>

#include "svi/oracle.hpp"
#include "svi/run_record.hpp"

namespace svi::eg {

struct EgConfig {
  double gamma = 1.0;
  std::int64_t iterations = 100;
  bool stochastic = false;
  std::uint64_t seed = 0;
  std::optional<Vector> initial_point;  // default: all ones
  RunControl control;
};

// z_half = prox(z - gamma G(z)), z_next = prox(z - gamma G(z_half)); two oracle calls.
// With stochastic = false the exact operator is used; otherwise one sample per evaluation,
// keyed by (seed, 0) and (seed, 1).
Vector eg_step(const Vector& z, CountingOracle& counter, double gamma, bool stochastic,
               std::uint64_t seed);

// Runs K steps and returns the last iterate as the output point.
RunRecord run(const StochasticOracle& oracle, const EgConfig& config);

}  // namespace svi::eg
