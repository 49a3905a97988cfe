#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svi/types.hpp"

namespace svi {

struct IterationLog {
  std::int64_t iteration = 0;
  std::uint64_t oracle_calls = 0;  // cumulative, after this iteration
  double residual = 0.0;
  double norm_z = 0.0;
  // Solver-specific extra quantity (fixed-point gap for the KM solver); NaN when unused.
  double aux = std::numeric_limits<double>::quiet_NaN();
};

enum class StopCause { kCompleted, kOracleBudget, kDiverged };

const char* to_string(StopCause cause) noexcept;

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_digest;

  double initial_residual = 0.0;
  std::vector<IterationLog> iterations;
  // Raw iterates, only filled when RunControl::record_points is set.
  std::vector<Vector> points;

  Vector output_point;
  double output_residual = 0.0;
  std::int64_t output_index = 0;

  StopCause stop_cause = StopCause::kCompleted;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  std::uint64_t total_oracle_calls() const noexcept {
    return iterations.empty() ? 0 : iterations.back().oracle_calls;
  }
  // ||z|| at the last logged iterate.
  double final_norm() const noexcept { return iterations.empty() ? 0.0 : iterations.back().norm_z; }
  double final_residual() const noexcept {
    return iterations.empty() ? initial_residual : iterations.back().residual;
  }
};

// Stopping rules shared by every solver.
struct RunControl {
  std::optional<std::uint64_t> max_oracle_calls;
  double divergence_threshold = 1e12;
  bool record_points = false;
};

// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace svi
