#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "svi/problem.hpp"
#include "svi/residual.hpp"
#include "svi/run_record.hpp"

namespace svi::detail {

// Builds a "key=value;" description of a configuration for digesting.
class DigestBuilder {
 public:
  DigestBuilder& add(const char* key, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return add(key, std::string(buf));
  }
  DigestBuilder& add(const char* key, std::int64_t v) { return add(key, std::to_string(v)); }
  DigestBuilder& add(const char* key, std::uint64_t v) { return add(key, std::to_string(v)); }
  DigestBuilder& add(const char* key, bool v) { return add(key, std::string(v ? "1" : "0")); }
  DigestBuilder& add(const char* key, const std::string& v) {
    text_ += key;
    text_ += '=';
    text_ += v;
    text_ += ';';
    return *this;
  }
  DigestBuilder& add(const char* key, const Vector& v) {
    std::string s;
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", v[i]);
      s += buf;
    }
    return add(key, s);
  }
  std::string digest() const { return fnv1a_hex(text_); }

 private:
  std::string text_;
};

// Shared bookkeeping: per-iteration log, oracle budget and divergence guard.
class RunTracker {
 public:
  RunTracker(std::string algorithm, std::uint64_t seed, std::string digest, const RunControl& control,
             const ProblemInstance& problem)
      : control_(control), problem_(problem), start_(std::chrono::steady_clock::now()) {
    record_.algorithm = std::move(algorithm);
    record_.seed = seed;
    record_.config_digest = std::move(digest);
  }

  void set_initial(const Vector& z0) {
    record_.initial_residual = residual(problem_, z0);
    if (control_.record_points) record_.points.push_back(z0);
  }

  // Logs iteration k. Returns false when the run has to stop afterwards.
  bool log(std::int64_t k, std::uint64_t calls, const Vector& z, double res,
           double aux = std::numeric_limits<double>::quiet_NaN()) {
    const double nz = z.norm();
    record_.iterations.push_back({k, calls, res, nz, aux});
    if (control_.record_points) record_.points.push_back(z);
    if (!std::isfinite(nz) || nz > control_.divergence_threshold) {
      record_.stop_cause = StopCause::kDiverged;
      return false;
    }
    if (control_.max_oracle_calls && calls >= *control_.max_oracle_calls) {
      record_.stop_cause = StopCause::kOracleBudget;
      return false;
    }
    return true;
  }

  void warn(std::string message) { record_.warnings.push_back(std::move(message)); }
  bool diverged() const noexcept { return record_.stop_cause == StopCause::kDiverged; }
  std::size_t logged() const noexcept { return record_.iterations.size(); }

  RunRecord finish(Vector output, std::int64_t output_index) {
    record_.output_residual = std::isfinite(output.norm()) ? residual(problem_, output)
                                                           : std::numeric_limits<double>::infinity();
    record_.output_point = std::move(output);
    record_.output_index = output_index;
    record_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(record_);
  }

 private:
  RunRecord record_;
  RunControl control_;
  const ProblemInstance& problem_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace svi::detail
