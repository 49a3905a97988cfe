#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "svi/run_record.hpp"

namespace svi::harness {

using nlohmann::json;

struct AlgorithmEntry {
  std::string kind;   // eg | fbf_minibatch | mlmc_km | vr_halpern
  std::string label;  // unique within the experiment
  json params = json::object();
};

struct Sweep {
  std::string param;
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string experiment_id;
  json problem = json::object();
  json noise = json{{"model", "none"}};
  std::vector<AlgorithmEntry> algorithms;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6};
  std::optional<Sweep> sweep;
  std::int64_t max_iterations = 100;
  std::optional<std::uint64_t> max_oracle_calls;
  std::optional<std::vector<double>> initial_point;
  std::string output;
  bool record_points = false;
  double divergence_threshold = 1e12;
};

// Parses and validates; throws ValidationError naming every violated field.
ExperimentSpec parse_spec(const json& doc);
// Empty when the experiment spec is valid.
std::vector<std::string> validate(const ExperimentSpec& spec);
json to_json(const ExperimentSpec& spec);

enum class CellStatus { kOk, kRejected, kError };
const char* to_string(CellStatus status) noexcept;

struct CellResult {
  std::size_t algorithm_index = 0;
  std::string algorithm;
  std::optional<double> sweep_value;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::kOk;
  std::string message;
  RunRecord record;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::uint64_t seed_base = 0;
  std::vector<CellResult> cells;  // canonical order: algorithm, sweep value, seed
  double wall_seconds = 0.0;
};

// SVI_SEED_BASE, or 0 when unset; throws InvalidArgument on garbage.
std::uint64_t seed_base_from_env();

// Runs one (algorithm, sweep value, seed) cell; solver regime errors propagate.
RunRecord run_cell(const ExperimentSpec& spec, std::size_t algorithm_index,
                   std::optional<double> sweep_value, std::uint64_t seed);

// Runs every cell on up to `workers` threads (0 = hardware concurrency).
ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned workers = 0,
                                std::optional<std::uint64_t> seed_base = std::nullopt);

void write_trajectory_csv(const ExperimentResult& result, std::ostream& out);
void write_summary_csv(const ExperimentResult& result, std::ostream& out);
void write_means_csv(const ExperimentResult& result, std::ostream& out);
void write_points_csv(const ExperimentResult& result, std::ostream& out);
json manifest(const ExperimentResult& result);

// Writes trajectory.csv, summary.csv, means.csv, manifest.json (and points.csv when recorded).
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace svi::harness
