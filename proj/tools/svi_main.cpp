// Command-line front end: run presets or JSON experiment documents.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "svi/errors.hpp"
#include "svi/harness/experiment.hpp"
#include "svi/harness/presets.hpp"

namespace {

using svi::harness::ExperimentSpec;
using svi::harness::json;

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw svi::ValidationError({path + ": not valid JSON (" + e.what() + ")"});
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if (!item.empty() && item[0] == '-') throw std::invalid_argument("negative");
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw svi::ValidationError({"--seeds: '" + item + "' is not a non-negative integer"});
    }
  }
  return seeds;
}

int run(const ExperimentSpec& base, const std::string& out_dir, unsigned workers, std::int64_t max_iterations,
        const std::string& seeds) {
  ExperimentSpec spec = base;
  if (!out_dir.empty()) spec.output = out_dir;
  if (max_iterations > 0) spec.max_iterations = max_iterations;
  if (!seeds.empty()) spec.seeds = parse_seeds(seeds);
  if (spec.output.empty()) spec.output = "results/" + spec.experiment_id;

  const auto result = svi::harness::run_experiment(spec, workers);
  svi::harness::write_outputs(result, spec.output);

  std::size_t ok = 0, rejected = 0, errored = 0, diverged = 0;
  for (const auto& c : result.cells) {
    if (c.status == svi::harness::CellStatus::kOk) ++ok;
    if (c.status == svi::harness::CellStatus::kRejected) ++rejected;
    if (c.status == svi::harness::CellStatus::kError) {
      ++errored;
      std::cerr << "error in " << c.algorithm << " seed " << c.seed << ": " << c.message << '\n';
    }
    if (c.status == svi::harness::CellStatus::kOk && c.record.stop_cause == svi::StopCause::kDiverged) ++diverged;
  }
  for (const auto& w : svi::harness::manifest(result)["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  std::cout << spec.experiment_id << ": " << result.cells.size() << " runs (" << ok << " ok, " << diverged
            << " diverged, " << rejected << " rejected, " << errored << " failed) in " << result.wall_seconds
            << " s -> " << spec.output << '\n';
  return errored ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and experiments for stochastic variational inequalities"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir, seeds;
  unsigned workers = 0;
  std::int64_t max_iterations = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a preset or a JSON experiment document");
  auto* preset_opt = run_cmd->add_option("--preset", preset_name, "Preset name (see list-presets)");
  auto* config_opt = run_cmd->add_option("--config", config_path, "Experiment document (JSON)")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides the document)");
  run_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
  run_cmd->add_option("--max-iterations", max_iterations, "Override budget.max_iterations")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seeds", seeds, "Comma-separated seeds (overrides the document)");

  auto* list_cmd = app.add_subcommand("list-presets", "Print the available presets");
  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check an experiment document");
  validate_cmd->add_option("--config", validate_path, "Experiment document (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& n : svi::harness::preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (*validate_cmd) {
      const auto spec = svi::harness::parse_spec(read_json(validate_path));
      std::cout << spec.experiment_id << ": valid\n";
      return 0;
    }
    if (preset_name.empty() && config_path.empty()) {
      std::cerr << "run: one of --preset or --config is required\n";
      return 2;
    }
    const ExperimentSpec spec =
        preset_name.empty() ? svi::harness::parse_spec(read_json(config_path)) : svi::harness::preset(preset_name);
    return run(spec, out_dir, workers, max_iterations, seeds);
  } catch (const svi::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const svi::LookupError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
