#include "svi/harness/presets.hpp"

#include <cmath>
#include <numbers>

#include "svi/errors.hpp"

namespace svi::harness {
namespace {

// Tuned for the noise-free counter-example: KM weight multiplier, per-iteration budget
// scaling and inner step (as a fraction of 1/L_B).
const json kKmTuned = {{"alpha_scale", 2.0}, {"budget_scale", 3e-8}, {"inner_step_factor", 0.5}};

ExperimentSpec counterexample(const std::string& id, bool record_points) {
  ExperimentSpec s;
  s.experiment_id = id;
  s.problem = {{"kind", "rotation"}, {"L", 1.0}, {"theta", 2.0 * std::numbers::pi / 3.0}};
  s.noise = {{"model", "none"}};
  json km = kKmTuned;
  km["eta"] = 0.95;
  s.algorithms = {{"eg", "eg", {{"gamma", 1.0}}}, {"mlmc_km", "mlmc_km", km}};
  s.seeds = {0, 1, 2, 3, 4, 5, 6};
  s.max_iterations = 300;
  s.output = "results/" + id;
  s.record_points = record_points;
  return s;
}

ExperimentSpec gamma_sweep(const std::string& id, const json& noise) {
  ExperimentSpec s;
  s.experiment_id = id;
  s.problem = {{"kind", "quadratic"}, {"L", 1.0}, {"rho", 0.1}};
  s.noise = noise;
  s.algorithms = {{"vr_halpern", "vr_halpern", json::object()},
                  {"vr_halpern", "vr_halpern_beta0", {{"anchoring", false}}}};
  s.seeds = {0, 1, 2, 3, 4, 5, 6};
  s.sweep = Sweep{"gamma", log_grid(1e-3, 1.0, 10)};
  s.max_iterations = 2000;
  s.output = "results/" + id;
  return s;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidArgument("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"counterexample_residual", "counterexample_trajectory",
                                                 "rho_boundary_sweep",      "gamma_sweep_student_t",
                                                 "gamma_sweep_laplace",     "gamma_sweep_gaussian"};
  return names;
}

ExperimentSpec preset(const std::string& name) {
  if (name == "counterexample_residual") return counterexample(name, false);
  if (name == "counterexample_trajectory") return counterexample(name, true);
  if (name == "rho_boundary_sweep") {
    ExperimentSpec s;
    s.experiment_id = name;
    s.problem = {{"kind", "rotation"}, {"L", 1.0}, {"rho", 0.5}};
    s.noise = {{"model", "none"}};
    s.algorithms = {{"mlmc_km", "mlmc_km", kKmTuned}};
    s.seeds = {0, 1, 2, 3, 4, 5, 6};
    s.sweep = Sweep{"rho", {0.2, 0.5, 0.8, 0.95, 1.0}};
    s.max_iterations = 300;
    s.output = "results/" + name;
    return s;
  }
  if (name == "gamma_sweep_student_t") return gamma_sweep(name, {{"model", "student_t"}, {"scale", 1.0}, {"nu", 2}});
  if (name == "gamma_sweep_laplace") return gamma_sweep(name, {{"model", "laplace"}, {"scale", 1.0}});
  if (name == "gamma_sweep_gaussian") return gamma_sweep(name, {{"model", "gaussian"}, {"scale", 1.0}});
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown preset '" + name + "'; valid presets: " + valid);
}

}  // namespace svi::harness
