#include "svi/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "svi/errors.hpp"
#include "svi/extragradient.hpp"
#include "svi/harness/csv.hpp"
#include "svi/minibatch_fbf.hpp"
#include "svi/mlmc_km.hpp"
#include "svi/problems.hpp"
#include "svi/vr_halpern.hpp"

#ifndef SVI_VERSION
#define SVI_VERSION "unknown"
#endif

namespace svi::harness {
namespace {

enum class Kind { kNumber, kInteger, kBool, kString, kNumberArray, kMatrix };

using Schema = std::map<std::string, Kind>;

const std::map<std::string, Schema>& algorithm_schemas() {
  static const std::map<std::string, Schema> schemas = {
      {"eg", {{"iterations", Kind::kInteger}, {"gamma", Kind::kNumber}, {"stochastic", Kind::kBool}}},
      {"fbf_minibatch",
       {{"iterations", Kind::kInteger}, {"eta", Kind::kNumber}, {"bbar", Kind::kNumber}, {"batch_cap", Kind::kInteger}}},
      {"mlmc_km",
       {{"iterations", Kind::kInteger},
        {"eta", Kind::kNumber},
        {"alpha_scale", Kind::kNumber},
        {"budget_scale", Kind::kNumber},
        {"inner_initial_step", Kind::kNumber},
        {"inner_step_factor", Kind::kNumber}}},
      {"vr_halpern",
       {{"iterations", Kind::kInteger},
        {"tau_bar", Kind::kNumber},
        {"gamma", Kind::kNumber},
        {"anchoring", Kind::kBool},
        {"theory_mode", Kind::kBool},
        {"alpha0", Kind::kNumber},
        {"c", Kind::kNumber}}},
  };
  return schemas;
}

const std::map<std::string, Schema>& problem_schemas() {
  static const std::map<std::string, Schema> schemas = {
      {"rotation", {{"kind", Kind::kString}, {"L", Kind::kNumber}, {"theta", Kind::kNumber}, {"rho", Kind::kNumber}}},
      {"quadratic", {{"kind", Kind::kString}, {"L", Kind::kNumber}, {"rho", Kind::kNumber}}},
      {"bilinear_box", {{"kind", Kind::kString}, {"coupling", Kind::kMatrix}, {"halfwidth", Kind::kNumber}}},
  };
  return schemas;
}

const Schema& noise_schema() {
  static const Schema schema = {{"model", Kind::kString}, {"scale", Kind::kNumber}, {"nu", Kind::kInteger},
                                {"B", Kind::kNumber},     {"sigma", Kind::kNumber}, {"anchor", Kind::kNumberArray}};
  return schema;
}

const std::set<std::string>& problem_sweep_params() {
  static const std::set<std::string> params = {"rho", "theta", "L"};
  return params;
}

// Non-negative integer, whether stored signed or unsigned.
bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

bool matches(const json& v, Kind kind) {
  switch (kind) {
    case Kind::kNumber: return v.is_number();
    case Kind::kInteger: return v.is_number_integer();
    case Kind::kBool: return v.is_boolean();
    case Kind::kString: return v.is_string();
    case Kind::kNumberArray:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    case Kind::kMatrix:
      if (!v.is_array() || v.empty()) return false;
      for (const auto& row : v) {
        if (!row.is_array() || row.size() != v.front().size() || row.empty()) return false;
        for (const auto& x : row) {
          if (!x.is_number()) return false;
        }
      }
      return true;
  }
  return false;
}

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::kNumber: return "a number";
    case Kind::kInteger: return "an integer";
    case Kind::kBool: return "a boolean";
    case Kind::kString: return "a string";
    case Kind::kNumberArray: return "an array of numbers";
    case Kind::kMatrix: return "a rectangular array of number rows";
  }
  return "?";
}

void check_object(const json& obj, const Schema& schema, const std::string& path, std::vector<std::string>& errors) {
  for (const auto& [key, value] : obj.items()) {
    const auto it = schema.find(key);
    if (it == schema.end()) {
      errors.push_back(path + "." + key + ": unknown field");
    } else if (!matches(value, it->second)) {
      errors.push_back(path + "." + key + ": must be " + kind_name(it->second));
    }
  }
}

void require_positive(const json& obj, const char* key, const std::string& path, std::vector<std::string>& errors) {
  if (obj.contains(key) && obj[key].is_number() && !(obj[key].get<double>() > 0.0)) {
    errors.push_back(path + "." + key + ": must be > 0");
  }
}

void require_nonnegative(const json& obj, const char* key, const std::string& path, std::vector<std::string>& errors) {
  if (obj.contains(key) && obj[key].is_number() && !(obj[key].get<double>() >= 0.0)) {
    errors.push_back(path + "." + key + ": must be >= 0");
  }
}

std::string default_label(const AlgorithmEntry& a) {
  if (a.kind == "vr_halpern" && a.params.is_object() && a.params.value("anchoring", true) == false) {
    return "vr_halpern_beta0";
  }
  return a.kind;
}

double num(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj[key].get<double>() : fallback;
}

template <class T>
std::optional<T> opt(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return obj[key].get<T>();
}

// Applies the sweep value to the parts of the experiment that own the parameter.
void apply_sweep(const std::string& param, double value, json& problem, json& noise, json& params,
                 const std::string& algorithm_kind) {
  if (problem_sweep_params().count(param)) {
    problem[param] = value;
    if (param == "rho") problem.erase("theta");
    if (param == "theta") problem.erase("rho");
    return;
  }
  if (param == "noise_scale") {
    noise[noise.value("model", "none") == "multiplicative" ? "sigma" : "scale"] = value;
    return;
  }
  const auto& schema = algorithm_schemas().at(algorithm_kind);
  if (schema.count(param)) params[param] = value;
}

ProblemInstance build_problem(const json& p) {
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "rotation") {
    const double L = num(p, "L", 1.0);
    const double theta = p.contains("theta") ? p["theta"].get<double>() : rotation_theta_for_rho(L, p.at("rho").get<double>());
    return make_rotation(L, theta);
  }
  if (kind == "quadratic") return make_quadratic(num(p, "L", 1.0), num(p, "rho", 0.0));
  const json& rows = p.at("coupling");
  Matrix c(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return make_bilinear_box(c, num(p, "halfwidth", 1.0));
}

NoiseSpec build_noise(const json& n) {
  const std::string model = n.value("model", "none");
  if (model == "gaussian") return NoiseSpec::gaussian(num(n, "scale", 1.0));
  if (model == "student_t") return NoiseSpec::student_t(num(n, "scale", 1.0), n.value("nu", 2));
  if (model == "laplace") return NoiseSpec::laplace(num(n, "scale", 1.0));
  if (model == "multiplicative") {
    std::optional<Vector> anchor;
    if (n.contains("anchor")) {
      const auto v = n["anchor"].get<std::vector<double>>();
      anchor = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return NoiseSpec::multiplicative(num(n, "B", 0.0), num(n, "sigma", 0.0), anchor);
  }
  return NoiseSpec::none();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string sweep_cell(const CellResult& c) {
  return c.sweep_value ? format_double(*c.sweep_value) : std::string();
}

std::string sweep_name(const ExperimentResult& r) { return r.spec.sweep ? r.spec.sweep->param : std::string(); }

}  // namespace

const char* to_string(CellStatus status) noexcept {
  switch (status) {
    case CellStatus::kOk: return "ok";
    case CellStatus::kRejected: return "rejected";
    case CellStatus::kError: return "error";
  }
  return "?";
}

std::vector<std::string> validate(const ExperimentSpec& spec) {
  std::vector<std::string> errors;
  if (spec.experiment_id.empty()) errors.push_back("experiment_id: must be a non-empty string");

  // problem
  if (!spec.problem.is_object() || !spec.problem.contains("kind") || !spec.problem["kind"].is_string()) {
    errors.push_back("problem.kind: required, one of rotation | quadratic | bilinear_box");
  } else {
    const std::string kind = spec.problem["kind"].get<std::string>();
    const auto it = problem_schemas().find(kind);
    if (it == problem_schemas().end()) {
      errors.push_back("problem.kind: unknown kind '" + kind + "'");
    } else {
      check_object(spec.problem, it->second, "problem", errors);
      require_positive(spec.problem, "L", "problem", errors);
      require_nonnegative(spec.problem, "rho", "problem", errors);
      require_positive(spec.problem, "halfwidth", "problem", errors);
      const bool swept_angle = spec.sweep && (spec.sweep->param == "rho" || spec.sweep->param == "theta");
      if (kind == "rotation" && !swept_angle && spec.problem.contains("theta") == spec.problem.contains("rho")) {
        errors.push_back("problem: rotation needs exactly one of theta or rho");
      }
      if (kind == "quadratic" && !spec.problem.contains("rho") && !(spec.sweep && spec.sweep->param == "rho")) {
        errors.push_back("problem.rho: required for quadratic");
      }
      if (kind == "bilinear_box" && !spec.problem.contains("coupling")) {
        errors.push_back("problem.coupling: required for bilinear_box");
      }
    }
  }

  // noise
  if (!spec.noise.is_object()) {
    errors.push_back("noise: must be an object");
  } else {
    check_object(spec.noise, noise_schema(), "noise", errors);
    static const std::set<std::string> models = {"none", "gaussian", "student_t", "laplace", "multiplicative"};
    const json& m = spec.noise.contains("model") ? spec.noise["model"] : json("none");
    if (m.is_string() && !models.count(m.get<std::string>())) {
      errors.push_back("noise.model: unknown model '" + m.get<std::string>() + "'");
    }
    require_nonnegative(spec.noise, "scale", "noise", errors);
    require_nonnegative(spec.noise, "B", "noise", errors);
    require_nonnegative(spec.noise, "sigma", "noise", errors);
    if (spec.noise.contains("nu") && spec.noise["nu"].is_number_integer() && spec.noise["nu"].get<int>() < 1) {
      errors.push_back("noise.nu: must be >= 1");
    }
  }

  // algorithms
  if (spec.algorithms.empty()) errors.push_back("algorithms: at least one algorithm is required");
  std::set<std::string> labels;
  bool sweep_owned = false;
  for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
    const auto& a = spec.algorithms[i];
    const std::string path = "algorithms[" + std::to_string(i) + "]";
    const auto it = algorithm_schemas().find(a.kind);
    if (it == algorithm_schemas().end()) {
      errors.push_back(path + ".kind: unknown kind '" + a.kind + "' (eg | fbf_minibatch | mlmc_km | vr_halpern)");
      continue;
    }
    if (!a.params.is_object()) {
      errors.push_back(path + ".params: must be an object");
      continue;
    }
    check_object(a.params, it->second, path + ".params", errors);
    for (const char* key : {"gamma", "eta", "bbar", "tau_bar", "alpha_scale", "budget_scale", "inner_initial_step",
                            "inner_step_factor", "alpha0", "c"}) {
      require_positive(a.params, key, path + ".params", errors);
    }
    if (a.params.contains("iterations") && a.params["iterations"].is_number_integer() &&
        a.params["iterations"].get<std::int64_t>() < 1) {
      errors.push_back(path + ".params.iterations: must be >= 1");
    }
    if (a.params.contains("inner_initial_step") && a.params.contains("inner_step_factor")) {
      errors.push_back(path + ".params: inner_initial_step and inner_step_factor are mutually exclusive");
    }
    const std::string label = a.label.empty() ? default_label(a) : a.label;
    if (!labels.insert(label).second) errors.push_back(path + ".label: duplicate label '" + label + "'");
    if (spec.sweep && it->second.count(spec.sweep->param)) sweep_owned = true;
  }

  if (spec.seeds.empty()) errors.push_back("seeds: must be non-empty");
  if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size()) {
    errors.push_back("seeds: must not repeat");
  }

  if (spec.sweep) {
    const auto& s = *spec.sweep;
    if (s.values.empty()) errors.push_back("sweep.values: must be non-empty when a sweep is present");
    for (double v : s.values) {
      if (!std::isfinite(v)) errors.push_back("sweep.values: must be finite");
    }
    const bool known = problem_sweep_params().count(s.param) || s.param == "noise_scale" || sweep_owned;
    if (!known) errors.push_back("sweep.param: '" + s.param + "' is not a parameter of the problem, noise or any algorithm");
    if ((s.param == "rho" || s.param == "theta") && spec.problem.is_object() &&
        spec.problem.value("kind", "") == "bilinear_box") {
      errors.push_back("sweep.param: bilinear_box has no " + s.param);
    }
  }

  if (spec.max_iterations < 1) errors.push_back("budget.max_iterations: must be >= 1");
  if (spec.max_oracle_calls && *spec.max_oracle_calls == 0) errors.push_back("budget.max_oracle_calls: must be >= 1");
  if (!(spec.divergence_threshold > 0.0)) errors.push_back("divergence_threshold: must be > 0");
  if (spec.initial_point) {
    int dim = 2;
    if (spec.problem.is_object() && spec.problem.value("kind", "") == "bilinear_box" &&
        matches(spec.problem.value("coupling", json()), Kind::kMatrix)) {
      dim = static_cast<int>(spec.problem["coupling"].size() + spec.problem["coupling"].front().size());
    }
    if (static_cast<int>(spec.initial_point->size()) != dim) {
      errors.push_back("initial_point: must have " + std::to_string(dim) + " entries");
    }
  }
  return errors;
}

ExperimentSpec parse_spec(const json& doc) {
  std::vector<std::string> errors;
  ExperimentSpec spec;
  if (!doc.is_object()) throw ValidationError({"document: must be a JSON object"});
  static const std::set<std::string> top = {"experiment_id", "problem", "noise", "algorithms", "seeds", "sweep",
                                            "budget", "initial_point", "output", "record_points",
                                            "divergence_threshold"};
  for (const auto& [key, value] : doc.items()) {
    if (!top.count(key)) errors.push_back(key + ": unknown field");
  }

  auto get_string = [&](const char* key, std::string& out) {
    if (!doc.contains(key)) return;
    if (doc[key].is_string()) {
      out = doc[key].get<std::string>();
    } else {
      errors.push_back(std::string(key) + ": must be a string");
    }
  };
  get_string("experiment_id", spec.experiment_id);
  get_string("output", spec.output);
  if (!doc.contains("experiment_id")) errors.push_back("experiment_id: required");

  if (doc.contains("problem")) {
    spec.problem = doc["problem"];
  } else {
    spec.problem = json();
  }
  if (doc.contains("noise")) spec.noise = doc["noise"];

  if (!doc.contains("algorithms")) {
    errors.push_back("algorithms: required");
  } else if (!doc["algorithms"].is_array()) {
    errors.push_back("algorithms: must be an array");
  } else {
    for (std::size_t i = 0; i < doc["algorithms"].size(); ++i) {
      const json& a = doc["algorithms"][i];
      const std::string path = "algorithms[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("kind") || !a["kind"].is_string()) {
        errors.push_back(path + ".kind: required string");
        continue;
      }
      for (const auto& [key, value] : a.items()) {
        if (key != "kind" && key != "label" && key != "params") errors.push_back(path + "." + key + ": unknown field");
      }
      AlgorithmEntry entry{a["kind"].get<std::string>(), "", a.value("params", json::object())};
      if (a.contains("label")) {
        if (a["label"].is_string()) {
          entry.label = a["label"].get<std::string>();
        } else {
          errors.push_back(path + ".label: must be a string");
        }
      }
      spec.algorithms.push_back(std::move(entry));
    }
  }

  if (doc.contains("seeds")) {
    const json& s = doc["seeds"];
    if (!s.is_array() || !std::all_of(s.begin(), s.end(), is_count)) {
      errors.push_back("seeds: must be an array of non-negative integers");
    } else {
      spec.seeds = s.get<std::vector<std::uint64_t>>();
    }
  }

  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    const json& s = doc["sweep"];
    Sweep sw;
    if (!s.is_object()) {
      errors.push_back("sweep: must be an object");
    } else {
      if (s.contains("param") && s["param"].is_string()) {
        sw.param = s["param"].get<std::string>();
      } else {
        errors.push_back("sweep.param: required string");
      }
      if (s.contains("values") && matches(s["values"], Kind::kNumberArray)) {
        sw.values = s["values"].get<std::vector<double>>();
      } else {
        errors.push_back("sweep.values: required array of numbers");
      }
      for (const auto& [key, value] : s.items()) {
        if (key != "param" && key != "values") errors.push_back("sweep." + key + ": unknown field");
      }
    }
    spec.sweep = std::move(sw);
  }

  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    if (!b.is_object()) {
      errors.push_back("budget: must be an object");
    } else {
      for (const auto& [key, value] : b.items()) {
        if (key != "max_iterations" && key != "max_oracle_calls") errors.push_back("budget." + key + ": unknown field");
      }
      if (b.contains("max_iterations")) {
        if (b["max_iterations"].is_number_integer()) {
          spec.max_iterations = b["max_iterations"].get<std::int64_t>();
        } else {
          errors.push_back("budget.max_iterations: must be an integer");
        }
      }
      if (b.contains("max_oracle_calls") && !b["max_oracle_calls"].is_null()) {
        if (is_count(b["max_oracle_calls"])) {
          spec.max_oracle_calls = b["max_oracle_calls"].get<std::uint64_t>();
        } else {
          errors.push_back("budget.max_oracle_calls: must be a non-negative integer");
        }
      }
    }
  }

  if (doc.contains("initial_point") && !doc["initial_point"].is_null()) {
    if (matches(doc["initial_point"], Kind::kNumberArray)) {
      spec.initial_point = doc["initial_point"].get<std::vector<double>>();
    } else {
      errors.push_back("initial_point: must be an array of numbers");
    }
  }
  if (doc.contains("record_points")) {
    if (doc["record_points"].is_boolean()) {
      spec.record_points = doc["record_points"].get<bool>();
    } else {
      errors.push_back("record_points: must be a boolean");
    }
  }
  if (doc.contains("divergence_threshold")) {
    if (doc["divergence_threshold"].is_number()) {
      spec.divergence_threshold = doc["divergence_threshold"].get<double>();
    } else {
      errors.push_back("divergence_threshold: must be a number");
    }
  }

  for (auto& e : validate(spec)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ValidationError(std::move(errors));
  for (auto& a : spec.algorithms) {
    if (a.label.empty()) a.label = default_label(a);
  }
  return spec;
}

json to_json(const ExperimentSpec& spec) {
  json doc;
  doc["experiment_id"] = spec.experiment_id;
  doc["problem"] = spec.problem;
  doc["noise"] = spec.noise;
  doc["algorithms"] = json::array();
  for (const auto& a : spec.algorithms) {
    doc["algorithms"].push_back({{"kind", a.kind}, {"label", a.label.empty() ? default_label(a) : a.label}, {"params", a.params}});
  }
  doc["seeds"] = spec.seeds;
  if (spec.sweep) doc["sweep"] = {{"param", spec.sweep->param}, {"values", spec.sweep->values}};
  doc["budget"] = {{"max_iterations", spec.max_iterations}};
  if (spec.max_oracle_calls) doc["budget"]["max_oracle_calls"] = *spec.max_oracle_calls;
  if (spec.initial_point) doc["initial_point"] = *spec.initial_point;
  doc["output"] = spec.output;
  doc["record_points"] = spec.record_points;
  doc["divergence_threshold"] = spec.divergence_threshold;
  return doc;
}

std::uint64_t seed_base_from_env() {
  const char* raw = std::getenv("SVI_SEED_BASE");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw InvalidArgument(std::string("SVI_SEED_BASE must be a non-negative integer, got '") + raw + "'");
  }
  return v;
}

RunRecord run_cell(const ExperimentSpec& spec, std::size_t algorithm_index, std::optional<double> sweep_value,
                   std::uint64_t seed) {
  const AlgorithmEntry& a = spec.algorithms.at(algorithm_index);
  json problem = spec.problem;
  json noise = spec.noise;
  json params = a.params;
  if (spec.sweep && sweep_value) apply_sweep(spec.sweep->param, *sweep_value, problem, noise, params, a.kind);

  const StochasticOracle oracle = attach_noise(build_problem(problem), build_noise(noise));
  RunControl control;
  control.max_oracle_calls = spec.max_oracle_calls;
  control.divergence_threshold = spec.divergence_threshold;
  control.record_points = spec.record_points;
  std::optional<Vector> z0;
  if (spec.initial_point) {
    z0 = Eigen::Map<const Vector>(spec.initial_point->data(), static_cast<Eigen::Index>(spec.initial_point->size()));
  }
  const std::int64_t iterations = params.value("iterations", spec.max_iterations);
  const double L = oracle.problem().lipschitz();

  RunRecord record;
  if (a.kind == "eg") {
    eg::EgConfig c;
    c.gamma = num(params, "gamma", 1.0 / L);
    c.stochastic = params.value("stochastic", false);
    c.iterations = iterations;
    c.seed = seed;
    c.initial_point = z0;
    c.control = control;
    record = eg::run(oracle, c);
  } else if (a.kind == "fbf_minibatch") {
    fbf::MinibatchFbfConfig c;
    c.eta = opt<double>(params, "eta");
    c.bbar = opt<double>(params, "bbar");
    if (params.contains("batch_cap")) c.batch_cap = params["batch_cap"].get<std::uint64_t>();
    c.iterations = iterations;
    c.seed = seed;
    c.initial_point = z0;
    c.control = control;
    record = fbf::MinibatchFbf(oracle, c).run();
  } else if (a.kind == "mlmc_km") {
    mlmc::KmConfig c;
    c.eta = opt<double>(params, "eta");
    c.alpha_scale = num(params, "alpha_scale", 1.0);
    c.budget_scale = num(params, "budget_scale", 1.0);
    c.inner_initial_step = opt<double>(params, "inner_initial_step");
    if (params.contains("inner_step_factor")) {
      const double eta = c.eta.value_or(mlmc::default_eta(L, oracle.problem().rho()));
      c.inner_initial_step = params["inner_step_factor"].get<double>() / (1.0 + eta * L);
    }
    c.iterations = iterations;
    c.seed = seed;
    c.initial_point = z0;
    c.control = control;
    record = mlmc::InexactKm(oracle, c).run();
  } else if (a.kind == "vr_halpern") {
    vr::VrHalpernConfig c;
    c.tau_bar = opt<double>(params, "tau_bar");
    c.gamma_override = opt<double>(params, "gamma");
    c.use_anchoring = params.value("anchoring", true);
    c.theory_mode = params.value("theory_mode", true);
    if (params.contains("alpha0") || params.contains("c")) {
      c.tuned_weights = vr::TunedStormWeights{num(params, "alpha0", 1.0), num(params, "c", 1.0)};
    }
    c.iterations = iterations;
    c.seed = seed;
    c.initial_point = z0;
    c.control = control;
    record = vr::VrHalpern(oracle, c).run();
  } else {
    throw InvalidArgument("unknown algorithm kind '" + a.kind + "'");
  }
  record.algorithm = a.label.empty() ? default_label(a) : a.label;
  return record;
}

ExperimentResult run_experiment(const ExperimentSpec& spec_in, unsigned workers,
                                std::optional<std::uint64_t> seed_base) {
  if (auto errors = validate(spec_in); !errors.empty()) throw ValidationError(std::move(errors));
  ExperimentResult result;
  result.spec = spec_in;
  for (auto& a : result.spec.algorithms) {
    if (a.label.empty()) a.label = default_label(a);
  }
  result.seed_base = seed_base.value_or(seed_base_from_env());
  const ExperimentSpec& spec = result.spec;

  std::vector<std::optional<double>> sweep_values;
  if (spec.sweep) {
    for (double v : spec.sweep->values) sweep_values.emplace_back(v);
  } else {
    sweep_values.emplace_back(std::nullopt);
  }
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    for (const auto& v : sweep_values) {
      for (std::uint64_t s : spec.seeds) {
        CellResult cell;
        cell.algorithm_index = a;
        cell.algorithm = spec.algorithms[a].label;
        cell.sweep_value = v;
        cell.seed = s + result.seed_base;
        result.cells.push_back(std::move(cell));
      }
    }
  }

  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      CellResult& cell = result.cells[i];
      try {
        cell.record = run_cell(spec, cell.algorithm_index, cell.sweep_value, cell.seed);
      } catch (const RegimeError& e) {
        cell.status = CellStatus::kRejected;
        cell.message = e.what();
      } catch (const std::exception& e) {
        cell.status = CellStatus::kError;
        cell.message = e.what();
      }
      if (cell.status != CellStatus::kOk) {
        cell.record.algorithm = cell.algorithm;
        cell.record.seed = cell.seed;
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, result.cells.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_trajectory_csv(const ExperimentResult& r, std::ostream& out) {
  out << "experiment_id,algorithm,sweep_param,sweep_value,seed,iter,oracle_calls,residual,norm_z\n";
  const std::string id = csv_field(r.spec.experiment_id);
  const std::string param = csv_field(sweep_name(r));
  for (const auto& c : r.cells) {
    const std::string prefix = id + "," + csv_field(c.algorithm) + "," + param + "," + sweep_cell(c) + "," +
                               std::to_string(c.seed) + ",";
    for (const auto& row : c.record.iterations) {
      out << prefix << row.iteration << ',' << row.oracle_calls << ',' << format_double(row.residual) << ','
          << format_double(row.norm_z) << '\n';
    }
  }
}

void write_summary_csv(const ExperimentResult& r, std::ostream& out) {
  out << "experiment_id,algorithm,sweep_param,sweep_value,seed,status,stop_cause,iterations,oracle_calls,"
         "initial_residual,final_residual,output_residual,final_norm_z,config_digest,message\n";
  for (const auto& c : r.cells) {
    const RunRecord& rec = c.record;
    const bool ok = c.status == CellStatus::kOk;
    out << csv_field(r.spec.experiment_id) << ',' << csv_field(c.algorithm) << ',' << csv_field(sweep_name(r)) << ','
        << sweep_cell(c) << ',' << c.seed << ',' << to_string(c.status) << ','
        << (ok ? to_string(rec.stop_cause) : "") << ',' << rec.iterations.size() << ',' << rec.total_oracle_calls()
        << ',' << (ok ? format_double(rec.initial_residual) : "") << ','
        << (ok ? format_double(rec.final_residual()) : "") << ','
        << (ok ? format_double(rec.output_residual) : "") << ',' << (ok ? format_double(rec.final_norm()) : "")
        << ',' << rec.config_digest << ',' << csv_field(c.message) << '\n';
  }
}

void write_means_csv(const ExperimentResult& r, std::ostream& out) {
  out << "experiment_id,algorithm,sweep_param,sweep_value,runs,ok,rejected,diverged,mean_final_residual,"
         "mean_output_residual,mean_final_norm_z,mean_oracle_calls\n";
  std::size_t i = 0;
  while (i < r.cells.size()) {
    std::size_t j = i;
    while (j < r.cells.size() && r.cells[j].algorithm_index == r.cells[i].algorithm_index &&
           r.cells[j].sweep_value == r.cells[i].sweep_value) {
      ++j;
    }
    std::size_t ok = 0, rejected = 0, diverged = 0;
    double res = 0.0, outres = 0.0, norm = 0.0, calls = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      const CellResult& c = r.cells[k];
      if (c.status == CellStatus::kRejected) ++rejected;
      if (c.status != CellStatus::kOk) continue;
      ++ok;
      if (c.record.stop_cause == StopCause::kDiverged) ++diverged;
      res += c.record.final_residual();
      outres += c.record.output_residual;
      norm += c.record.final_norm();
      calls += static_cast<double>(c.record.total_oracle_calls());
    }
    auto mean = [&](double s) { return ok ? format_double(s / static_cast<double>(ok)) : std::string(); };
    out << csv_field(r.spec.experiment_id) << ',' << csv_field(r.cells[i].algorithm) << ','
        << csv_field(sweep_name(r)) << ',' << sweep_cell(r.cells[i]) << ',' << (j - i) << ',' << ok << ','
        << rejected << ',' << diverged << ',' << mean(res) << ',' << mean(outres) << ',' << mean(norm) << ','
        << mean(calls) << '\n';
    i = j;
  }
}

void write_points_csv(const ExperimentResult& r, std::ostream& out) {
  out << "experiment_id,algorithm,sweep_param,sweep_value,seed,iter,coordinate,value\n";
  for (const auto& c : r.cells) {
    for (std::size_t k = 0; k < c.record.points.size(); ++k) {
      const Vector& p = c.record.points[k];
      for (Eigen::Index d = 0; d < p.size(); ++d) {
        // iter -1 is the initial point.
        out << csv_field(r.spec.experiment_id) << ',' << csv_field(c.algorithm) << ',' << csv_field(sweep_name(r))
            << ',' << sweep_cell(c) << ',' << c.seed << ',' << static_cast<std::int64_t>(k) - 1 << ',' << d
            << ',' << format_double(p[d]) << '\n';
      }
    }
  }
}

json manifest(const ExperimentResult& r) {
  json m;
  m["spec"] = to_json(r.spec);
  m["library_version"] = SVI_VERSION;
  m["seed_base"] = r.seed_base;
  m["wall_clock_seconds"] = r.wall_seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["finished_at"] = stamp;
  std::size_t ok = 0, rejected = 0, errored = 0;
  json warnings = json::array();
  for (const auto& c : r.cells) {
    if (c.status == CellStatus::kOk) ++ok;
    if (c.status == CellStatus::kRejected) ++rejected;
    if (c.status == CellStatus::kError) ++errored;
    for (const auto& w : c.record.warnings) {
      if (std::find(warnings.begin(), warnings.end(), c.algorithm + ": " + w) == warnings.end()) {
        warnings.push_back(c.algorithm + ": " + w);
      }
    }
  }
  m["cells"] = {{"total", r.cells.size()}, {"ok", ok}, {"rejected", rejected}, {"error", errored}};
  m["warnings"] = warnings;
  return m;
}

void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(r, f);
  }
  {
    std::ofstream f(dir / "summary.csv", std::ios::binary);
    write_summary_csv(r, f);
  }
  {
    std::ofstream f(dir / "means.csv", std::ios::binary);
    write_means_csv(r, f);
  }
  if (r.spec.record_points) {
    std::ofstream f(dir / "points.csv", std::ios::binary);
    write_points_csv(r, f);
  }
  write_file(dir / "manifest.json", manifest(r).dump(2) + "\n");
}

}  // namespace svi::harness
