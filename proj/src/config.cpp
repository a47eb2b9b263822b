#include "invlearn/config.hpp"

#include <fstream>
#include <set>

namespace invlearn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& required, const std::set<std::string>& optional) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!required.count(key) && !optional.count(key)) fail(path + "." + key, "unknown key");
  }
  for (const std::string& key : required)
    if (!obj.contains(key)) fail(path + "." + key, "missing required key");
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

long get_integer_or(const json& obj, const std::string& path, const std::string& key,
                    long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<long> get_long_array(const json& obj, const std::string& path,
                                 const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "expected a nonempty array");
  std::vector<long> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) fail(path + "." + key, "expected integer entries");
    out.push_back(e.get<long>());
  }
  return out;
}

std::vector<double> get_double_array(const json& obj, const std::string& path,
                                     const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "expected a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(path + "." + key, "expected numeric entries");
    out.push_back(e.get<double>());
  }
  return out;
}

void validate_problem(const json& problem) {
  check_keys(problem, "problem",
             {"ambient_dim", "forward", "design", "noise_delta", "subspaces"},
             {"normalize_kernel"});
  const long dim = get_integer(problem, "problem", "ambient_dim");
  if (dim < 2) fail("problem.ambient_dim", "must be >= 2");

  const json& forward = problem.at("forward");
  const std::string fkind = get_string(forward, "problem.forward", "kind");
  if (fkind == "diagonal_cosine") {
    check_keys(forward, "problem.forward", {"kind"}, {"decay_t", "singulars"});
    const bool has_t = forward.contains("decay_t");
    const bool has_s = forward.contains("singulars");
    if (has_t == has_s)
      fail("problem.forward", "diagonal_cosine needs exactly one of decay_t / singulars");
    if (has_s) {
      const std::vector<double> a = get_double_array(forward, "problem.forward", "singulars");
      if (static_cast<long>(a.size()) != dim)
        fail("problem.forward.singulars", "length must equal ambient_dim");
    }
  } else if (fkind == "dense_matrix") {
    check_keys(forward, "problem.forward", {"kind", "coeffs"}, {});
    const json& rows = forward.at("coeffs");
    if (!rows.is_array() || static_cast<long>(rows.size()) != dim)
      fail("problem.forward.coeffs", "expected ambient_dim rows");
    for (const json& row : rows)
      if (!row.is_array() || static_cast<long>(row.size()) != dim)
        fail("problem.forward.coeffs", "expected square numeric rows");
  } else {
    fail("problem.forward.kind", "expected diagonal_cosine or dense_matrix");
  }

  const json& design = problem.at("design");
  const std::string dkind = get_string(design, "problem.design", "kind");
  if (dkind == "uniform01") {
    check_keys(design, "problem.design", {"kind"}, {});
  } else if (dkind == "density01") {
    check_keys(design, "problem.design", {"kind", "poly_coeffs"}, {});
    get_double_array(design, "problem.design", "poly_coeffs");
  } else {
    fail("problem.design.kind", "expected uniform01 or density01");
  }

  const double delta = get_number(problem, "problem", "noise_delta");
  if (!(delta >= 0.0)) fail("problem.noise_delta", "must be >= 0");

  const json& subspaces = problem.at("subspaces");
  const std::string skind = get_string(subspaces, "problem.subspaces", "kind");
  if (skind == "coordinate") {
    check_keys(subspaces, "problem.subspaces", {"kind"}, {});
  } else if (skind == "rotated") {
    check_keys(subspaces, "problem.subspaces", {"kind", "rotation_seed"}, {});
    get_integer(subspaces, "problem.subspaces", "rotation_seed");
  } else {
    fail("problem.subspaces.kind", "expected coordinate or rotated");
  }

  if (problem.contains("normalize_kernel") && !problem.at("normalize_kernel").is_boolean())
    fail("problem.normalize_kernel", "expected a boolean");
}

void validate_ground_truth(const json& gt) {
  const std::string kind = get_string(gt, "ground_truth", "kind");
  if (kind == "polynomial_decay") {
    check_keys(gt, "ground_truth", {"kind", "s"}, {"margin"});
    if (!(get_number(gt, "ground_truth", "s") > 0.0)) fail("ground_truth.s", "must be > 0");
    if (!(get_number_or(gt, "ground_truth", "margin", 0.01) >= 0.0))
      fail("ground_truth.margin", "must be >= 0");
  } else if (kind == "sparse_in_v_m") {
    check_keys(gt, "ground_truth", {"kind", "m"}, {"s"});
    if (get_integer(gt, "ground_truth", "m") < 1) fail("ground_truth.m", "must be >= 1");
    if (!(get_number_or(gt, "ground_truth", "s", 1.0) > 0.0))
      fail("ground_truth.s", "must be > 0");
  } else {
    fail("ground_truth.kind", "expected polynomial_decay or sparse_in_v_m");
  }
}

SimulateParams parse_simulate(const json& params) {
  check_keys(params, "params", {"n", "m"}, {"truncation_r", "expect_max_error"});
  SimulateParams p;
  p.n = get_integer(params, "params", "n");
  if (p.n < 1) fail("params.n", "must be >= 1");
  p.m = static_cast<int>(get_integer(params, "params", "m"));
  if (p.m < 1) fail("params.m", "must be >= 1");
  if (params.contains("truncation_r")) {
    const double r = get_number(params, "params", "truncation_r");
    if (!(r >= 0.0)) fail("params.truncation_r", "must be >= 0");
    p.truncation_r = r;
  }
  if (params.contains("expect_max_error"))
    p.expect_max_error = get_number(params, "params", "expect_max_error");
  return p;
}

ConcentrationParams parse_concentration(const json& params) {
  check_keys(params, "params", {"n_values", "trials", "etas"},
             {"scaling_pairs", "scaling_band"});
  ConcentrationParams p;
  p.n_values = get_long_array(params, "params", "n_values");
  p.trials = static_cast<int>(get_integer(params, "params", "trials"));
  if (p.trials < 100) fail("params.trials", "must be >= 100");
  p.etas = get_double_array(params, "params", "etas");
  for (double eta : p.etas)
    if (!(eta > 0.0 && eta < 1.0)) fail("params.etas", "entries must lie in (0, 1)");
  if (params.contains("scaling_pairs")) {
    const json& pairs = params.at("scaling_pairs");
    if (!pairs.is_array()) fail("params.scaling_pairs", "expected an array of [n, 4n] pairs");
    for (const json& pr : pairs) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
          !pr[1].is_number_integer())
        fail("params.scaling_pairs", "expected [n_small, n_large] integer pairs");
      p.scaling_pairs.emplace_back(pr[0].get<long>(), pr[1].get<long>());
    }
  }
  if (params.contains("scaling_band")) {
    const std::vector<double> band = get_double_array(params, "params", "scaling_band");
    if (band.size() != 2 || !(band[0] < band[1]))
      fail("params.scaling_band", "expected [lo, hi] with lo < hi");
    p.band_lo = band[0];
    p.band_hi = band[1];
  }
  for (const auto& [lo, hi] : p.scaling_pairs) {
    bool found_lo = false, found_hi = false;
    for (long n : p.n_values) {
      found_lo = found_lo || n == lo;
      found_hi = found_hi || n == hi;
    }
    if (!found_lo || !found_hi)
      fail("params.scaling_pairs", "pair members must appear in n_values");
  }
  return p;
}

RatesParams parse_rates(const json& params) {
  check_keys(params, "params", {"grid_n", "trials", "t"},
             {"p", "d2", "r_multiplier", "slope_tolerance"});
  RatesParams p;
  p.grid_n = get_long_array(params, "params", "grid_n");
  if (p.grid_n.size() < 4) fail("params.grid_n", "needs at least 4 sample sizes");
  for (std::size_t i = 1; i < p.grid_n.size(); ++i)
    if (p.grid_n[i] <= p.grid_n[i - 1]) fail("params.grid_n", "must be strictly increasing");
  p.trials = static_cast<int>(get_integer(params, "params", "trials"));
  if (p.trials < 1) fail("params.trials", "must be >= 1");
  p.t = get_number(params, "params", "t");
  if (!(p.t > 0.0)) fail("params.t", "must be > 0");
  p.p = get_number_or(params, "params", "p", 2.0);
  if (!(p.p > 0.0)) fail("params.p", "must be > 0");
  if (params.contains("d2") && params.at("d2").is_string()) {
    if (params.at("d2").get<std::string>() != "auto")
      fail("params.d2", "expected a number or \"auto\"");
    p.d2_auto = true;
  } else {
    p.d2 = get_number_or(params, "params", "d2", 0.0);
    if (!(p.d2 >= 0.0)) fail("params.d2", "must be >= 0");
  }
  p.r_multiplier = get_number_or(params, "params", "r_multiplier", 1.0);
  if (!(p.r_multiplier > 0.0)) fail("params.r_multiplier", "must be > 0");
  p.slope_tolerance = get_number_or(params, "params", "slope_tolerance", 0.1);
  if (!(p.slope_tolerance > 0.0)) fail("params.slope_tolerance", "must be > 0");
  return p;
}

HighProbParams parse_highprob(const json& params) {
  check_keys(params, "params", {"grid_n", "eta", "trials", "t"},
             {"m", "stability_factor"});
  HighProbParams p;
  p.grid_n = get_long_array(params, "params", "grid_n");
  p.eta = get_number(params, "params", "eta");
  if (!(p.eta > 0.0 && p.eta < 1.0)) fail("params.eta", "must lie in (0, 1)");
  p.trials = static_cast<int>(get_integer(params, "params", "trials"));
  if (p.trials < 1) fail("params.trials", "must be >= 1");
  p.t = get_number(params, "params", "t");
  if (!(p.t > 0.0)) fail("params.t", "must be > 0");
  p.m = static_cast<int>(get_integer_or(params, "params", "m", 0));
  if (p.m < 0) fail("params.m", "must be >= 0 (0 selects the m rule)");
  p.stability_factor = get_number_or(params, "params", "stability_factor", 3.0);
  if (!(p.stability_factor > 1.0)) fail("params.stability_factor", "must be > 1");
  return p;
}

EventBoundsParams parse_event_bounds(const json& obj) {
  check_keys(obj, "params.event_bounds", {"n", "m", "trials"}, {"d2"});
  EventBoundsParams p;
  p.n = get_integer(obj, "params.event_bounds", "n");
  p.m = static_cast<int>(get_integer(obj, "params.event_bounds", "m"));
  p.trials = static_cast<int>(get_integer(obj, "params.event_bounds", "trials"));
  if (p.n < 1 || p.m < 1 || p.trials < 1)
    fail("params.event_bounds", "n, m and trials must be >= 1");
  p.d2 = get_number_or(obj, "params.event_bounds", "d2", 0.0);
  return p;
}

TruncationTailParams parse_truncation_tail(const json& obj) {
  check_keys(obj, "params.truncation_tail", {"n", "m", "trials"}, {"d2", "r_multiplier"});
  TruncationTailParams p;
  p.n = get_integer(obj, "params.truncation_tail", "n");
  p.m = static_cast<int>(get_integer(obj, "params.truncation_tail", "m"));
  p.trials = static_cast<int>(get_integer(obj, "params.truncation_tail", "trials"));
  if (p.n < 1 || p.m < 1 || p.trials < 1)
    fail("params.truncation_tail", "n, m and trials must be >= 1");
  p.d2 = get_number_or(obj, "params.truncation_tail", "d2", 0.0);
  p.r_multiplier = get_number_or(obj, "params.truncation_tail", "r_multiplier", 1.0);
  if (!(p.r_multiplier > 0.0)) fail("params.truncation_tail.r_multiplier", "must be > 0");
  return p;
}

DiagnoseParams parse_diagnose(const json& params) {
  check_keys(params, "params", {"m_max", "fit_range"},
             {"quadrature_check", "event_bounds", "truncation_tail"});
  DiagnoseParams p;
  p.m_max = static_cast<int>(get_integer(params, "params", "m_max"));
  if (p.m_max < 1) fail("params.m_max", "must be >= 1");
  const std::vector<long> range = get_long_array(params, "params", "fit_range");
  if (range.size() != 2 || range[0] < 1 || range[1] < range[0])
    fail("params.fit_range", "expected [lo, hi] with 1 <= lo <= hi");
  p.fit_lo = static_cast<int>(range[0]);
  p.fit_hi = static_cast<int>(range[1]);
  if (params.contains("quadrature_check")) {
    if (!params.at("quadrature_check").is_boolean())
      fail("params.quadrature_check", "expected a boolean");
    p.quadrature_check = params.at("quadrature_check").get<bool>();
  }
  if (params.contains("event_bounds"))
    p.event_bounds = parse_event_bounds(params.at("event_bounds"));
  if (params.contains("truncation_tail"))
    p.truncation_tail = parse_truncation_tail(params.at("truncation_tail"));
  return p;
}

MinimaxParams parse_minimax(const json& params) {
  check_keys(params, "params", {"sign_ks", "s", "t", "r", "epsilon", "d3"}, {});
  MinimaxParams p;
  for (long k : get_long_array(params, "params", "sign_ks")) {
    if (k < 28) fail("params.sign_ks", "entries must be >= 28");
    p.sign_ks.push_back(static_cast<int>(k));
  }
  p.s = get_number(params, "params", "s");
  p.t = get_number(params, "params", "t");
  p.r = get_number(params, "params", "r");
  p.epsilon = get_number(params, "params", "epsilon");
  p.d3 = get_number(params, "params", "d3");
  if (!(p.s > 0.0 && p.t > 0.0 && p.r > 0.0 && p.epsilon > 0.0 && p.d3 > 0.0))
    fail("params", "s, t, r, epsilon and d3 must be positive");
  return p;
}

const std::set<std::string> kExperiments = {"simulate",  "rates",    "concentration",
                                            "highprob",  "diagnose", "minimax-pack"};

}  // namespace

RunConfig parse_config_json(const json& doc) {
  check_keys(doc, "config", {"problem", "experiment", "params", "master_seed"},
             {"ground_truth", "workers", "output_dir"});

  RunConfig config;
  config.experiment = get_string(doc, "config", "experiment");
  if (!kExperiments.count(config.experiment))
    fail("config.experiment", "unknown experiment '" + config.experiment + "'");

  const json& seed = doc.at("master_seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && seed.get<long long>() < 0 &&
                                    !seed.is_number_unsigned()))
    fail("config.master_seed", "expected a nonnegative integer");
  config.master_seed = seed.get<std::uint64_t>();

  config.workers = static_cast<int>(get_integer_or(doc, "config", "workers", 1));
  if (config.workers < 1) fail("config.workers", "must be >= 1");
  config.output_dir = doc.contains("output_dir")
                          ? get_string(doc, "config", "output_dir")
                          : "runs/" + config.experiment;

  validate_problem(doc.at("problem"));
  config.problem_json = doc.at("problem");
  if (doc.contains("ground_truth")) {
    validate_ground_truth(doc.at("ground_truth"));
    config.ground_truth_json = doc.at("ground_truth");
  }

  const json& params = doc.at("params");
  if (config.experiment == "simulate")
    config.simulate = parse_simulate(params);
  else if (config.experiment == "concentration")
    config.concentration = parse_concentration(params);
  else if (config.experiment == "rates")
    config.rates = parse_rates(params);
  else if (config.experiment == "highprob")
    config.highprob = parse_highprob(params);
  else if (config.experiment == "diagnose")
    config.diagnose = parse_diagnose(params);
  else
    config.minimax = parse_minimax(params);

  const bool needs_ground_truth = config.experiment == "simulate" ||
                                  config.experiment == "rates" ||
                                  config.experiment == "highprob" ||
                                  (config.experiment == "diagnose" &&
                                   (config.diagnose.event_bounds.has_value() ||
                                    config.diagnose.truncation_tail.has_value()));
  if (needs_ground_truth && !config.ground_truth_json)
    fail("config.ground_truth", "required by experiment '" + config.experiment + "'");

  // Resolved view: input with defaults materialized.
  json resolved = doc;
  resolved["workers"] = config.workers;
  resolved["output_dir"] = config.output_dir;
  config.resolved = std::move(resolved);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config error in '" + path + "': " + e.what());
  }
  return parse_config_json(doc);
}

ProblemSpec build_problem_spec(const RunConfig& config) {
  const json& problem = config.problem_json;
  const int dim = static_cast<int>(problem.at("ambient_dim").get<long>());

  const json& fw = problem.at("forward");
  ForwardOperator forward;
  if (fw.at("kind").get<std::string>() == "diagonal_cosine") {
    if (fw.contains("singulars")) {
      Vector a(dim);
      const auto& arr = fw.at("singulars");
      for (int j = 0; j < dim; ++j) a(j) = arr.at(static_cast<std::size_t>(j)).get<double>();
      forward = ForwardOperator::diagonal(std::move(a));
    } else {
      forward = ForwardOperator::diagonal_decay(dim, fw.at("decay_t").get<double>());
    }
  } else {
    Matrix c(dim, dim);
    const auto& rows = fw.at("coeffs");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        c(i, j) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j))
                      .get<double>();
    forward = ForwardOperator::dense(std::move(c));
  }

  const json& de = problem.at("design");
  DesignMeasure design = de.at("kind").get<std::string>() == "uniform01"
                             ? DesignMeasure::uniform()
                             : DesignMeasure::polynomial_density(
                                   de.at("poly_coeffs").get<std::vector<double>>());

  const json& su = problem.at("subspaces");
  SubspaceFamily family =
      su.at("kind").get<std::string>() == "coordinate"
          ? SubspaceFamily::coordinate(dim)
          : SubspaceFamily::random_rotation(dim, su.at("rotation_seed").get<std::uint64_t>());

  const bool normalize = problem.contains("normalize_kernel")
                             ? problem.at("normalize_kernel").get<bool>()
                             : true;
  try {
    return ProblemSpec::make(dim, std::move(forward), std::move(design),
                             problem.at("noise_delta").get<double>(), std::move(family),
                             normalize);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config error at problem: ") + e.what());
  }
}

GroundTruth build_ground_truth(const RunConfig& config, const ProblemSpec& spec) {
  if (!config.ground_truth_json)
    throw ConfigError("config error at config.ground_truth: required but absent");
  const json& gt = *config.ground_truth_json;
  GroundTruthParams params;
  if (gt.at("kind").get<std::string>() == "polynomial_decay") {
    params.kind = GroundTruthKind::polynomial_decay;
    params.s = gt.at("s").get<double>();
    params.margin = gt.contains("margin") ? gt.at("margin").get<double>() : 0.01;
  } else {
    params.kind = GroundTruthKind::sparse_in_v_m;
    params.support_m = static_cast<int>(gt.at("m").get<long>());
    params.s = gt.contains("s") ? gt.at("s").get<double>() : 1.0;
  }
  try {
    return make_ground_truth(spec, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config error at ground_truth: ") + e.what());
  }
}

}
