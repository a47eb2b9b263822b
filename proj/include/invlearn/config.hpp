#pragma once

// Experiment configuration: a single JSON file with nested keys. Every key is
// validated before any computation starts and unknown keys are rejected; the
// exact grammar is documented in the repository README.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invlearn/problem.hpp"

#include "json.hpp"

namespace invlearn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateParams {
  long n = 1;
  int m = 1;
  std::optional<double> truncation_r;
  std::optional<double> expect_max_error;
};

struct ConcentrationParams {
  std::vector<long> n_values;
  int trials = 100;
  std::vector<double> etas;
  std::vector<std::pair<long, long>> scaling_pairs;  // (n, 4n): medians must scale ~2x
  double band_lo = 1.6;
  double band_hi = 2.4;
};

struct RatesParams {
  std::vector<long> grid_n;
  int trials = 1;
  double p = 2.0;
  double t = 1.0;
  double d2 = 0.0;
  bool d2_auto = false;  // "d2": "auto" takes the cross-term maximum over m <= M/2
  double r_multiplier = 1.0;
  double slope_tolerance = 0.1;
};

struct HighProbParams {
  std::vector<long> grid_n;
  int m = 0;  // 0: choose per N by the m rule
  double eta = 0.05;
  int trials = 1;
  double t = 1.0;
  double stability_factor = 3.0;
};

struct EventBoundsParams {
  long n = 1;
  int m = 1;
  int trials = 1;
  double d2 = 0.0;
};

struct TruncationTailParams {
  long n = 1;
  int m = 1;
  int trials = 1;
  double d2 = 0.0;
  double r_multiplier = 1.0;
};

struct DiagnoseParams {
  int m_max = 1;
  int fit_lo = 1;
  int fit_hi = 1;
  bool quadrature_check = false;
  std::optional<EventBoundsParams> event_bounds;
  std::optional<TruncationTailParams> truncation_tail;
};

struct MinimaxParams {
  std::vector<int> sign_ks;
  double s = 1.0;
  double t = 1.0;
  double r = 1.0;
  double epsilon = 0.0;
  double d3 = 1.0;
};

struct RunConfig {
  nlohmann::json resolved;  // fully defaulted config; stored in the manifest
  std::string experiment;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string output_dir;

  // Problem description (typed).
  nlohmann::json problem_json;
  std::optional<nlohmann::json> ground_truth_json;

  SimulateParams simulate;
  ConcentrationParams concentration;
  RatesParams rates;
  HighProbParams highprob;
  DiagnoseParams diagnose;
  MinimaxParams minimax;
};

/// Parses and validates a config file. Syntax errors carry the parser's
/// line/byte diagnostics; semantic errors name the offending key path.
RunConfig parse_config_file(const std::string& path);

/// Same validation applied to an already-parsed JSON document (used by
/// replay on the manifest's resolved config).
RunConfig parse_config_json(const nlohmann::json& doc);

/// Builds the immutable problem description from the validated config.
ProblemSpec build_problem_spec(const RunConfig& config);

/// Builds the configured ground truth; errors when the experiment needs one
/// and the config does not provide it.
GroundTruth build_ground_truth(const RunConfig& config, const ProblemSpec& spec);

}
