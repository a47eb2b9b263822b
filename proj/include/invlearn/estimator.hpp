#pragma once

// Projected minimum-norm least-squares estimation and the closed-form
// parameter rules. The estimator solves the empirical normal equations on
// V_m through the pseudoinverse, so rank-deficient designs resolve to the
// minimum-norm solution.

#include <optional>

#include "invlearn/numerics.hpp"
#include "invlearn/problem.hpp"
#include "invlearn/sampling.hpp"

#include "json.hpp"

namespace invlearn {

struct EstimatorConfig {
  int m = 1;
  double pinv_rel_tol = kDefaultRankTol;
  std::optional<double> truncation_R;  // absent: no norm cut-off
};

struct EstimateReport {
  Vector coeffs;                      // ambient coordinates, length M
  int rank_used = 0;                  // numerical rank of the empirical normal matrix
  double empirical_lambda_min = 0.0;  // smallest retained eigenvalue (diagnostic only)
  bool truncated = false;
  double residual_empirical_norm = 0.0;  // ||Z c - y||_N of the least-squares fit
};

/// N x m block with row n holding the first m entries of eval_row(x_n) in
/// family coordinates.
Matrix design_block(const ProblemSpec& spec, const Dataset& data, int m);

/// (1/N) Z^T Z; symmetric PSD by construction.
Matrix empirical_normal(const ProblemSpec& spec, const Dataset& data, int m);

EstimateReport ml_estimate(const ProblemSpec& spec, const Dataset& data,
                           const EstimatorConfig& cfg);

/// Norm cut-off: identity when ||coeffs|| <= R, zero estimator otherwise.
EstimateReport truncate(EstimateReport report, double R);

struct ChooseM {
  double raw = 0.0;  // real-valued rule before rounding
  int chosen = 1;    // rounded and clamped to [1, ambient_dim / 2]
  bool clamped = false;
};

/// m = (delta / (R0 sqrt(N)))^{-2/(2s+t+1)}, rounded to nearest and clamped.
/// Requires 2s - t + 1 > 0.
ChooseM choose_m(double delta, double r0, long n, double s, double t, int ambient_dim);

/// R = 2 sqrt(2) delta / lambda_m + (2 D2 + 6) R0. lambda_m is the population
/// quantity; the empirical one is reported by ml_estimate for diagnostics only.
double choose_R(double delta, double lambda_m, double r0, double d2);

/// Stable field names: coeffs, rank_used, empirical_lambda_min, truncated,
/// residual_empirical_norm.
nlohmann::json report_to_json(const EstimateReport& report);

}
