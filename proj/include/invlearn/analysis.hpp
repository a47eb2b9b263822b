#pragma once

// Population-level objects and the statistically testable claims: assembly of
// the population normal operator, eigenvalue profiles, design-class
// certification, projected cross terms, the approximation/variance error
// split, operator concentration, high-probability bound checks, rate fits
// and truncation-event statistics.

#include <cstdint>
#include <vector>

#include "invlearn/estimator.hpp"
#include "invlearn/numerics.hpp"
#include "invlearn/problem.hpp"
#include "invlearn/sampling.hpp"

namespace invlearn {

enum class AssemblyMethod { automatic, analytic, quadrature };

struct PopulationOperator {
  Matrix matrix;  // M x M, ambient basis, symmetric PSD
  AssemblyMethod method = AssemblyMethod::analytic;
  int quadrature_nodes = 0;
};

/// Population normal operator. Closed form diag(a_j^2) for the uniform design
/// with a diagonal operator; composite Gauss-Legendre otherwise, gated by a
/// q-vs-2q node agreement check at 1e-8.
PopulationOperator assemble_b_nu(const ProblemSpec& spec,
                                 AssemblyMethod method = AssemblyMethod::automatic);

/// lambda_m for m = 1..m_max: smallest nonzero eigenvalue of the m x m
/// leading section in family coordinates. Entry [i] holds lambda_{i+1}.
std::vector<double> lambda_profile(const PopulationOperator& pop,
                                   const SubspaceFamily& family, int m_max);

struct ClassCertificate {
  double t_fit = 0.0;   // log-log least-squares decay exponent
  double d1_fit = 0.0;  // min over range of lambda_m m^{t_fit}
  double d3_fit = 0.0;  // max over range of lambda_m m^{t_fit}
  double d2_max = 0.0;  // max projected cross term over the range
  int m_lo = 1;
  int m_hi = 1;
};

/// Certifies the lower/upper eigenvalue envelopes and the cross-term bound
/// over m in [m_lo, m_hi] (must stay within [1, M/2]). Errors on a
/// non-monotone profile.
ClassCertificate certify_classes(const PopulationOperator& pop,
                                 const SubspaceFamily& family, int m_lo, int m_hi);

/// Operator norm of (P_m B P_m)^+ B restricted to the tail columns, in family
/// coordinates. The tail stops at the ambient truncation M, so the value is a
/// lower bound of its infinite-dimensional counterpart; m <= M/2 keeps the
/// tail block nonempty.
double cross_term(const PopulationOperator& pop, const SubspaceFamily& family, int m);

struct ErrorSplit {
  Vector approximation;  // ((P_m B_X P_m)^+ B_X - I) f_true
  Vector variance;       // delta (P_m B_X P_m)^+ (S_X A)^* eps
};

/// Splits the reconstruction error of the projected estimator. Requires a
/// synthetic dataset; the noise vector is replayed from the recorded seed.
ErrorSplit error_split(const ProblemSpec& spec, const Dataset& data,
                       const GroundTruth& f_true, int m);

struct ConcentrationRow {
  double eta = 0.0;
  double bound = 0.0;       // 6 log(2/eta) / sqrt(N)
  double exceedance = 0.0;  // fraction of trials with ||B_X - B_nu||_HS > bound
};

struct ConcentrationResult {
  long n = 0;
  int trials = 0;
  std::vector<ConcentrationRow> rows;
  double median_hs_dev = 0.0;
  std::vector<double> hs_devs;  // per trial, in trial order
};

ConcentrationResult concentration_experiment(const ProblemSpec& spec, long n, int trials,
                                             const std::vector<double>& etas,
                                             std::uint64_t master_seed, int workers = 1);

struct HighProbResult {
  long n = 0;
  int m = 0;
  double eta = 0.0;
  double lambda_m = 0.0;
  double quantile = 0.0;  // empirical (1 - eta)-quantile of ||f_mN - f_true||
  double bracket = 0.0;   // R0 m^{-s} + log(8/eta) delta (m^t/N + m^{(t+1)/2}/sqrt(N))
  double c_hat = 0.0;     // quantile / bracket
};

/// Checks the high-probability reconstruction bracket. Errors when eta
/// violates log(8/eta) <= sqrt(N) lambda_m / 12.
HighProbResult high_prob_bound_check(const ProblemSpec& spec, const GroundTruth& f_true,
                                     long n, int m, double eta, int trials, double t,
                                     std::uint64_t master_seed, int workers = 1);

struct RateFit {
  std::vector<long> grid_n;
  std::vector<double> mean_errors;  // L^p Monte Carlo mean per N
  std::vector<int> m_used;
  std::vector<double> r_used;
  std::vector<bool> p_condition_ok;  // p <= sqrt(N) lambda_m / 24 - 1/2 (warning only)
  double slope = 0.0;
  double slope_stderr = 0.0;
  double theory_slope = 0.0;  // -s / (2s + t + 1)
};

/// Monte Carlo convergence-rate experiment with m and R chosen per N by the
/// closed-form rules. Errors if the m-rule clamps at any grid point (the
/// ambient truncation is then too small for the configuration).
RateFit rate_experiment(const ProblemSpec& spec, const GroundTruth& f_true,
                        const std::vector<long>& grid_n, int trials, double p, double t,
                        double d2, double r_multiplier, std::uint64_t master_seed,
                        int workers = 1);

struct TruncationTailResult {
  long n = 0;
  int trials = 0;
  double r = 0.0;
  long in_event = 0;     // trials with ||B_X - B_nu||_HS <= lambda_m / 2
  long joint_count = 0;  // in-event trials whose estimator norm exceeds R
  double frequency = 0.0;
};

TruncationTailResult truncation_event_experiment(const ProblemSpec& spec,
                                                 const GroundTruth& f_true, long n, int m,
                                                 int trials, double r,
                                                 std::uint64_t master_seed, int workers = 1);

struct EventBoundsResult {
  int trials = 0;
  long in_event = 0;
  long inverse_bound_violations = 0;  // any of the four event-conditional operator bounds
  long approx_bound_violations = 0;   // ||I_1|| <= (2 D2 + 5) R0 m^{-s}
  // Largest observed value / bound ratios across in-event trials.
  double max_ratio_projection = 0.0;
  double max_ratio_pinv = 0.0;
  double max_ratio_population = 0.0;
  double max_ratio_tail = 0.0;
  double max_ratio_approx = 0.0;
};

/// Per-trial verification of the event-conditional operator inequalities and
/// the approximation-error bound on trials where the empirical normal
/// operator concentrates within lambda_m / 2.
EventBoundsResult event_bounds_experiment(const ProblemSpec& spec,
                                          const GroundTruth& f_true, long n, int m,
                                          double d2, int trials, std::uint64_t master_seed,
                                          int workers = 1);

}
