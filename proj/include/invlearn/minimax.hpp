#pragma once

// Constructive lower-bound machinery: verified random sign-vector packings,
// the induced function families on the tail coordinates, KL divergences
// between the induced Gaussian regression models and the sample-size
// threshold keeping the averaged KL budget below the Fano-type limit.

#include <cstdint>
#include <vector>

#include "invlearn/numerics.hpp"
#include "invlearn/problem.hpp"

namespace invlearn {

struct SignPacking {
  int k = 0;
  std::vector<std::vector<std::int8_t>> vectors;  // entries in {-1, +1}
  long min_squared_distance = 0;                  // exhaustively re-verified
  long attempts = 0;                              // candidate draws consumed

  int cardinality() const { return static_cast<int>(vectors.size()); }
};

/// Randomized packing search: uniform sign vectors are kept when their
/// squared distance to every kept vector is at least k, until
/// ceil(exp(k/36)) + 1 vectors are found. The output is re-verified by an
/// exhaustive pairwise scan; the retry budget is one million draws.
SignPacking build_sign_packing(int k, std::uint64_t seed);

struct Packing {
  double epsilon = 0.0;
  double s = 0.0;
  double r = 0.0;
  int k = 0;                      // tail block size; support on coordinates k+1..2k
  std::vector<Vector> functions;  // ambient coefficients
  Matrix kl_matrix;               // K x K, symmetric, zero diagonal
  double min_pair_distance = 0.0;

  int cardinality() const { return static_cast<int>(functions.size()); }
};

/// Builds the function family f_i = (epsilon / sqrt(k)) sum of signed family
/// basis vectors on coordinates k+1..2k with k = floor((R/epsilon)^{1/s} / 2).
/// Requires epsilon <= 56^{-s} R and 2k <= M; every member is re-checked
/// against the source class and the pairwise separation, and the KL matrix is
/// filled through both the PSD-root route and the quadratic form.
Packing build_function_packing(const ProblemSpec& spec, double s, double r, double epsilon,
                               std::uint64_t seed);

/// KL divergence between the Gaussian regression models induced by two
/// solutions: ||B_nu^{1/2} (f1 - f2)||^2 / (2 delta^2). Errors when the noise
/// level is zero.
double kl_divergence(const ProblemSpec& spec, const Vector& f1, const Vector& f2);

struct PackingReport {
  double separation_margin = 0.0;  // min pairwise distance - epsilon
  bool source_ok = false;
  double source_margin = 0.0;  // worst source-check slack across members
  double kl_max = 0.0;
  double kl_bound = 0.0;  // 2^{t+1} D3 R^2 delta^{-2} (epsilon/R)^{2 + t/s}
  double kl_margin = 0.0;
  double cardinality_lhs = 0.0;  // log(K - 1)
  double cardinality_rhs = 0.0;  // (1/72) (R/epsilon)^{1/s}
  double cardinality_margin = 0.0;

  bool all_ok() const {
    return source_ok && separation_margin >= -1e-12 && kl_margin >= 0.0 &&
           cardinality_margin >= 0.0;
  }
};

/// Numeric verification of the packing conditions: separation and source
/// membership, the KL upper bound with the explicit constant 2^{t+1} D3, and
/// the log-cardinality lower bound with constant 1/72. Failures are reported,
/// not thrown.
PackingReport verify_packing(const ProblemSpec& spec, const Packing& packing, double t,
                             double d3);

/// Sample-size threshold N(epsilon) = floor(1 / (8 C_t R^2 delta^{-2}
/// (epsilon/R)^{2 + t/s})) with C_t = 2^{t+1} D3. Errors when the formula
/// yields zero.
long fano_threshold(double s, double t, double r, double delta, double epsilon, double d3);

/// (1/8) log(K - 1) - N * max pairwise KL; nonnegative when the averaged KL
/// budget holds at sample size n.
double fano_budget_margin(const Packing& packing, long n);

}
