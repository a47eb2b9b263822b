#pragma once

// Finite ambient model on the domain [0, 1]: cosine feature system, forward
// operator with pointwise evaluation, design measures, nested subspace
// families and source-class ground truths.
//
// Conventions. The solution space is represented by coefficient vectors of
// length M (the ambient truncation). Basis index j = 0..M-1 corresponds to
// the feature phi_j with phi_0(x) = 1 and phi_j(x) = sqrt(2) cos(pi j x) for
// j >= 1; the features are orthonormal under the uniform design measure.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "invlearn/numerics.hpp"

namespace invlearn {

inline double cosine_feature(int j, double x) {
  return j == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(std::numbers::pi * j * x);
}

enum class OperatorKind { diagonal_cosine, dense_matrix };

/// Forward operator expressed in the fixed cosine feature system. For the
/// diagonal kind the image of basis vector j is singulars[j] * phi_j; for the
/// dense kind row j of `coeffs` holds the phi-coefficients of the image of
/// basis vector j. The representing matrix is rescaled at construction so its
/// operator norm is at most 1.
struct ForwardOperator {
  OperatorKind kind = OperatorKind::diagonal_cosine;
  Vector singulars;  // diagonal kind; positive, nonincreasing
  Matrix coeffs;     // dense kind, M x M

  static ForwardOperator diagonal(Vector a);
  /// a_j = j^{-t/2} (1-based j), so the induced population operator under the
  /// uniform design has eigenvalues j^{-t}.
  static ForwardOperator diagonal_decay(int ambient_dim, double t);
  static ForwardOperator dense(Matrix c);

  int dim() const;
  double matrix_op_norm() const;
  void scale(double factor);
};

enum class DesignKind { uniform01, density01 };

/// Design measure on [0, 1]: uniform, or a strictly positive polynomial
/// density normalized to integrate to one.
struct DesignMeasure {
  DesignKind kind = DesignKind::uniform01;
  std::vector<double> poly;  // density01: p(x) = sum_i poly[i] x^i, normalized

  static DesignMeasure uniform();
  static DesignMeasure polynomial_density(std::vector<double> coeffs);

  double density(double x) const;
  /// Exact polynomial antiderivative evaluated at x; cdf(1) = 1.
  double cdf(double x) const;
};

enum class FamilyKind { coordinate, rotated };

/// Nested admissible subspaces: V_m is the span of the first m (possibly
/// rotated) basis columns, so V_m is contained in V_{m+1} by construction.
struct SubspaceFamily {
  FamilyKind kind = FamilyKind::coordinate;
  int dimension = 0;
  Matrix rotation;  // rotated kind: M x M orthogonal, columns are the family basis

  static SubspaceFamily coordinate(int ambient_dim);
  static SubspaceFamily rotated(Matrix q);
  static SubspaceFamily random_rotation(int ambient_dim, std::uint64_t seed);

  int dim() const { return dimension; }
  Vector to_family(const Vector& ambient) const;
  Vector to_ambient(const Vector& family) const;
  Matrix operator_to_family(const Matrix& ambient_op) const;
};

/// Immutable problem description; shareable across workers.
struct ProblemSpec {
  int ambient_dim = 0;
  ForwardOperator forward;
  DesignMeasure design;
  double noise_delta = 0.0;
  SubspaceFamily subspaces;
  bool kernel_normalized = false;

  /// Validates dimensions and, when normalize_kernel is set, rescales the
  /// operator so the sup of kernel_eval(x, x) over a fixed 1024-point grid
  /// equals one.
  static ProblemSpec make(int ambient_dim, ForwardOperator forward, DesignMeasure design,
                          double noise_delta, SubspaceFamily subspaces,
                          bool normalize_kernel = true);
};

/// Row of point evaluations ((Ae_0)(x), ..., (Ae_{M-1})(x)) in the ambient basis.
Vector eval_row(const ProblemSpec& spec, double x);

/// Stacked eval_row for a batch of points; one row per point.
Matrix eval_matrix(const ProblemSpec& spec, const std::vector<double>& points);

/// Truncated kernel k(x, x') = sum_j (Ae_j)(x) (Ae_j)(x').
double kernel_eval(const ProblemSpec& spec, double x, double x2);

/// Orthogonal projection onto V_m; m = 0 returns the zero vector.
Vector project(const SubspaceFamily& family, const Vector& v, int m);

struct SourceCheckResult {
  bool ok = false;
  double worst_margin = 0.0;  // min over m of R (m+1)^{-s} - ||(I - P_m) f||
  int worst_m = 0;
};

/// Checks ||(I - P_m) f|| <= R (m+1)^{-s} for every m = 0..M. The boolean
/// allows a 1e-12 relative slack so brute-force-derived R values pass at
/// their own argmax; the reported margin is raw.
SourceCheckResult source_check(const SubspaceFamily& family, const Vector& f, double s,
                               double R);

struct GroundTruth {
  Vector coeffs;  // ambient coordinates
  double declared_s = 0.0;
  double declared_R0 = 0.0;
};

enum class GroundTruthKind { polynomial_decay, sparse_in_v_m };

struct GroundTruthParams {
  GroundTruthKind kind = GroundTruthKind::polynomial_decay;
  double s = 1.0;
  double margin = 0.01;  // polynomial_decay: extra tail decay exponent
  int support_m = 1;     // sparse_in_v_m: support dimension
};

/// Builds a ground truth in family coordinates and certifies it: declared_R0
/// is the brute-force maximum of (m+1)^s ||(I - P_m) f|| over m = 0..M.
GroundTruth make_ground_truth(const ProblemSpec& spec, const GroundTruthParams& params);

}
