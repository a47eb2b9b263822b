#pragma once

// Dense linear-algebra kernel shared by the higher-level modules: SVD-backed
// pseudoinverse, smallest nonzero eigenvalue, operator and Hilbert-Schmidt
// norms, and the symmetric PSD square root.
//
// All functions are pure and safe to call concurrently.

#include <Eigen/Dense>

namespace invlearn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative rank cutoff: singular values sigma <= rel_tol * sigma_max are
/// treated as exactly zero.
inline constexpr double kDefaultRankTol = 1e-12;

/// Asymmetry accepted for inputs required to be symmetric PSD, relative to
/// the largest entry magnitude. Inputs within tolerance are symmetrized as
/// (A + A^T)/2 before factorization.
inline constexpr double kSymmetryTol = 1e-10;

struct SvdFactors {
  Matrix left;       ///< orthonormal columns
  Vector singulars;  ///< nonincreasing, nonnegative
  Matrix right;      ///< orthonormal columns; input = left * diag(singulars) * right^T
};

/// Thin SVD with a deterministic sign convention: the largest-magnitude entry
/// of each left singular vector is nonnegative.
SvdFactors svd(const Matrix& a);

/// Moore-Penrose pseudoinverse with singular values at or below
/// rel_tol * sigma_max zeroed out.
Matrix pinv(const Matrix& a, double rel_tol = kDefaultRankTol);

/// Smallest eigenvalue strictly above rel_tol * lambda_max of a symmetric PSD
/// matrix. Throws if every eigenvalue sits at or below the cutoff.
double lambda_min_nonzero(const Matrix& a, double rel_tol = kDefaultRankTol);

/// Frobenius norm.
double hs_norm(const Matrix& a);

/// Symmetric PSD square root S with S * S = a.
Matrix sqrt_psd(const Matrix& a);

/// Largest singular value.
double op_norm(const Matrix& a);

namespace detail {
void require_finite(const Matrix& a, const char* what);
Matrix symmetrized_psd_input(const Matrix& a, const char* what);
}

}
