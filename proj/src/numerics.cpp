#include "invlearn/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace invlearn {

namespace detail {

void require_finite(const Matrix& a, const char* what) {
  if (a.size() == 0)
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  if (!a.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Matrix symmetrized_psd_input(const Matrix& a, const char* what) {
  require_finite(a, what);
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale)
    throw std::invalid_argument(std::string(what) + ": asymmetry " +
                                std::to_string(asym) + " beyond tolerance");
  return 0.5 * (a + a.transpose());
}

}  // namespace detail

namespace {

void check_rel_tol(double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("rel_tol must lie in (0, 1)");
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  detail::require_finite(a, "svd");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw std::runtime_error("svd: factorization did not converge");
  SvdFactors f{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  // Sign convention: largest-magnitude entry of each left singular vector is
  // nonnegative, so repeated runs produce identical factors.
  for (Eigen::Index c = 0; c < f.left.cols(); ++c) {
    Eigen::Index imax = 0;
    const Vector mags = f.left.col(c).cwiseAbs();
    mags.maxCoeff(&imax);
    if (f.left(imax, c) < 0.0) {
      f.left.col(c) *= -1.0;
      f.right.col(c) *= -1.0;
    }
  }
  return f;
}

Matrix pinv(const Matrix& a, double rel_tol) {
  check_rel_tol(rel_tol);
  const SvdFactors f = svd(a);
  const double smax = f.singulars.size() > 0 ? f.singulars(0) : 0.0;
  const double cutoff = rel_tol * smax;
  Vector inv = Vector::Zero(f.singulars.size());
  for (Eigen::Index i = 0; i < f.singulars.size(); ++i)
    if (f.singulars(i) > cutoff) inv(i) = 1.0 / f.singulars(i);
  return f.right * inv.asDiagonal() * f.left.transpose();
}

double lambda_min_nonzero(const Matrix& a, double rel_tol) {
  check_rel_tol(rel_tol);
  const Matrix s = detail::symmetrized_psd_input(a, "lambda_min_nonzero");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("lambda_min_nonzero: eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();  // ascending
  const double lmax = ev(ev.size() - 1);
  if (ev(0) < -kSymmetryTol * std::max(1.0, lmax))
    throw std::invalid_argument("lambda_min_nonzero: input is not positive semidefinite");
  const double cutoff = rel_tol * std::max(lmax, 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) return ev(i);
  throw std::runtime_error(
      "lambda_min_nonzero: zero operator (all eigenvalues at or below the rank cutoff)");
}

double hs_norm(const Matrix& a) {
  detail::require_finite(a, "hs_norm");
  return a.norm();
}

Matrix sqrt_psd(const Matrix& a) {
  const Matrix s = detail::symmetrized_psd_input(a, "sqrt_psd");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("sqrt_psd: eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (ev(0) < -kSymmetryTol * std::max(1.0, lmax))
    throw std::invalid_argument("sqrt_psd: input is not positive semidefinite");
  // Same rank cutoff as pinv: an eigenvalue at rounding level would otherwise
  // surface as its square root.
  const double cutoff = kDefaultRankTol * std::max(lmax, 0.0);
  Vector roots(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    roots(i) = ev(i) > cutoff ? std::sqrt(ev(i)) : 0.0;
  const Matrix root =
      eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (root + root.transpose());
}

double op_norm(const Matrix& a) {
  detail::require_finite(a, "op_norm");
  Eigen::JacobiSVD<Matrix> dec(a);
  return dec.singularValues()(0);
}

}
