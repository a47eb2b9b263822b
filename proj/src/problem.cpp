#include "invlearn/problem.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "invlearn/sampling.hpp"

namespace invlearn {

namespace {

// Injectivity floor for diagonal singular values; exact zeros would change
// pseudoinverse ranks downstream.
constexpr double kMinSingular = 1e-14;

constexpr int kKernelGridSize = 1024;

void check_domain(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument(std::string(what) + ": point outside [0, 1]");
}

}  // namespace

ForwardOperator ForwardOperator::diagonal(Vector a) {
  if (a.size() < 1) throw std::invalid_argument("forward operator: empty singular list");
  if (!a.allFinite()) throw std::invalid_argument("forward operator: non-finite singular values");
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) < kMinSingular)
      throw std::invalid_argument("forward operator: singular values must be >= 1e-14");
    if (j > 0 && a(j) > a(j - 1))
      throw std::invalid_argument("forward operator: singular values must be nonincreasing");
  }
  ForwardOperator op;
  op.kind = OperatorKind::diagonal_cosine;
  op.singulars = std::move(a);
  const double norm = op.matrix_op_norm();
  if (norm > 1.0) op.scale(1.0 / norm);
  return op;
}

ForwardOperator ForwardOperator::diagonal_decay(int ambient_dim, double t) {
  if (ambient_dim < 1) throw std::invalid_argument("forward operator: dimension must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("forward operator: decay exponent must be >= 0");
  Vector a(ambient_dim);
  for (int j = 0; j < ambient_dim; ++j) a(j) = std::pow(j + 1.0, -0.5 * t);
  return diagonal(std::move(a));
}

ForwardOperator ForwardOperator::dense(Matrix c) {
  if (c.rows() != c.cols() || c.rows() < 1)
    throw std::invalid_argument("forward operator: dense coefficient matrix must be square");
  detail::require_finite(c, "forward operator");
  ForwardOperator op;
  op.kind = OperatorKind::dense_matrix;
  op.coeffs = std::move(c);
  const double norm = op.matrix_op_norm();
  if (norm < kMinSingular)
    throw std::invalid_argument("forward operator: dense matrix is numerically zero");
  if (norm > 1.0) op.scale(1.0 / norm);
  return op;
}

int ForwardOperator::dim() const {
  return kind == OperatorKind::diagonal_cosine ? static_cast<int>(singulars.size())
                                               : static_cast<int>(coeffs.rows());
}

double ForwardOperator::matrix_op_norm() const {
  if (kind == OperatorKind::diagonal_cosine) return singulars.maxCoeff();
  return op_norm(coeffs);
}

void ForwardOperator::scale(double factor) {
  if (kind == OperatorKind::diagonal_cosine)
    singulars *= factor;
  else
    coeffs *= factor;
}

DesignMeasure DesignMeasure::uniform() {
  DesignMeasure d;
  d.kind = DesignKind::uniform01;
  return d;
}

DesignMeasure DesignMeasure::polynomial_density(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("design measure: empty polynomial");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("design measure: non-finite coefficient");
  double integral = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) integral += coeffs[i] / (i + 1.0);
  if (!(integral > 0.0))
    throw std::invalid_argument("design measure: polynomial does not integrate to a positive mass");
  for (double& c : coeffs) c /= integral;

  DesignMeasure d;
  d.kind = DesignKind::density01;
  d.poly = std::move(coeffs);
  // Grid check of strict positivity; the densities in scope are low-degree
  // polynomials, a 4096-interval scan resolves their minima.
  double pmin = d.density(0.0);
  for (int i = 1; i <= 4096; ++i) pmin = std::min(pmin, d.density(i / 4096.0));
  if (!(pmin > 1e-9))
    throw std::invalid_argument("design measure: density not strictly positive on [0, 1]");
  return d;
}

double DesignMeasure::density(double x) const {
  if (kind == DesignKind::uniform01) return 1.0;
  double acc = 0.0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = acc * x + poly[i];
  return acc;
}

double DesignMeasure::cdf(double x) const {
  if (kind == DesignKind::uniform01) return x;
  double acc = 0.0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = (acc + poly[i] / (i + 1.0)) * x;
  return acc;
}

SubspaceFamily SubspaceFamily::coordinate(int ambient_dim) {
  if (ambient_dim < 1) throw std::invalid_argument("subspace family: dimension must be >= 1");
  SubspaceFamily f;
  f.kind = FamilyKind::coordinate;
  f.dimension = ambient_dim;
  return f;
}

SubspaceFamily SubspaceFamily::rotated(Matrix q) {
  if (q.rows() != q.cols() || q.rows() < 1)
    throw std::invalid_argument("subspace family: rotation must be square");
  detail::require_finite(q, "subspace family");
  const double defect = (q.transpose() * q - Matrix::Identity(q.rows(), q.cols()))
                            .cwiseAbs()
                            .maxCoeff();
  if (defect > 1e-10)
    throw std::invalid_argument("subspace family: rotation is not orthogonal");
  SubspaceFamily f;
  f.kind = FamilyKind::rotated;
  f.dimension = static_cast<int>(q.rows());
  f.rotation = std::move(q);
  return f;
}

SubspaceFamily SubspaceFamily::random_rotation(int ambient_dim, std::uint64_t seed) {
  RandomStream rs(seed);
  Matrix g(ambient_dim, ambient_dim);
  for (int i = 0; i < ambient_dim; ++i)
    for (int j = 0; j < ambient_dim; ++j) g(i, j) = rs.gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, ambient_dim);
  const Vector diag = qr.matrixQR().diagonal();
  // Fix column signs so the factorization (and hence the family) is unique.
  for (int j = 0; j < ambient_dim; ++j)
    if (diag(j) < 0.0) q.col(j) *= -1.0;
  return rotated(std::move(q));
}

Vector SubspaceFamily::to_family(const Vector& ambient) const {
  if (kind == FamilyKind::coordinate) return ambient;
  return rotation.transpose() * ambient;
}

Vector SubspaceFamily::to_ambient(const Vector& family) const {
  if (kind == FamilyKind::coordinate) return family;
  return rotation * family;
}

Matrix SubspaceFamily::operator_to_family(const Matrix& ambient_op) const {
  if (kind == FamilyKind::coordinate) return ambient_op;
  return rotation.transpose() * ambient_op * rotation;
}

ProblemSpec ProblemSpec::make(int ambient_dim, ForwardOperator forward, DesignMeasure design,
                              double noise_delta, SubspaceFamily subspaces,
                              bool normalize_kernel) {
  if (ambient_dim < 2) throw std::invalid_argument("problem: ambient dimension must be >= 2");
  if (forward.dim() != ambient_dim)
    throw std::invalid_argument("problem: forward operator dimension mismatch");
  if (subspaces.dim() != ambient_dim)
    throw std::invalid_argument("problem: subspace family dimension mismatch");
  if (!(noise_delta >= 0.0) || !std::isfinite(noise_delta))
    throw std::invalid_argument("problem: noise level must be finite and >= 0");

  ProblemSpec spec;
  spec.ambient_dim = ambient_dim;
  spec.forward = std::move(forward);
  spec.design = std::move(design);
  spec.noise_delta = noise_delta;
  spec.subspaces = std::move(subspaces);
  spec.kernel_normalized = false;

  if (normalize_kernel) {
    double sup = 0.0;
    for (int i = 0; i < kKernelGridSize; ++i) {
      const double x = static_cast<double>(i) / (kKernelGridSize - 1);
      sup = std::max(sup, eval_row(spec, x).squaredNorm());
    }
    if (!(sup > 0.0)) throw std::invalid_argument("problem: degenerate kernel");
    spec.forward.scale(1.0 / std::sqrt(sup));
    spec.kernel_normalized = true;
  }
  // The representing matrix must stay a contraction regardless of the kernel
  // normalization path taken.
  const double norm = spec.forward.matrix_op_norm();
  if (norm > 1.0 + 1e-12) spec.forward.scale(1.0 / norm);
  return spec;
}

Vector eval_row(const ProblemSpec& spec, double x) {
  check_domain(x, "eval_row");
  const int m = spec.ambient_dim;
  Vector row(m);
  if (spec.forward.kind == OperatorKind::diagonal_cosine) {
    for (int j = 0; j < m; ++j) row(j) = spec.forward.singulars(j) * cosine_feature(j, x);
  } else {
    Vector phi(m);
    for (int j = 0; j < m; ++j) phi(j) = cosine_feature(j, x);
    row = spec.forward.coeffs * phi;
  }
  return row;
}

Matrix eval_matrix(const ProblemSpec& spec, const std::vector<double>& points) {
  const int m = spec.ambient_dim;
  Matrix e(static_cast<Eigen::Index>(points.size()), m);
  for (std::size_t n = 0; n < points.size(); ++n) e.row(n) = eval_row(spec, points[n]).transpose();
  return e;
}

double kernel_eval(const ProblemSpec& spec, double x, double x2) {
  check_domain(x, "kernel_eval");
  check_domain(x2, "kernel_eval");
  return eval_row(spec, x).dot(eval_row(spec, x2));
}

Vector project(const SubspaceFamily& family, const Vector& v, int m) {
  if (v.size() != family.dim())
    throw std::invalid_argument("project: vector dimension mismatch");
  if (m < 0 || m > family.dim())
    throw std::invalid_argument("project: subspace dimension out of range");
  Vector fam = family.to_family(v);
  fam.tail(family.dim() - m).setZero();
  return family.to_ambient(fam);
}

SourceCheckResult source_check(const SubspaceFamily& family, const Vector& f, double s,
                               double R) {
  if (!(s > 0.0) || !(R > 0.0))
    throw std::invalid_argument("source_check: s and R must be positive");
  const int dim = family.dim();
  if (f.size() != dim) throw std::invalid_argument("source_check: vector dimension mismatch");
  const Vector fam = family.to_family(f);

  // Suffix sums accumulated from the tail keep the small terms exact.
  std::vector<double> tail_sq(dim + 1, 0.0);
  for (int j = dim - 1; j >= 0; --j) tail_sq[j] = tail_sq[j + 1] + fam(j) * fam(j);

  SourceCheckResult res;
  res.ok = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  res.worst_m = 0;
  for (int m = 0; m <= dim; ++m) {
    const double tail = std::sqrt(tail_sq[m]);
    const double budget = R * std::pow(m + 1.0, -s);
    const double margin = budget - tail;
    if (margin < res.worst_margin) {
      res.worst_margin = margin;
      res.worst_m = m;
    }
    if (tail > budget * (1.0 + 1e-12)) res.ok = false;
  }
  return res;
}

GroundTruth make_ground_truth(const ProblemSpec& spec, const GroundTruthParams& params) {
  const int dim = spec.ambient_dim;
  if (!(params.s > 0.0)) throw std::invalid_argument("ground truth: s must be positive");
  Vector fam = Vector::Zero(dim);
  switch (params.kind) {
    case GroundTruthKind::polynomial_decay: {
      if (!(params.margin >= 0.0))
        throw std::invalid_argument("ground truth: margin must be >= 0");
      for (int j = 0; j < dim; ++j)
        fam(j) = std::pow(j + 1.0, -(params.s + 0.5) - params.margin);
      break;
    }
    case GroundTruthKind::sparse_in_v_m: {
      if (params.support_m < 1 || params.support_m > dim)
        throw std::invalid_argument("ground truth: support dimension out of range");
      const double value = 1.0 / std::sqrt(static_cast<double>(params.support_m));
      for (int j = 0; j < params.support_m; ++j) fam(j) = value;
      break;
    }
  }

  GroundTruth gt;
  gt.coeffs = spec.subspaces.to_ambient(fam);
  gt.declared_s = params.s;

  // Brute-force tail maximization over every m.
  std::vector<double> tail_sq(dim + 1, 0.0);
  for (int j = dim - 1; j >= 0; --j) tail_sq[j] = tail_sq[j + 1] + fam(j) * fam(j);
  double r0 = 0.0;
  for (int m = 0; m <= dim; ++m)
    r0 = std::max(r0, std::pow(m + 1.0, params.s) * std::sqrt(tail_sq[m]));
  gt.declared_R0 = r0;

  const SourceCheckResult check =
      source_check(spec.subspaces, gt.coeffs, gt.declared_s, gt.declared_R0);
  if (!check.ok)
    throw std::runtime_error("ground truth: source check failed at m = " +
                             std::to_string(check.worst_m));
  return gt;
}

}
