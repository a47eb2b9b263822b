#include "invlearn/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace invlearn {

Matrix design_block(const ProblemSpec& spec, const Dataset& data, int m) {
  if (m < 1 || m > spec.ambient_dim)
    throw std::invalid_argument("design_block: m out of range");
  const long n = data.n();
  Matrix z(n, m);
  if (spec.subspaces.kind == FamilyKind::coordinate &&
      spec.forward.kind == OperatorKind::diagonal_cosine) {
    // Only the first m features are needed.
    for (long i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        z(i, j) = spec.forward.singulars(j) * cosine_feature(j, data.points[i]);
    return z;
  }
  const Matrix e = eval_matrix(spec, data.points);
  if (spec.subspaces.kind == FamilyKind::coordinate) return e.leftCols(m);
  return e * spec.subspaces.rotation.leftCols(m);
}

Matrix empirical_normal(const ProblemSpec& spec, const Dataset& data, int m) {
  const Matrix z = design_block(spec, data, m);
  Matrix g = Matrix::Zero(m, m);
  g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / data.n());
  return g.selfadjointView<Eigen::Lower>();
}

EstimateReport ml_estimate(const ProblemSpec& spec, const Dataset& data,
                           const EstimatorConfig& cfg) {
  if (cfg.m < 1 || cfg.m > spec.ambient_dim)
    throw std::invalid_argument("ml_estimate: m out of range");
  if (cfg.truncation_R && !(*cfg.truncation_R >= 0.0))
    throw std::invalid_argument("ml_estimate: truncation radius must be >= 0");
  const long n = data.n();
  const int m = cfg.m;

  const Matrix z = design_block(spec, data, m);
  Matrix g = Matrix::Zero(m, m);
  g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / n);
  g = Matrix(g.selfadjointView<Eigen::Lower>());

  const Eigen::Map<const Vector> y(data.observations.data(),
                                   static_cast<Eigen::Index>(data.observations.size()));
  const Vector b = z.transpose() * y / static_cast<double>(n);

  const SvdFactors f = svd(g);
  const double smax = f.singulars.size() > 0 ? f.singulars(0) : 0.0;
  const double cutoff = cfg.pinv_rel_tol * smax;
  int rank = 0;
  double lmin = 0.0;
  Vector inv = Vector::Zero(f.singulars.size());
  for (Eigen::Index i = 0; i < f.singulars.size(); ++i) {
    if (f.singulars(i) > cutoff) {
      inv(i) = 1.0 / f.singulars(i);
      lmin = f.singulars(i);  // nonincreasing order: last retained is smallest
      ++rank;
    }
  }
  const Vector c = f.right * (inv.asDiagonal() * (f.left.transpose() * b));

  EstimateReport report;
  report.rank_used = rank;
  report.empirical_lambda_min = lmin;
  report.residual_empirical_norm =
      std::sqrt((z * c - y).squaredNorm() / static_cast<double>(n));
  Vector fam = Vector::Zero(spec.ambient_dim);
  fam.head(m) = c;
  report.coeffs = spec.subspaces.to_ambient(fam);
  report.truncated = false;

  if (cfg.truncation_R) report = truncate(std::move(report), *cfg.truncation_R);
  return report;
}

EstimateReport truncate(EstimateReport report, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("truncate: R must be >= 0");
  if (report.coeffs.norm() <= R) return report;
  report.coeffs.setZero();
  report.truncated = true;
  return report;
}

ChooseM choose_m(double delta, double r0, long n, double s, double t, int ambient_dim) {
  if (!(delta > 0.0) || !(r0 > 0.0) || n < 1 || !(s > 0.0) || !(t > 0.0))
    throw std::invalid_argument("choose_m: all parameters must be positive");
  if (!(2.0 * s - t + 1.0 > 0.0))
    throw std::invalid_argument("choose_m: rate hypothesis 2s - t + 1 > 0 violated");
  ChooseM choice;
  const double base = delta / (r0 * std::sqrt(static_cast<double>(n)));
  choice.raw = std::pow(base, -2.0 / (2.0 * s + t + 1.0));
  const long rounded = std::lround(choice.raw);
  const long hi = std::max(1, ambient_dim / 2);
  const long clamped = std::min(hi, std::max(1L, rounded));
  choice.chosen = static_cast<int>(clamped);
  choice.clamped = clamped != rounded;
  return choice;
}

double choose_R(double delta, double lambda_m, double r0, double d2) {
  if (!(lambda_m > 0.0)) throw std::invalid_argument("choose_R: lambda_m must be positive");
  if (!(delta >= 0.0) || !(r0 >= 0.0) || !(d2 >= 0.0))
    throw std::invalid_argument("choose_R: parameters must be nonnegative");
  return 2.0 * std::sqrt(2.0) * delta / lambda_m + (2.0 * d2 + 6.0) * r0;
}

nlohmann::json report_to_json(const EstimateReport& report) {
  nlohmann::json j;
  j["coeffs"] = std::vector<double>(report.coeffs.data(),
                                    report.coeffs.data() + report.coeffs.size());
  j["rank_used"] = report.rank_used;
  j["empirical_lambda_min"] = report.empirical_lambda_min;
  j["truncated"] = report.truncated;
  j["residual_empirical_norm"] = report.residual_empirical_norm;
  return j;
}

}
