#include "invlearn/minimax.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "invlearn/analysis.hpp"
#include "invlearn/sampling.hpp"

namespace invlearn {

namespace {

constexpr long kRetryBudget = 1000000;

long squared_distance(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
  long acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long d = static_cast<long>(a[i]) - static_cast<long>(b[i]);
    acc += d * d;
  }
  return acc;
}

// floor with a tiny relative nudge; values that are integers up to double
// rounding must not drop to the integer below.
double floor_with_slack(double v) { return std::floor(v + std::abs(v) * 1e-12 + 1e-12); }

}  // namespace

SignPacking build_sign_packing(int k, std::uint64_t seed) {
  if (k < 28) throw std::invalid_argument("build_sign_packing: k must be >= 28");
  const long target =
      static_cast<long>(std::ceil(std::exp(static_cast<double>(k) / 36.0))) + 1;

  SignPacking packing;
  packing.k = k;
  RandomStream rs(seed);
  std::vector<std::int8_t> candidate(static_cast<std::size_t>(k));
  while (packing.cardinality() < target) {
    if (packing.attempts >= kRetryBudget)
      throw std::runtime_error("build_sign_packing: retry budget exhausted after " +
                               std::to_string(packing.attempts) + " draws, kept " +
                               std::to_string(packing.cardinality()) + " of " +
                               std::to_string(target));
    ++packing.attempts;
    for (int i = 0; i < k; ++i) candidate[static_cast<std::size_t>(i)] =
        rs.uniform01() < 0.5 ? static_cast<std::int8_t>(-1) : static_cast<std::int8_t>(1);
    bool ok = true;
    for (const auto& kept : packing.vectors) {
      if (squared_distance(candidate, kept) < k) {
        ok = false;
        break;
      }
    }
    if (ok) packing.vectors.push_back(candidate);
  }

  // The construction is verified, not trusted.
  long min_sq = std::numeric_limits<long>::max();
  for (std::size_t i = 0; i < packing.vectors.size(); ++i)
    for (std::size_t j = i + 1; j < packing.vectors.size(); ++j)
      min_sq = std::min(min_sq, squared_distance(packing.vectors[i], packing.vectors[j]));
  packing.min_squared_distance = min_sq;
  if (packing.cardinality() <= 3 || min_sq < k ||
      !(std::log(static_cast<double>(packing.cardinality() - 1)) > k / 36.0))
    throw std::runtime_error("build_sign_packing: verification failed");
  return packing;
}

Packing build_function_packing(const ProblemSpec& spec, double s, double r, double epsilon,
                               std::uint64_t seed) {
  if (!(s > 0.0) || !(r > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("build_function_packing: parameters must be positive");
  if (epsilon > std::pow(56.0, -s) * r * (1.0 + 1e-12))
    throw std::invalid_argument(
        "build_function_packing: epsilon must not exceed 56^{-s} R");
  if (!(spec.noise_delta > 0.0))
    throw std::invalid_argument(
        "build_function_packing: KL divergences need a positive noise level");

  const double ratio = std::pow(r / epsilon, 1.0 / s);
  const int k = static_cast<int>(floor_with_slack(0.5 * ratio));
  if (2 * k > spec.ambient_dim)
    throw std::invalid_argument("build_function_packing: ambient dimension too small for 2k = " +
                                std::to_string(2 * k));

  const SignPacking signs = build_sign_packing(k, mix64(seed + 0x5161));
  const int cardinality = signs.cardinality();
  if (cardinality < 2)
    throw std::runtime_error("build_function_packing: packing needs at least two members");

  Packing packing;
  packing.epsilon = epsilon;
  packing.s = s;
  packing.r = r;
  packing.k = k;
  const double amplitude = epsilon / std::sqrt(static_cast<double>(k));
  for (int i = 0; i < cardinality; ++i) {
    Vector fam = Vector::Zero(spec.ambient_dim);
    for (int l = 0; l < k; ++l)
      fam(k + l) = amplitude * signs.vectors[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(l)];
    packing.functions.push_back(spec.subspaces.to_ambient(fam));
  }

  // Membership and separation are re-verified on every build.
  for (int i = 0; i < cardinality; ++i) {
    const SourceCheckResult check =
        source_check(spec.subspaces, packing.functions[static_cast<std::size_t>(i)], s, r);
    if (!check.ok)
      throw std::runtime_error("build_function_packing: member " + std::to_string(i) +
                               " fails the source check at m = " +
                               std::to_string(check.worst_m));
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cardinality; ++i)
    for (int j = i + 1; j < cardinality; ++j)
      min_dist = std::min(min_dist, (packing.functions[static_cast<std::size_t>(i)] -
                                     packing.functions[static_cast<std::size_t>(j)])
                                        .norm());
  packing.min_pair_distance = min_dist;
  if (!(min_dist >= epsilon * (1.0 - 1e-12)))
    throw std::runtime_error("build_function_packing: separation below epsilon");

  // KL divergences through both routes; they must agree to 1e-10.
  const PopulationOperator pop = assemble_b_nu(spec);
  const Matrix root = sqrt_psd(pop.matrix);
  const double inv_two_delta_sq = 1.0 / (2.0 * spec.noise_delta * spec.noise_delta);
  packing.kl_matrix = Matrix::Zero(cardinality, cardinality);
  for (int i = 0; i < cardinality; ++i) {
    for (int j = i + 1; j < cardinality; ++j) {
      const Vector d = packing.functions[static_cast<std::size_t>(i)] -
                       packing.functions[static_cast<std::size_t>(j)];
      const double quad = inv_two_delta_sq * d.dot(pop.matrix * d);
      const double via_root = inv_two_delta_sq * (root * d).squaredNorm();
      if (std::abs(quad - via_root) > 1e-10)
        throw std::runtime_error("build_function_packing: KL route disagreement");
      packing.kl_matrix(i, j) = quad;
      packing.kl_matrix(j, i) = quad;
    }
  }
  return packing;
}

double kl_divergence(const ProblemSpec& spec, const Vector& f1, const Vector& f2) {
  if (!(spec.noise_delta > 0.0))
    throw std::invalid_argument("kl_divergence: undefined for zero noise level");
  if (f1.size() != spec.ambient_dim || f2.size() != spec.ambient_dim)
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  const PopulationOperator pop = assemble_b_nu(spec);
  const Vector d = f1 - f2;
  const double inv_two_delta_sq = 1.0 / (2.0 * spec.noise_delta * spec.noise_delta);
  const double quad = inv_two_delta_sq * d.dot(pop.matrix * d);
  const double via_root = inv_two_delta_sq * (sqrt_psd(pop.matrix) * d).squaredNorm();
  if (std::abs(quad - via_root) > 1e-10)
    throw std::runtime_error("kl_divergence: route disagreement beyond 1e-10");
  return quad;
}

PackingReport verify_packing(const ProblemSpec& spec, const Packing& packing, double t,
                             double d3) {
  PackingReport report;
  report.separation_margin = packing.min_pair_distance - packing.epsilon;

  report.source_ok = true;
  report.source_margin = std::numeric_limits<double>::infinity();
  for (const Vector& f : packing.functions) {
    const SourceCheckResult check =
        source_check(spec.subspaces, f, packing.s, packing.r);
    report.source_ok = report.source_ok && check.ok;
    report.source_margin = std::min(report.source_margin, check.worst_margin);
  }

  report.kl_max = packing.kl_matrix.maxCoeff();
  const double c_t = std::pow(2.0, t + 1.0) * d3;
  report.kl_bound = c_t * packing.r * packing.r /
                    (spec.noise_delta * spec.noise_delta) *
                    std::pow(packing.epsilon / packing.r, 2.0 + t / packing.s);
  report.kl_margin = report.kl_bound - report.kl_max;

  report.cardinality_lhs = std::log(static_cast<double>(packing.cardinality() - 1));
  report.cardinality_rhs =
      std::pow(packing.r / packing.epsilon, 1.0 / packing.s) / 72.0;
  report.cardinality_margin = report.cardinality_lhs - report.cardinality_rhs;
  return report;
}

long fano_threshold(double s, double t, double r, double delta, double epsilon, double d3) {
  if (!(s > 0.0) || !(t > 0.0) || !(r > 0.0) || !(delta > 0.0) || !(epsilon > 0.0) ||
      !(d3 > 0.0))
    throw std::invalid_argument("fano_threshold: parameters must be positive");
  const double c_t = std::pow(2.0, t + 1.0) * d3;
  const double value = delta * delta * std::pow(r / epsilon, 2.0 + t / s) /
                       (8.0 * c_t * r * r);
  const long n = static_cast<long>(floor_with_slack(value));
  if (n < 1) throw std::runtime_error("fano_threshold: parameters yield a zero threshold");
  return n;
}

double fano_budget_margin(const Packing& packing, long n) {
  const double lhs = std::log(static_cast<double>(packing.cardinality() - 1)) / 8.0;
  return lhs - static_cast<double>(n) * packing.kl_matrix.maxCoeff();
}

}
