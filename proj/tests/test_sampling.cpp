#include "doctest.h"

#include <cmath>
#include <sstream>

#include "invlearn/problem.hpp"
#include "invlearn/sampling.hpp"

#include "oracles.hpp"

using invlearn::Dataset;
using invlearn::DesignMeasure;
using invlearn::ForwardOperator;
using invlearn::ProblemSpec;
using invlearn::SeedPlan;
using invlearn::SubspaceFamily;
using invlearn::Vector;

namespace {

ProblemSpec small_spec(double delta) {
  const int dim = 8;
  Vector a(dim);
  for (int j = 0; j < dim; ++j) a(j) = std::pow(j + 1.0, -0.5);
  return ProblemSpec::make(dim, ForwardOperator::diagonal(a), DesignMeasure::uniform(),
                           delta, SubspaceFamily::coordinate(dim), false);
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("uniform design mean sits in the CLT band") {
  const auto points = invlearn::draw_design(DesignMeasure::uniform(), 100000, {42, 0});
  double mean = 0.0;
  for (double x : points) mean += x;
  mean /= static_cast<double>(points.size());
  CHECK(mean >= 0.497);
  CHECK(mean <= 0.503);
}

TEST_CASE("polynomial density mean matches the quadrature oracle") {
  const DesignMeasure d = DesignMeasure::polynomial_density({1.0, 1.0});
  const long n = 100000;
  const auto points = invlearn::draw_design(d, n, {43, 0});
  double mean = 0.0;
  for (double x : points) mean += x;
  mean /= static_cast<double>(n);
  double expected_mean = 0.0, variance = 0.0;
  oracle::density_moments(d.poly, expected_mean, variance);
  CHECK(expected_mean == doctest::Approx(5.0 / 9.0).epsilon(1e-8));
  const double five_sigma = 5.0 * std::sqrt(variance / static_cast<double>(n));
  CHECK(std::abs(mean - expected_mean) <= five_sigma);
}

TEST_CASE("single draws replay bit-identically") {
  const DesignMeasure d = DesignMeasure::polynomial_density({1.0, 2.0, 1.0});
  const auto a = invlearn::draw_design(d, 1, {7, 3});
  const auto b = invlearn::draw_design(d, 1, {7, 3});
  REQUIRE(a.size() == 1);
  CHECK(a[0] == b[0]);
  CHECK(a[0] >= 0.0);
  CHECK(a[0] <= 1.0);
}

TEST_CASE("noise-free synthesis evaluates exactly") {
  const ProblemSpec spec = small_spec(0.0);
  invlearn::GroundTruthParams params;
  params.kind = invlearn::GroundTruthKind::sparse_in_v_m;
  params.support_m = 3;
  const auto gt = invlearn::make_ground_truth(spec, params);
  const Dataset data = invlearn::synthesize(spec, gt, 50, {11, 0});
  for (long i = 0; i < data.n(); ++i)
    CHECK(data.observations[static_cast<std::size_t>(i)] ==
          invlearn::eval_row(spec, data.points[static_cast<std::size_t>(i)]).dot(gt.coeffs));
}

TEST_CASE("unit noise around a zero signal has unit sample variance") {
  ProblemSpec spec = small_spec(1.0);
  invlearn::GroundTruth zero;
  zero.coeffs = Vector::Zero(spec.ambient_dim);
  zero.declared_s = 1.0;
  zero.declared_R0 = 1.0;
  const long n = 100000;
  const Dataset data = invlearn::synthesize(spec, zero, n, {12, 0});
  double mean = 0.0;
  for (double y : data.observations) mean += y;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double y : data.observations) var += (y - mean) * (y - mean);
  var /= static_cast<double>(n - 1);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("synthesis replays bit-identically") {
  const ProblemSpec spec = small_spec(0.7);
  invlearn::GroundTruthParams params;
  const auto gt = invlearn::make_ground_truth(spec, params);
  const Dataset a = invlearn::synthesize(spec, gt, 64, {99, 4});
  const Dataset b = invlearn::synthesize(spec, gt, 64, {99, 4});
  CHECK(a.points == b.points);
  CHECK(a.observations == b.observations);
}

TEST_CASE("distinct trial indices give uncorrelated noise streams") {
  const ProblemSpec spec = small_spec(1.0);
  invlearn::GroundTruth zero;
  zero.coeffs = Vector::Zero(spec.ambient_dim);
  zero.declared_s = 1.0;
  zero.declared_R0 = 1.0;
  const long n = 20000;
  const Dataset a = invlearn::synthesize(spec, zero, n, {123, 0});
  const Dataset b = invlearn::synthesize(spec, zero, n, {123, 1});
  double corr = 0.0;
  for (long i = 0; i < n; ++i)
    corr += a.observations[static_cast<std::size_t>(i)] *
            b.observations[static_cast<std::size_t>(i)];
  corr /= static_cast<double>(n);
  CHECK(std::abs(corr) <= 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("noise regeneration reproduces the synthesis stream") {
  const ProblemSpec spec = small_spec(0.5);
  invlearn::GroundTruthParams params;
  const auto gt = invlearn::make_ground_truth(spec, params);
  const Dataset data = invlearn::synthesize(spec, gt, 32, {55, 9});
  const auto eps = invlearn::regenerate_noise(data);
  REQUIRE(eps.size() == 32);
  for (long i = 0; i < 32; ++i) {
    const double clean =
        invlearn::eval_row(spec, data.points[static_cast<std::size_t>(i)]).dot(gt.coeffs);
    CHECK(data.observations[static_cast<std::size_t>(i)] ==
          doctest::Approx(clean + 0.5 * eps[static_cast<std::size_t>(i)]).epsilon(1e-15));
  }

  Dataset foreign = data;
  foreign.synthetic = false;
  CHECK_THROWS_AS(invlearn::regenerate_noise(foreign), std::invalid_argument);
}

TEST_CASE("CSV export round-trips doubles") {
  Dataset data;
  data.points = {0.12345678901234567, 1.0 / 3.0};
  data.observations = {-2.7182818284590452, 1e-17};
  std::ostringstream out;
  invlearn::write_csv(data, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y");
  for (int i = 0; i < 2; ++i) {
    std::string line;
    std::getline(in, line);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == data.points[static_cast<std::size_t>(i)]);
    CHECK(std::stod(line.substr(comma + 1)) ==
          data.observations[static_cast<std::size_t>(i)]);
  }
}

}
