#include "doctest.h"

#include "invlearn/numerics.hpp"
#include "invlearn/quadrature.hpp"
#include "invlearn/sampling.hpp"

#include "oracles.hpp"

using invlearn::Matrix;
using invlearn::Vector;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  invlearn::RandomStream rs(seed);
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = 2.0 * rs.uniform01() - 1.0;
  return a;
}

Matrix random_rank_deficient(int rows, int cols, int rank, std::uint64_t seed) {
  return random_matrix(rows, rank, seed) * random_matrix(rank, cols, seed ^ 0x9E37);
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("svd of the identity") {
  const auto f = invlearn::svd(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(f.singulars(i) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd reorders a diagonal matrix") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 3.0;
  a(2, 2) = 1.0;
  const auto f = invlearn::svd(a);
  CHECK(f.singulars(0) == doctest::Approx(3.0));
  CHECK(f.singulars(1) == doctest::Approx(1.0));
  CHECK(f.singulars(2) == doctest::Approx(0.0));
}

TEST_CASE("svd singular values match the characteristic-polynomial oracle") {
  const Matrix a = random_matrix(5, 4, 7);
  const auto f = invlearn::svd(a);
  // Eigenvalues of A^T A found by bisection on the Faddeev-LeVerrier
  // characteristic polynomial.
  const Matrix gram = a.transpose() * a;
  const double ub = gram.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const auto eigs = oracle::eigs_by_bisection(gram, -0.5, ub);
  REQUIRE(eigs.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(f.singulars(i) == doctest::Approx(std::sqrt(eigs[static_cast<std::size_t>(i)]))
                                .epsilon(1e-8));
}

TEST_CASE("svd reconstruction and deterministic signs") {
  const Matrix a = random_matrix(6, 5, 21);
  const auto f = invlearn::svd(a);
  const auto g = invlearn::svd(a);
  CHECK((f.left - g.left).cwiseAbs().maxCoeff() == 0.0);
  const Matrix rebuilt = f.left * f.singulars.asDiagonal() * f.right.transpose();
  CHECK((rebuilt - a).norm() / a.norm() <= 1e-10);
  for (int c = 0; c < f.left.cols(); ++c) {
    Eigen::Index imax = 0;
    const Vector mags = f.left.col(c).cwiseAbs();
    mags.maxCoeff(&imax);
    CHECK(f.left(imax, c) >= 0.0);
  }
  for (int i = 1; i < f.singulars.size(); ++i)
    CHECK(f.singulars(i) <= f.singulars(i - 1) + 1e-15);
}

TEST_CASE("pinv of a diagonal matrix") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  const Matrix p = invlearn::pinv(a);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("pinv of an invertible matrix is its inverse") {
  Matrix a(2, 2);
  a << 2, 1, 1, 1;
  Matrix expected(2, 2);
  expected << 1, -1, -1, 2;
  CHECK((invlearn::pinv(a) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pinv satisfies A pinv(A) A = A on a rank-deficient matrix") {
  const Matrix a = random_rank_deficient(4, 4, 2, 11);
  const Matrix p = invlearn::pinv(a);
  CHECK((a * p * a - a).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Moore-Penrose identities over seeded matrices") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    invlearn::RandomStream rs(1000 + seed);
    const int rows = 2 + static_cast<int>(rs.next_u64() % 11);
    const int cols = 2 + static_cast<int>(rs.next_u64() % 11);
    const bool deficient = seed % 2 == 1;
    const int rank = deficient ? 1 + static_cast<int>(rs.next_u64() %
                                                      std::min(rows, cols))
                               : std::min(rows, cols);
    const Matrix a = deficient ? random_rank_deficient(rows, cols, rank, 3000 + seed)
                               : random_matrix(rows, cols, 3000 + seed);
    const Matrix p = invlearn::pinv(a);
    CHECK((a * p * a - a).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((p * a * p - p).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(((a * p) - (a * p).transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(((p * a) - (p * a).transpose()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("projected pseudoinverse identities") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int dim = 4 + static_cast<int>(seed % 5);
    const Matrix g = random_matrix(dim, dim, 500 + seed);
    const Matrix b = g.transpose() * g;  // symmetric
    const int m = 1 + static_cast<int>(seed % (dim - 1));
    Matrix projected = Matrix::Zero(dim, dim);
    projected.topLeftCorner(m, m) = b.topLeftCorner(m, m);
    const Matrix x = invlearn::pinv(projected);
    Matrix p = Matrix::Zero(dim, dim);
    p.topLeftCorner(m, m) = Matrix::Identity(m, m);
    CHECK((x - p * x).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((x - x * p).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((x * projected - projected * x).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("lambda_min_nonzero skips the null direction") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  CHECK(invlearn::lambda_min_nonzero(a) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lambda_min_nonzero on the analytic diagonal section") {
  // Leading 8 x 8 section of diag(j^{-1}).
  Matrix b = Matrix::Zero(8, 8);
  for (int j = 0; j < 8; ++j) b(j, j) = 1.0 / (j + 1.0);
  CHECK(invlearn::lambda_min_nonzero(b) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("lambda_min_nonzero of the identity") {
  CHECK(invlearn::lambda_min_nonzero(Matrix::Identity(5, 5)) == doctest::Approx(1.0));
}

TEST_CASE("lambda_min_nonzero rejects the zero operator") {
  CHECK_THROWS_WITH_AS(invlearn::lambda_min_nonzero(Matrix::Zero(3, 3)),
                       doctest::Contains("zero operator"), std::runtime_error);
}

TEST_CASE("hs_norm basics") {
  CHECK(invlearn::hs_norm(Matrix::Identity(9, 9)) == doctest::Approx(3.0));
  Matrix a(2, 2);
  a << 3, 4, 0, 0;
  CHECK(invlearn::hs_norm(a) == doctest::Approx(5.0));
}

TEST_CASE("hs_norm matches the naive trace oracle") {
  const Matrix a = random_matrix(6, 6, 3);
  CHECK(invlearn::hs_norm(a) == doctest::Approx(oracle::naive_frobenius(a)).epsilon(1e-13));
}

TEST_CASE("sqrt_psd of a diagonal matrix") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 9.0;
  const Matrix s = invlearn::sqrt_psd(a);
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(s(0, 1)) <= 1e-14);
}

TEST_CASE("sqrt_psd of zero is zero") {
  CHECK(invlearn::sqrt_psd(Matrix::Zero(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sqrt_psd squares back to the input") {
  const Matrix g = random_matrix(5, 5, 5);
  const Matrix a = g * g.transpose();
  const Matrix s = invlearn::sqrt_psd(a);
  CHECK((s * s - a).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("sqrt_psd fixes orthogonal projections") {
  // Orthogonal projection onto the column span of a random tall matrix.
  const Matrix g = random_matrix(6, 3, 17);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = Matrix(qr.householderQ()).leftCols(3);
  const Matrix proj = q * q.transpose();
  CHECK((invlearn::sqrt_psd(proj) - proj).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("sqrt_psd rejects asymmetric input") {
  Matrix a(2, 2);
  a << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(invlearn::sqrt_psd(a), std::invalid_argument);
}

TEST_CASE("op_norm basics") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 5.0;
  CHECK(invlearn::op_norm(a) == doctest::Approx(5.0));

  invlearn::RandomStream rs(23);
  Vector u(4), v(6);
  for (int i = 0; i < 4; ++i) u(i) = rs.gaussian();
  for (int i = 0; i < 6; ++i) v(i) = rs.gaussian();
  CHECK(invlearn::op_norm(u * v.transpose()) ==
        doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
}

TEST_CASE("op_norm matches the power-iteration oracle") {
  const Matrix a = random_matrix(4, 7, 9);
  CHECK(invlearn::op_norm(a) ==
        doctest::Approx(oracle::power_iteration_opnorm(a)).epsilon(1e-8));
}

TEST_CASE("operator norm never exceeds the Hilbert-Schmidt norm") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    invlearn::RandomStream rs(40 + seed);
    const int rows = 2 + static_cast<int>(rs.next_u64() % 7);
    const int cols = 2 + static_cast<int>(rs.next_u64() % 7);
    const Matrix a = random_matrix(rows, cols, 700 + seed);
    CHECK(invlearn::op_norm(a) <= invlearn::hs_norm(a) + 1e-12);
  }
}

TEST_CASE("rel_tol outside (0, 1) is rejected") {
  CHECK_THROWS_AS(invlearn::pinv(Matrix::Identity(2, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(invlearn::lambda_min_nonzero(Matrix::Identity(2, 2), 1.5),
                  std::invalid_argument);
}

}

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2n - 1 exactly") {
  for (int n : {2, 5, 16}) {
    const auto rule = invlearn::gauss_legendre(n);
    for (int degree = 0; degree <= 2 * n - 1; ++degree) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += rule.weights[static_cast<std::size_t>(i)] *
               std::pow(rule.nodes[static_cast<std::size_t>(i)], degree);
      const double exact = degree % 2 == 1 ? 0.0 : 2.0 / (degree + 1.0);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule resolves oscillatory integrands") {
  const auto rule = invlearn::composite_gauss_legendre_01(invlearn::kQuadNodesPerPanel,
                                                          invlearn::kQuadPanels);
  double weight_sum = 0.0;
  for (double w : rule.weights) weight_sum += w;
  CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-14));
  for (double x : rule.nodes) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  // int_0^1 cos(40 pi x)^2 dx = 1/2.
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double c = std::cos(40.0 * std::numbers::pi * rule.nodes[i]);
    acc += rule.weights[i] * c * c;
  }
  CHECK(acc == doctest::Approx(0.5).epsilon(1e-13));
}

}
