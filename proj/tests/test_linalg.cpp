#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solnet/linalg.hpp"
#include "support.hpp"

#ifdef SOLNET_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace solnet;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  return a;
}

}  // namespace

TEST(SymmetricEigen, MatchesJacobiOnRandomMatrices) {
  std::mt19937_64 rng(21);
  for (std::size_t n : {1u, 2u, 3u, 6u, 10u, 25u, 40u}) {
    auto a = random_symmetric(n, rng);
    auto sys = symmetric_eigen(a, false);
    auto ref = testing_support::jacobi_eigenvalues(a);
    ASSERT_EQ(sys.values.size(), n);
    EXPECT_LT(testing_support::max_abs_diff(sys.values, ref), 1e-10) << n;
  }
}

TEST(SymmetricEigen, EigenvectorsOrthonormalAndSatisfyEquation) {
  std::mt19937_64 rng(22);
  const std::size_t n = 30;
  auto a = random_symmetric(n, rng);
  auto sys = symmetric_eigen(a, true);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += sys.vectors[k][i] * sys.vectors[m][i];
      EXPECT_NEAR(d, k == m ? 1.0 : 0.0, 1e-10);
    }
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = -sys.values[k] * sys.vectors[k][i];
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * sys.vectors[k][j];
      r += s * s;
    }
    EXPECT_LT(std::sqrt(r), 1e-10);
  }
}

TEST(SymmetricEigen, AscendingOrder) {
  std::mt19937_64 rng(23);
  auto sys = symmetric_eigen(random_symmetric(50, rng), false);
  for (std::size_t i = 1; i < sys.values.size(); ++i) EXPECT_LE(sys.values[i - 1], sys.values[i]);
}

TEST(TridiagonalEigen, KnownSpectrumOfPathGraph) {
  // Path graph Laplacian-like tridiagonal: 2 on the diagonal, -1 off it.
  const std::size_t n = 12;
  std::vector<double> diag(n, 2.0), sub(n - 1, -1.0);
  auto sys = tridiagonal_eigen(diag, sub, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double want = 2.0 - 2.0 * std::cos((k + 1.0) * std::numbers::pi / (n + 1.0));
    EXPECT_NEAR(sys.values[k], want, 1e-12);
  }
}

TEST(Lanczos, LowestPairsMatchDense) {
  std::mt19937_64 rng(24);
  const std::size_t n = 120;
  auto a = random_symmetric(n, rng);
  auto dense = symmetric_eigen(a, false);
  auto op = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
  };
  auto low = lanczos_lowest(n, op, 3);
  ASSERT_EQ(low.values.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(low.values[k], dense.values[k], 1e-9);
}

TEST(TraceInverse, DiagonalAndSingular) {
  const double m[] = {2.0, 0.0, 0.0, 4.0};
  EXPECT_NEAR(trace_of_inverse_spd(m, 2), 0.75, 1e-15);
  const double s[] = {1.0, 1.0, 1.0, 1.0};
  EXPECT_THROW(trace_of_inverse_spd(s, 2), NumericalError);
}

TEST(TraceInverse, MatchesExplicitInverse2x2) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng) + 2.0, d = u(rng) + 2.0, b = u(rng) - 1.5;
    const double m[] = {a, b, b, d};
    EXPECT_NEAR(trace_of_inverse_spd(m, 2), (a + d) / (a * d - b * b), 1e-12);
  }
}

#ifdef SOLNET_HAVE_EIGEN
TEST(SymmetricEigen, CrossCheckAgainstEigenLibrary) {
  std::mt19937_64 rng(26);
  const std::size_t n = 80;
  auto a = random_symmetric(n, rng);
  Eigen::MatrixXd e(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  auto sys = symmetric_eigen(a, false);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(sys.values[k], es.eigenvalues()[k], 1e-10);
}
#endif
