#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "shellcompat/banded.hpp"

using shellcompat::BandMatrix;
using shellcompat::NumericalError;
using shellcompat::solve_banded;

namespace {

// Random diagonally dominant band matrix and its dense copy.
std::pair<BandMatrix, Eigen::MatrixXd> random_band(int n, int kl, int ku, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BandMatrix a(n, kl, ku);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = std::max(0, r - kl); c <= std::min(n - 1, r + ku); ++c) {
      const double v = dist(rng) + (r == c ? 0.5 * (kl + ku) : 0.0);
      a(r, c) = v;
      d(r, c) = v;
    }
  }
  return {a, d};
}

}  // namespace

TEST(BandMatrix, StorageAndBandChecks) {
  BandMatrix a(5, 1, 2);
  a(3, 2) = 4.0;
  a(0, 2) = -1.0;
  const BandMatrix& c = a;
  EXPECT_EQ(c(3, 2), 4.0);
  EXPECT_EQ(c(0, 2), -1.0);
  EXPECT_EQ(c(4, 0), 0.0);
  EXPECT_THROW(a(3, 0), std::out_of_range);
  EXPECT_THROW(BandMatrix(0, 1, 1), std::invalid_argument);
  EXPECT_EQ(a.ldab(), 2 * 1 + 2 + 1);
}

TEST(SolveBanded, MatchesDenseSolve) {
  struct Shape { int n, kl, ku; };
  for (const Shape s : {Shape{10, 1, 1}, Shape{40, 3, 5}, Shape{300, 70, 70}, Shape{1500, 127, 127}}) {
    auto [a, d] = random_band(s.n, s.kl, s.ku, 7u + s.n);
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(s.n, -1.0, 2.0);
    const Eigen::VectorXd ref = d.partialPivLu().solve(b);
    const auto sol = solve_banded(a, std::vector<double>(b.data(), b.data() + s.n));
    double err = 0.0;
    for (int k = 0; k < s.n; ++k) err = std::max(err, std::abs(sol.x[k] - ref[k]));
    EXPECT_LT(err, 1e-11 * (1.0 + ref.cwiseAbs().maxCoeff())) << "n=" << s.n << " kl=" << s.kl;
    EXPECT_GE(sol.condition(), 1.0);
  }
}

TEST(SolveBanded, ConditionEstimateOfDiagonal) {
  BandMatrix a(4, 1, 1);
  const double diag[4] = {1.0, 2.0, 4.0, 8.0};
  for (int k = 0; k < 4; ++k) a(k, k) = diag[k];
  const auto sol = solve_banded(a, {1, 1, 1, 1});
  EXPECT_NEAR(sol.condition(), 8.0, 1e-12);
  EXPECT_NEAR(sol.x[3], 0.125, 1e-16);
}

TEST(SolveBanded, RejectsSingularAndIllConditioned) {
  BandMatrix s(3, 1, 1);
  s(0, 0) = 1.0;
  s(1, 1) = 0.0;
  s(2, 2) = 1.0;
  EXPECT_THROW(solve_banded(s, {1, 1, 1}), NumericalError);

  BandMatrix ill(2, 1, 1);
  ill(0, 0) = 1.0;
  ill(1, 1) = 1e-14;
  EXPECT_THROW(solve_banded(ill, {1, 1}), NumericalError);
  EXPECT_NO_THROW(solve_banded(ill, {1, 1}, 1e15));
  EXPECT_THROW(solve_banded(ill, {1, 1, 1}), std::invalid_argument);
}
