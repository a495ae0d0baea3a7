#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <hybridbvp/bv_function.hpp>
#include <hybridbvp/errors.hpp>
#include <hybridbvp/poincare.hpp>

#include "oracles.hpp"

using namespace hybridbvp;

TEST(BVFunction, CanonicalForm) {
  const BVFunction a({0.5, 0.2, 0.5}, {1, 0, 2}, {1.5, 0.5, 3});
  ASSERT_EQ(a.breakpoints().front(), 0.0);
  ASSERT_EQ(a.breakpoints().back(), 1.0);
  EXPECT_EQ(a.breakpoints().size(), 4u);  // 0, 0.2, 0.5, 1
}

TEST(BVFunction, TotalVariationOfMonotoneFunctions) {
  EXPECT_NEAR(total_variation(BVFunction::linear(0.5)), 0.5, 1e-15);
  EXPECT_NEAR(total_variation(BVFunction::step(0.3, 2.0)), 2.0, 1e-15);
  // nondecreasing: variation = A(1) - A(0)
  const BVFunction a({0.25, 0.5, 0.75}, {0.1, 0.4, 0.6}, {0.3, 0.4, 0.9});
  EXPECT_NEAR(total_variation(a), a.right_values().back() - a.left_values().front(), 1e-14);
  const auto sq = BVFunction::from_density([](double t) { return 2 * t; }, "2*t");
  EXPECT_NEAR(total_variation(sq), 1.0, 1e-10);
  // a decreasing density cancels the increasing segment slope
  const BVFunction flat({}, {}, {}, BVFunction::Density{[](double) { return -0.5; }, "-0.5"});
  EXPECT_NEAR(total_variation(flat), 0.5, 1e-12);
}

TEST(BVFunction, StieltjesLinearityAndAtoms) {
  const Grid g(64);
  const BVFunction a({0.3}, {0.0}, {2.0});
  auto f = [](double t) { return std::cos(3 * t); };
  auto h = [](double t) { return t * t; };
  EXPECT_NEAR(stieltjes_integral(f, a, g), 2 * std::cos(0.9), 1e-14);
  const auto lin = BVFunction::linear(1.5);
  const double I1 = stieltjes_integral(f, lin, g);
  const double I2 = stieltjes_integral(h, lin, g);
  const double I = stieltjes_integral([&](double t) { return 2 * f(t) - 3 * h(t); }, lin, g);
  EXPECT_NEAR(I, 2 * I1 - 3 * I2, 1e-13);
  EXPECT_NEAR(I2, 0.5, 1e-14);
  const auto sq = BVFunction::from_density([](double t) { return 2 * t; });
  EXPECT_NEAR(stieltjes_integral([](double t) { return t; }, sq, g), 2.0 / 3.0, 1e-8);
}

TEST(BVFunction, RejectsMismatchedValues) {
  EXPECT_THROW(BVFunction({0.5}, {1, 2}, {1}), InvalidArgument);
}

TEST(Poincare, P2MatchesGeneralizedEigenproblem) {
  const int n = 64;
  const double h = 1.0 / n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n - 1, n - 1), M = K;
  for (int i = 0; i < n - 1; ++i) {
    K(i, i) = 2 / h;
    M(i, i) = 4 * h / 6;
    if (i + 1 < n - 1) {
      K(i, i + 1) = K(i + 1, i) = -1 / h;
      M(i, i + 1) = M(i + 1, i) = h / 6;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  EXPECT_NEAR(poincare_constant(2, n), es.eigenvalues()[0], 1e-9);
}

TEST(Poincare, P3AgainstInverseIteration) {
  const double ref = oracle::poincare_inverse_iteration(3.0);
  const double v = poincare_constant(3, 256);
  EXPECT_NEAR(v, ref, 1e-3 * ref);
  EXPECT_GE(v, ref * (1 - 1e-6));  // discrete value bounds from above
  EXPECT_NEAR(oracle::poincare_closed_form(2), std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(Poincare, EigenfunctionIsNormalized) {
  const auto r = poincare_eigenpair(2.5, 128);
  EXPECT_NEAR(lp_norm(r.eigenfunction, 2.5), 1.0, 1e-6);
  EXPECT_TRUE(r.eigenfunction.is_dirichlet());
}
