#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <hybridbvp/coupled.hpp>
#include <hybridbvp/errors.hpp>
#include <hybridbvp/nonlocal.hpp>

#include "oracles.hpp"

using namespace hybridbvp;

TEST(Nonlocal, PsiRoundTrip) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> z(-50, 50), q(1.2, 6);
  for (int k = 0; k < 10000; ++k) {
    const double x = z(rng), qq = q(rng);
    EXPECT_NEAR(psi_q_inv(psi_q(x, qq), qq), x, 1e-12 * (1 + std::abs(x)));
    EXPECT_NEAR(psi_q(x, qq), oracle::psi(x, qq), 1e-12 * (1 + std::abs(oracle::psi(x, qq))));
  }
  EXPECT_EQ(psi_q(0, 3), 0);
}

TEST(Nonlocal, CubicManufacturedSolution) {
  const auto spec = registry("manufactured-q2");
  const Grid g(512);
  const auto zero = GridFunction::zeros(g);
  const auto t = apply_T_detailed(zero, zero, spec.second);
  EXPECT_LE(std::abs(t.theta_at_c), 1e-10);
  double err = 0;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double s = g.node(i);
    err = std::max(err, std::abs(t.value[i] - (s - s * s * s)));
  }
  EXPECT_LE(err, 1e-3);
  EXPECT_NEAR(t.c, 1.0, 1e-6);  // v' = c - 3 t^2 with v' (0) = 1
}

TEST(Nonlocal, SineCaseRecoversPi) {
  const auto spec = registry("manufactured-q2-sin");
  const Grid g(512);
  const auto zero = GridFunction::zeros(g);
  EXPECT_NEAR(find_c(zero, zero, spec.second), std::numbers::pi, 1e-6);
}

TEST(Nonlocal, ThetaIsIncreasingAndBracketed) {
  const auto spec = registry("paper-example");
  const Grid g(64);
  const auto u = GridFunction::interpolate(g, [](double t) { return t * (1 - t); });
  const auto v = GridFunction::interpolate(g, [](double t) { return std::cos(t); });
  const ThetaFunction theta(u, v, spec.second);
  const auto [lo, hi] = theta.apriori_bracket();
  EXPECT_LE(theta(lo), 0.0);
  EXPECT_GE(theta(hi), 0.0);
  double prev = theta(lo);
  for (int k = 1; k <= 50; ++k) {
    const double x = theta(lo + (hi - lo) * k / 50.0);
    EXPECT_GE(x, prev);
    prev = x;
  }
}

TEST(Nonlocal, BoundaryValuesAreStieltjesIntegrals) {
  const auto spec = registry("paper-example");
  const Grid g(128);
  const auto u = GridFunction::interpolate(g, [](double t) { return 0.3 * std::sin(std::numbers::pi * t); });
  const auto v = GridFunction::interpolate(g, [](double t) { return 1 - t; });
  const auto T = apply_T_detailed(u, v, spec.second);
  EXPECT_NEAR(T.value[0], T.h0_integral, 1e-15);
  EXPECT_NEAR(T.value[g.n_cells()], T.h1_integral, 1e-8);
  // A0 = t / 2: int sin(1 - t) dt / 2
  EXPECT_NEAR(T.h0_integral, 0.5 * (1 - std::cos(1.0)), 1e-6);
}

TEST(Nonlocal, BoundednessEstimateHolds) {
  const auto spec = registry("paper-example").second;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-2, 2);
  const Grid g(64);
  for (int k = 0; k < 100; ++k) {
    const double a = c(rng), b = c(rng), d = c(rng);
    const auto u = GridFunction::interpolate(g, [&](double t) { return a * std::sin(std::numbers::pi * t); });
    const auto v = GridFunction::interpolate(g, [&](double t) { return b + d * t; });
    const double lhs = sup_norm(apply_T(u, v, spec));
    EXPECT_LE(lhs, boundedness_rhs(spec, sup_norm(u), sup_norm(v)) + 1e-8);
  }
}

TEST(Nonlocal, SchauderRadiusIsInvariant) {
  const auto spec = registry("paper-example").second;
  const auto r = schauder_radius(spec, 1.0);
  EXPECT_LT(r.a, 1.0);
  EXPECT_LE(boundedness_rhs(spec, 1.0, r.R), r.R * (1 + 1e-10));
  EXPECT_GT(boundedness_rhs(spec, 1.0, 0.99 * r.R), 0.99 * r.R);
}

TEST(Nonlocal, FixedPointAndVerification) {
  const auto spec = registry("paper-example").second;
  const Grid g(256);
  const auto u = GridFunction::interpolate(g, [](double t) { return 0.5 * t * (1 - t); });
  const auto fp = fixed_point_T(u, GridFunction::zeros(g), spec);
  const auto ok = verify_nonlocal_solution(u, fp.v, spec);
  EXPECT_TRUE(ok.report.passed());
  auto bad = fp.v;
  bad[100] += 1e-3;
  const auto ver = verify_nonlocal_solution(u, bad, spec);
  EXPECT_FALSE(ver.report.passed());
  EXPECT_NEAR(static_cast<double>(ver.worst_node), 100.0, 1.0);
}

TEST(Nonlocal, ExampleAssumptions) {
  EXPECT_TRUE(check_g_assumptions(registry("paper-example").second).passed());
  auto s = registry("paper-example").second;
  s.h.alpha0 = 1.0;
  s.h.alpha1 = 1.0;
  s.h.A0 = BVFunction::linear(1.0);
  s.h.A1 = BVFunction::linear(1.0);
  EXPECT_FALSE(check_g_assumptions(s).passed());
}

TEST(Nonlocal, ValidatesExponents) {
  auto g = registry("paper-example").second.g;
  g.theta = 3.0;
  EXPECT_THROW(g.validate(), InvalidArgument);
  EXPECT_THROW(GSpec::parse(1.0, "t", 0, 0, 0, 0, 0).validate(), InvalidArgument);
}
