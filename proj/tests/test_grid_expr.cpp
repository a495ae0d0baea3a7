#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include <hybridbvp/errors.hpp>
#include <hybridbvp/expr.hpp>
#include <hybridbvp/grid.hpp>
#include <hybridbvp/tridiagonal.hpp>

using namespace hybridbvp;

TEST(Grid, NodesAndSpacing) {
  const Grid g(8);
  EXPECT_EQ(g.n_nodes(), 9u);
  EXPECT_DOUBLE_EQ(g.h(), 0.125);
  EXPECT_DOUBLE_EQ(g.node(8), 1.0);
  EXPECT_THROW(make_grid(0), InvalidArgument);
}

TEST(Grid, GaussRuleIsExactForCubics) {
  auto f = [](double t) { return 4 * t * t * t - 3 * t * t + 2 * t - 1; };
  // antiderivative t^4 - t^3 + t^2 - t on [0.2, 1.7]
  auto F = [](double t) { return t * t * t * t - t * t * t + t * t - t; };
  EXPECT_NEAR(integrate(f, 0.2, 1.7, 1), F(1.7) - F(0.2), 1e-13);
}

TEST(Grid, PNormOfPiecewiseLinear) {
  const Grid g(16);
  const auto u = GridFunction::interpolate(g, [](double t) { return t * (1 - t); });
  double sum = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    const double s = (u[i + 1] - u[i]) / g.h();
    sum += std::pow(std::abs(s), 3) * g.h();
  }
  EXPECT_NEAR(p_norm(u, 3), std::cbrt(sum), 1e-14);
  EXPECT_NEAR(sup_norm(u), 0.25, 1e-15);
  EXPECT_TRUE(u.is_dirichlet());
}

TEST(Grid, VolterraOfConstantIsIdentity) {
  const Grid g(10);
  const auto one = GridFunction::interpolate(g, [](double) { return 1.0; });
  const auto V = volterra(one);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) EXPECT_NEAR(V[i], g.node(i), 1e-15);
  EXPECT_NEAR(integral(one), 1.0, 1e-15);
}

TEST(Grid, SobolevOnRandomDirichletFunctions) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const Grid g(5 + k % 60);
    std::vector<double> x(g.n_nodes());
    for (std::size_t i = 1; i + 1 < x.size(); ++i) x[i] = n(rng);
    const GridFunction u(g, x);
    for (double p : {2.0, 3.0, 4.5}) EXPECT_TRUE(sobolev_check(u, p));
  }
}

TEST(Tridiagonal, MatchesDenseSolve) {
  SymTridiagonal a{{4, 5, 6, 7, 8}, {1, -2, 0.5, 1}};
  const std::vector<double> rhs{1, 2, 3, 4, 5};
  const auto x = solve(a, rhs);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) D(i, i) = a.diag[i];
  for (int i = 0; i < 4; ++i) D(i, i + 1) = D(i + 1, i) = a.off[i];
  const Eigen::VectorXd ref = D.lu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), 5));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(x[i], ref[i], 1e-13);
}

TEST(Tridiagonal, StiffnessIsScaledSecondDifference) {
  const auto K = stiffness_matrix(4);  // interior nodes, h = 1/4
  ASSERT_EQ(K.size(), 3u);
  EXPECT_DOUBLE_EQ(K.diag[0], 8.0);
  EXPECT_DOUBLE_EQ(K.off[0], -4.0);
}

TEST(Expr, EvaluatesWithPrecedence) {
  const auto e = parse("2*t + u^2 - v/4");
  EXPECT_DOUBLE_EQ(e(Env{{Var::t, 1}, {Var::u, 3}, {Var::v, 8}}), 9.0);
  EXPECT_DOUBLE_EQ(parse("-v^2")(Env{{Var::v, 3}}), -9.0);
  EXPECT_DOUBLE_EQ(parse("2^3^2")(Env{}), 512.0);
  EXPECT_NEAR(parse("pi")(Env{}), std::numbers::pi, 0);
  EXPECT_DOUBLE_EQ(parse("max(t, 2)")(Env{{Var::t, 1}}), 2.0);
  EXPECT_DOUBLE_EQ(parse("min(t, -1)")(Env{{Var::t, 1}}), -1.0);
  EXPECT_DOUBLE_EQ(parse("abs(v)^2 - v^2*u^5")(Env{{Var::u, 1}, {Var::v, -2}}), 0.0);
}

TEST(Expr, RoundTripsThroughToString) {
  for (const char* s : {"v*cos(v) + u*sqrt(abs(u)) + cos(u) + v*sin(t)", "-(t - 1)^3 / (2 + y)", "sign(r)*r^0.5"}) {
    const auto e = parse(s);
    EXPECT_EQ(parse(e.to_string()), e) << s;
  }
}

TEST(Expr, RejectsBadInput) {
  EXPECT_THROW(parse("1 +"), ParseError);
  EXPECT_THROW(parse("foo(t)"), ParseError);
  EXPECT_THROW(parse("t^u"), ParseError);
  EXPECT_THROW(parse("sin(t, u)"), ParseError);
  EXPECT_THROW(parse("u", {Var::v}), ParseError);
  try {
    parse("t + $");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  std::string deep;
  for (int k = 0; k < 100; ++k) deep += "sin(";
  deep += "t" + std::string(100, ')');
  EXPECT_THROW(parse(deep), ParseError);
}

TEST(Expr, DomainAndBindingErrors) {
  EXPECT_THROW(eval(parse("sqrt(t)"), Env{{Var::t, -1}}), DomainError);
  EXPECT_THROW(eval(parse("1/t"), Env{{Var::t, 0}}), DomainError);
  EXPECT_THROW(eval(parse("t^0.5"), Env{{Var::t, -1}}), DomainError);
  EXPECT_THROW(eval(parse("t + u"), Env{{Var::t, 1}}), InvalidArgument);
}
