#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <hybridbvp/coupled.hpp>
#include <hybridbvp/errors.hpp>
#include <hybridbvp/poincare.hpp>
#include <hybridbvp/problem_io.hpp>

using namespace hybridbvp;

TEST(Registry, NamesResolve) {
  for (const auto& n : registry_names()) EXPECT_EQ(registry(n).name, n);
  EXPECT_THROW(registry("nosuch"), InvalidArgument);
  const auto s = registry("paper-example");
  EXPECT_EQ(s.first.p, 3.0);
  EXPECT_EQ(s.second.g.q, 4.0);
  EXPECT_EQ(s.sigma.exponent, 2.0);
}

TEST(Coupled, SigmaCondition) {
  EXPECT_TRUE(check_sigma_condition(registry("paper-example")).passed());
  auto s = registry("paper-example");
  s.sigma.exponent = 4.5;
  EXPECT_FALSE(check_sigma_condition(s).passed());
}

TEST(Coupled, RadiusImplicationOnScan) {
  const auto spec = registry("paper-example");
  const double lp = poincare_constant(3, 256);
  const auto r = radius_R(spec, lp);
  ASSERT_TRUE(r.R);
  for (int k = 0; k <= 2000; ++k) {
    const double y = *r.R * k / 2000.0;
    EXPECT_LE(radius_psi(spec, x_max(spec, lp, y), y), *r.R + 1e-9) << y;
  }
  EXPECT_NEAR(r.phi_at_R, radius_phi(spec, lp, *r.R).first, 1e-12);
}

TEST(Coupled, ExampleSolves) {
  const auto sol = solve_system(registry("paper-example"));
  const auto& r = sol.report;
  EXPECT_TRUE(r.converged);
  for (const auto& c : r.post_checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value;
  EXPECT_LE(r.eq1_residual, 1e-6);
  EXPECT_LE(r.gamma_at_solution, 1e-6);
  EXPECT_LE(r.v_sup_norm, r.R_used);
  EXPECT_TRUE(sol.u.is_dirichlet());
}

TEST(Coupled, DecoupledAgreesWithSingleSolves) {
  const auto spec = registry("decoupled");
  const auto sol = solve_system(spec);
  ASSERT_TRUE(sol.report.converged);
  const Grid g(spec.n_cells);
  const auto u = solve_u(sol.v, spec.first, {});
  const auto v = fixed_point_T(u, GridFunction::zeros(g), spec.second).v;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    EXPECT_NEAR(sol.u[i], u[i], 1e-8);
    EXPECT_NEAR(sol.v[i], v[i], 1e-8);
  }
}

TEST(Coupled, ExampleResidualsDecreaseUnderRefinement) {
  auto spec = registry("paper-example");
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    spec.n_cells = n;
    const auto r = solve_system(spec).report;
    EXPECT_LT(r.eq2_classical, previous) << n;
    previous = r.eq2_classical;
  }
}

TEST(Coupled, ForcedRadiusIsReported) {
  auto spec = registry("decoupled");
  spec.radius = 50.0;
  const auto r = solve_system(spec).report;
  EXPECT_TRUE(r.radius_forced);
  EXPECT_EQ(r.R_used, 50.0);
}

TEST(ProblemIO, RoundTrip) {
  for (const auto& n : registry_names()) {
    const auto text = problem_to_json(registry(n));
    EXPECT_EQ(problem_to_json(problem_from_json(text)), text) << n;
  }
}

TEST(ProblemIO, BaseAndOverrides) {
  const auto s = problem_from_json(R"({"base": "paper-example", "n_cells": 64, "g": "t*u", "radius": 3})");
  EXPECT_EQ(s.n_cells, 64u);
  EXPECT_EQ(s.second.g.g.source(), "t*u");
  EXPECT_EQ(*s.radius, 3.0);
  EXPECT_EQ(s.first.p, 3.0);
}

TEST(ProblemIO, Errors) {
  EXPECT_THROW(problem_from_json("{"), ParseError);
  EXPECT_THROW(problem_from_json(R"({"bogus": 1})"), ParseError);
  EXPECT_THROW(problem_from_json(R"({"p": "three"})"), ParseError);
  EXPECT_THROW(problem_from_json(R"({"f": "u +* v"})"), ParseError);
  EXPECT_THROW(problem_from_json(R"({"h0": "t"})"), ParseError);  // h0 sees v only
  EXPECT_THROW(problem_from_json(R"({"base": "nosuch"})"), ParseError);
  EXPECT_THROW(problem_from_json(R"({"p": 1.5})"), ParseError);
}

TEST(ProblemIO, BVRoundTrip) {
  const BVFunction a({0.3, 0.6}, {0, 1}, {0.5, 2}, BVFunction::Density{[](double t) { return t; }, "t"});
  const auto b = bv_from_json(bv_to_json(a));
  EXPECT_EQ(b.breakpoints(), a.breakpoints());
  EXPECT_EQ(b.right_values(), a.right_values());
  EXPECT_NEAR(total_variation(b), total_variation(a), 1e-15);
}
