#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include <hybridbvp/engine.hpp>
#include <hybridbvp/errors.hpp>

#include "oracles.hpp"
#include "sandbox.hpp"

using namespace hybridbvp;

namespace {

std::shared_ptr<const VecSpace> line() { return std::make_shared<const VecSpace>(1); }

ParamOperator scalar(std::function<double(double)> f, std::optional<double> modulus = std::nullopt) {
  ParamOperator F;
  F.eval = [f](const Vector& u, const Vector&) -> Vector { return Vector::Constant(1, f(u[0])); };
  F.strong_modulus = modulus;
  return F;
}

}  // namespace

TEST(VecSpace, DualNormUsesInverseGram) {
  SparseMatrix G(3, 3);
  G.insert(0, 0) = 2;
  G.insert(1, 1) = 3;
  G.insert(2, 2) = 2;
  G.insert(0, 1) = G.insert(1, 0) = -1;
  G.insert(1, 2) = G.insert(2, 1) = 0.5;
  const VecSpace s(G);
  const Vector r = Vector::LinSpaced(3, 1, 3);
  const Eigen::MatrixXd D(G);
  EXPECT_NEAR(s.dual_norm(r), std::sqrt(r.dot(D.inverse() * r)), 1e-13);
  EXPECT_NEAR(s.norm(s.riesz(r)), s.dual_norm(r), 1e-13);
  SparseMatrix bad(2, 2);
  bad.insert(0, 1) = 1;
  bad.insert(1, 1) = 1;
  EXPECT_THROW(VecSpace{bad}, InvalidArgument);
}

TEST(SolveRegularized, CubicWithRegularization) {
  const auto F = scalar([](double u) { return u * u * u - 8; });
  const auto res = solve_regularized(F, DualityMap(line()), Vector::Zero(0), 0.5);
  const double ref = oracle::bisect([](double u) { return u * u * u + 0.5 * u - 8; }, 0, 3);
  EXPECT_NEAR(res.u[0], ref, 1e-9);
  for (std::size_t k = 1; k < res.residuals.size(); ++k) EXPECT_LT(res.residuals[k], res.residuals[k - 1]);
}

TEST(SolveRegularized, StronglyMonotoneWithoutRegularization) {
  const auto F = scalar([](double u) { return std::tanh(u) + 0.1 * u - 2; }, 0.1);
  const auto res = solve_regularized(F, DualityMap(line()), Vector::Zero(0), 0.0);
  const double ref = oracle::bisect([](double u) { return std::tanh(u) + 0.1 * u - 2; }, 0, 20);
  EXPECT_NEAR(res.u[0], ref, 1e-9);
}

TEST(SolveRegularized, RejectsUnregularizedMonotone) {
  const auto F = scalar([](double u) { return u * u * u; });
  EXPECT_THROW(solve_regularized(F, DualityMap(line()), Vector::Zero(0), 0.0), InvalidArgument);
  EXPECT_THROW(solve_regularized(F, DualityMap(line()), Vector::Zero(0), -1.0), InvalidArgument);
}

TEST(SolveRegularized, BudgetExhaustionCarriesTrace) {
  const auto F = scalar([](double u) { return std::pow(u, 9) - 1e6; });
  RegularizedOptions o;
  o.max_iter = 2;
  try {
    solve_regularized(F, DualityMap(line()), Vector::Zero(0), 1e-3, o);
    FAIL();
  } catch (const NonConvergence& e) {
    EXPECT_FALSE(e.residual_trace().empty());
  }
}

TEST(Engine, EpsilonSchedule) {
  const auto s = default_epsilon_schedule();
  ASSERT_EQ(s.size(), 41u);
  EXPECT_EQ(s.front(), 1.0);
  EXPECT_EQ(s.back(), std::ldexp(1.0, -40));
}

TEST(Engine, DampingHalvesOnReversal) {
  DampingPolicy d(1.0);
  const std::vector<double> a{1, 0}, b{-1, 0.1};
  EXPECT_EQ(d.next(a), 1.0);
  EXPECT_EQ(d.next(b), 0.5);
  EXPECT_EQ(d.next(b), 0.5);
}

TEST(Engine, HybridSolveScalarSystem) {
  // u - v = 0 and v = u / 2 + 1: the solution is u = v = 2
  ParamOperator F;
  F.eval = [](const Vector& u, const Vector& v) -> Vector { return u - v; };
  F.strong_modulus = 1.0;
  CompactMap G;
  G.eval = [](const Vector& u, const Vector&) -> Vector { return 0.5 * u + Vector::Ones(1); };
  HybridOptions o;
  o.v0 = Vector::Zero(1);
  const auto r = hybrid_solve(F, G, DualityMap(line()), 10.0, o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.u[0], 2.0, 1e-9);
  EXPECT_NEAR(r.v[0], 2.0, 1e-9);
  EXPECT_FALSE(r.clipped_at_end);
  const auto csv = trace_csv(r.trace);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "stage,iter,eps,residual,update,step,clipped");
}

TEST(Engine, HybridSolveFlagsClipping) {
  ParamOperator F;
  F.eval = [](const Vector& u, const Vector& v) -> Vector { return u - v; };
  F.strong_modulus = 1.0;
  CompactMap G;
  G.eval = [](const Vector& u, const Vector&) -> Vector { return 0.5 * u + Vector::Ones(1); };
  HybridOptions o;
  o.v0 = Vector::Zero(1);
  o.max_outer = 50;
  try {
    const auto r = hybrid_solve(F, G, DualityMap(line()), 1.0, o);
    EXPECT_TRUE(r.clipped_at_end);
    EXPECT_FALSE(r.converged);
  } catch (const NonConvergence&) {
    SUCCEED();
  }
}

TEST(Engine, OneSidedConstantMatchesSymmetricPart) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  const auto space = sandbox::plane();
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix2d K;
    K << n(rng), n(rng), n(rng), n(rng);
    const double top = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (K + K.transpose())).eigenvalues().maxCoeff();
    const double m = one_sided_constant([K](const Vector& u) -> Vector { return K * u; },
                                        ball_pair_sampler(space, 1.0), *space);
    EXPECT_LE(m, top + 1e-12);
    EXPECT_NEAR(m, top, 1e-6);
  }
}

TEST(Engine, Lambda0AndEigenSolveAgainstLinearSolve) {
  const auto d = sandbox::lambda0_demo();
  const auto space = sandbox::plane();
  Lambda0Options o;
  o.m = d.m();
  const auto l = krasnoselskii_lambda0(d.A(), d.B(), space, o);
  EXPECT_NEAR(l.r, d.a.norm() / (1 - d.m()), 1e-14);
  EXPECT_NEAR(l.certified_radius, (d.a.norm() + 1) / (1 - d.m()), 1e-14);
  const double lambda = 0.9 * l.certified_lambda0;
  const auto e = solve_eigen(d.A(), d.B(), lambda, l.certified_radius, l.m, space, 1e-12);
  const Eigen::Vector2d ref = (Eigen::Matrix2d::Identity() - d.K - lambda * d.N).lu().solve(d.a + lambda * d.b0);
  EXPECT_LT((e.u - ref).norm(), 1e-8);
  Lambda0Options bad;
  bad.m = 1.0;
  EXPECT_THROW(krasnoselskii_lambda0(d.A(), d.B(), space, bad), InvalidArgument);
}

TEST(Engine, Lambda0EstimatesM) {
  const auto d = sandbox::lambda0_demo();
  const auto l = krasnoselskii_lambda0(d.A(), d.B(), sandbox::plane());
  EXPECT_TRUE(l.m_estimated);
  EXPECT_NEAR(l.m, d.m(), 1e-4);
}

TEST(Engine, CondKrasAgainstNewton) {
  const auto d = sandbox::condkras_demo();
  const auto space = sandbox::plane();
  const auto r = solve_condkras(d.A(), d.B(), d.D(), d.m(), space, 1e-12);
  const auto A = d.A();
  const auto B = d.B();
  const Eigen::Vector2d ref =
      oracle::newton2([&](const Eigen::Vector2d& x) -> Eigen::Vector2d { return x - A(x) - B(x); }, Eigen::Vector2d::Zero());
  EXPECT_LT((r.u - ref).norm(), 1e-8);
  for (std::size_t k = 1; k < r.defects.size(); ++k) EXPECT_LT(r.defects[k], r.defects[k - 1]);
}

TEST(Engine, CondKrasDetectsLeavingTheSet) {
  auto d = sandbox::condkras_demo();
  d.box = 0.5;
  EXPECT_THROW(solve_condkras(d.A(), d.B(), d.D(), d.m(), sandbox::plane()), InvarianceViolation);
}

TEST(Engine, RadialProjection) {
  const auto space = sandbox::plane();
  const Vector u = Vector::Constant(2, 3.0);
  EXPECT_NEAR(space->norm(radial_projection(u, 1.0, *space)), 1.0, 1e-15);
  EXPECT_EQ(radial_projection(u, 10.0, *space), u);
}
