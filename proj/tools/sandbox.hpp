#pragma once

#include <memory>

#include <hybridbvp/engine.hpp>

namespace hybridbvp::sandbox {

/// Two-dimensional demos of the abstract engine. Each problem is small
/// enough to be solved directly, which the tests use as the reference.

/// F(u, v) = M u + u^3 - b - v on R^2 (componentwise cube), M symmetric
/// positive definite, so F is strongly monotone with modulus lambda_min(M).
struct BrowderMinty {
  Eigen::Matrix2d M;
  Eigen::Vector2d b;
  ParamOperator op() const;
};
BrowderMinty browder_minty_demo();

/// u = A(u) + lambda B(P_r(u)) with A(u) = a + K u and B(u) = b0 + N u.
/// The symmetric part of K has top eigenvalue 0.3.
struct Lambda0Demo {
  Eigen::Matrix2d K;
  Eigen::Vector2d a;
  Eigen::Matrix2d N;
  Eigen::Vector2d b0;
  VectorMap A() const;
  VectorMap B() const;
  double m() const;
};
Lambda0Demo lambda0_demo();

/// u = A(u) + B(u) on the box [-5, 5]^2 with A(u) = a + K u and
/// B(u) = 0.4 tanh(u) + c componentwise.
struct CondKrasDemo {
  Eigen::Matrix2d K;
  Eigen::Vector2d a;
  Eigen::Vector2d c;
  double box = 5.0;
  VectorMap A() const;
  VectorMap B() const;
  ConvexSet D() const;
  double m() const;
};
CondKrasDemo condkras_demo();

std::shared_ptr<const VecSpace> plane();

}  // namespace hybridbvp::sandbox
