#include "sandbox.hpp"

#include <Eigen/Eigenvalues>

namespace hybridbvp::sandbox {

namespace {

double sym_top(const Eigen::Matrix2d& K) {
  const Eigen::Matrix2d S = 0.5 * (K + K.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues().maxCoeff();
}

}  // namespace

std::shared_ptr<const VecSpace> plane() { return std::make_shared<const VecSpace>(2); }

ParamOperator BrowderMinty::op() const {
  ParamOperator F;
  const Eigen::Matrix2d Mc = M;
  const Eigen::Vector2d bc = b;
  F.eval = [Mc, bc](const Vector& u, const Vector& v) -> Vector {
    return Mc * u + u.array().cube().matrix() - bc - v;
  };
  F.strong_modulus = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(M).eigenvalues().minCoeff();
  F.concurrent_safe = true;
  return F;
}

BrowderMinty browder_minty_demo() {
  BrowderMinty d;
  d.M << 2.0, 0.5, 0.5, 1.0;
  d.b << 3.0, -1.0;
  return d;
}

VectorMap Lambda0Demo::A() const {
  return [K = K, a = a](const Vector& u) -> Vector { return a + K * u; };
}
VectorMap Lambda0Demo::B() const {
  return [N = N, b0 = b0](const Vector& u) -> Vector { return b0 + N * u; };
}
double Lambda0Demo::m() const { return sym_top(K); }

Lambda0Demo lambda0_demo() {
  Lambda0Demo d;
  d.K << 0.3, 0.4, -0.4, 0.2;
  d.a << 1.0, -0.5;
  d.N << 0.1, -0.2, 0.05, 0.1;
  d.b0 << 0.5, 0.25;
  return d;
}

VectorMap CondKrasDemo::A() const {
  return [K = K, a = a](const Vector& u) -> Vector { return a + K * u; };
}
VectorMap CondKrasDemo::B() const {
  return [c = c](const Vector& u) -> Vector { return (0.4 * u.array().tanh()).matrix() + c; };
}
ConvexSet CondKrasDemo::D() const {
  const double r = box;
  return {[r](const Vector& u) { return u.cwiseAbs().maxCoeff() <= r; },
          [r](const Vector& u) -> Vector { return u.cwiseMax(-r).cwiseMin(r); }};
}
double CondKrasDemo::m() const { return sym_top(K); }

CondKrasDemo condkras_demo() {
  CondKrasDemo d;
  d.K << 0.3, 0.4, -0.4, 0.2;
  d.a << 1.0, -0.5;
  d.c << 0.2, 0.1;
  return d;
}

}  // namespace hybridbvp::sandbox
