#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  double fa = f(a);
  for (int k = 0; k < iters; ++k) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline double psi(double z, double q) { return z == 0 ? 0 : std::copysign(std::pow(std::abs(z), q - 1), z); }
inline double psi_inv(double x, double q) {
  return x == 0 ? 0 : std::copysign(std::pow(std::abs(x), 1 / (q - 1)), x);
}

// lambda_p = (p - 1) (2 pi / (p sin(pi / p)))^p
inline double poincare_closed_form(double p) {
  return (p - 1) * std::pow(2 * std::numbers::pi / (p * std::sin(std::numbers::pi / p)), p);
}

// Inverse power iteration for the 1-D p-Laplacian: w solves
// -(psi_p(w'))' = psi_p(u) exactly by integrating twice on a fine grid,
// with the integration constant fixed by w(1) = 0.
inline double poincare_inverse_iteration(double p, int n = 2000, int iters = 40) {
  const double h = 1.0 / n;
  std::vector<double> u(n + 1), F(n + 1), w(n + 1);
  for (int i = 0; i <= n; ++i) u[i] = std::sin(std::numbers::pi * i * h) + 0.3 * i * h * (1 - i * h);
  auto quotient = [&](const std::vector<double>& x) {
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
      num += std::pow(std::abs(x[i + 1] - x[i]) / h, p) * h;
      // Simpson on each cell for int |x|^p of the piecewise-linear x
      const double a = std::abs(x[i]), b = std::abs(x[i + 1]), m = std::abs(0.5 * (x[i] + x[i + 1]));
      den += h / 6 * (std::pow(a, p) + 4 * std::pow(m, p) + std::pow(b, p));
    }
    return num / den;
  };
  for (int k = 0; k < iters; ++k) {
    F[0] = 0;
    for (int i = 0; i < n; ++i) F[i + 1] = F[i] + 0.5 * h * (psi(u[i], p) + psi(u[i + 1], p));
    auto end_value = [&](double c) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += h * psi_inv(c - 0.5 * (F[i] + F[i + 1]), p);
      return s;
    };
    const double c = bisect(end_value, -F[n] - 1, F[n] + 1, 120);
    w[0] = 0;
    for (int i = 0; i < n; ++i) w[i + 1] = w[i] + h * psi_inv(c - 0.5 * (F[i] + F[i + 1]), p);
    double mx = 0;
    for (double x : w) mx = std::max(mx, std::abs(x));
    for (int i = 0; i <= n; ++i) u[i] = w[i] / mx;
  }
  return quotient(u);
}

// Newton's method for a map R^2 -> R^2 with a finite-difference Jacobian.
inline Eigen::Vector2d newton2(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f, Eigen::Vector2d x) {
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d fx = f(x);
    if (fx.norm() < 1e-15) break;
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[j] = 1e-7;
      J.col(j) = (f(x + e) - f(x - e)) / 2e-7;
    }
    x -= J.partialPivLu().solve(fx);
  }
  return x;
}

}  // namespace oracle
