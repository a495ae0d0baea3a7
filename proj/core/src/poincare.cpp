#include "hybridbvp/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hybridbvp/errors.hpp"
#include "hybridbvp/tridiagonal.hpp"

namespace hybridbvp {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double signed_pow(double x, double e) { return std::copysign(std::pow(std::abs(x), e), x); }

// Interior values padded with the Dirichlet zeros.
double at(const Vec& interior, std::size_t node) {
  if (node == 0 || node == interior.size() + 1) return 0.0;
  return interior[node - 1];
}

struct Quotient {
  double p;
  std::size_t n_cells;
  double h;

  double numerator(const Vec& u) const {
    double s = 0.0;
    for (std::size_t k = 0; k < n_cells; ++k) s += std::pow(std::abs((at(u, k + 1) - at(u, k)) / h), p);
    return s * h;
  }

  double denominator(const Vec& u) const {
    const auto& q = cell_quadrature(QuadratureRule::gauss2);
    double s = 0.0;
    for (std::size_t k = 0; k < n_cells; ++k) {
      const double a = at(u, k);
      const double b = at(u, k + 1);
      for (std::size_t g = 0; g < q.weights.size(); ++g) {
        s += q.weights[g] * std::pow(std::abs(a + q.abscissae[g] * (b - a)), p);
      }
    }
    return s * h;
  }

  // Gradient of numerator / denominator at u, given both values.
  Vec gradient(const Vec& u, double num, double den) const {
    const auto& q = cell_quadrature(QuadratureRule::gauss2);
    const double ratio = num / den;
    Vec g(u.size(), 0.0);
    for (std::size_t k = 0; k < n_cells; ++k) {
      const double a = at(u, k);
      const double b = at(u, k + 1);
      const double flux = p * signed_pow((b - a) / h, p - 1.0);
      double left = -flux;  // d/du_k
      double right = flux;  // d/du_{k+1}
      for (std::size_t j = 0; j < q.weights.size(); ++j) {
        const double xi = q.abscissae[j];
        const double w = h * q.weights[j] * p * signed_pow(a + xi * (b - a), p - 1.0);
        left -= ratio * w * (1.0 - xi);
        right -= ratio * w * xi;
      }
      if (k >= 1) g[k - 1] += left / den;
      if (k + 1 <= u.size()) g[k] += right / den;
    }
    return g;
  }

  void normalize(Vec& u) const {
    const double scale = std::pow(denominator(u), -1.0 / p);
    for (double& x : u) x *= scale;
  }
};

PoincareResult linear_eigenpair(std::size_t n_cells) {
  const auto k = stiffness_matrix(n_cells);
  const auto m = mass_matrix(n_cells);
  const Grid grid(n_cells);
  Vec z(n_cells - 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double t = grid.node(i + 1);
    z[i] = t * (1.0 - t);
  }
  double lambda = 0.0;
  std::size_t it = 0;
  for (; it < 200; ++it) {
    auto next = solve(k, m.multiply(z));
    const double norm = std::sqrt(dot(next, m.multiply(next)));
    for (double& x : next) x /= norm;
    const double updated = dot(next, k.multiply(next));
    z = std::move(next);
    const bool done = it > 0 && std::abs(updated - lambda) <= 1e-15 * updated;
    lambda = updated;
    if (done) break;
  }
  Vec values(n_cells + 1, 0.0);
  std::copy(z.begin(), z.end(), values.begin() + 1);
  return {lambda, GridFunction(grid, std::move(values)), it + 1};
}

struct DescentOutcome {
  double value;
  Vec u;
  std::size_t iterations;
  bool converged;
};

DescentOutcome descend(const Quotient& rq, const SymTridiagonal& stiffness, Vec u,
                       const PoincareOptions& options) {
  rq.normalize(u);
  double num = rq.numerator(u);
  double den = rq.denominator(u);
  double value = num / den;
  double tau = 1.0;
  std::size_t quiet = 0;
  constexpr std::size_t kQuietSteps = 8;
  constexpr double kArmijo = 1e-4;

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const Vec grad = rq.gradient(u, num, den);
    const Vec dir = solve(stiffness, grad);
    const double slope = dot(grad, dir);
    if (!(slope > 0.0)) return {value, u, it, true};

    tau = std::min(tau * 2.0, 1e6);
    Vec trial(u.size());
    double trial_value = value;
    bool accepted = false;
    for (int halving = 0; halving < 80; ++halving) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - tau * dir[i];
      trial_value = rq.numerator(trial) / rq.denominator(trial);
      if (trial_value <= value - kArmijo * tau * slope) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) return {value, u, it, true};  // no representable decrease left

    rq.normalize(trial);
    u = std::move(trial);
    num = rq.numerator(u);
    den = rq.denominator(u);
    const double decrease = (value - trial_value) / value;
    value = num / den;
    quiet = decrease < options.rel_tol ? quiet + 1 : 0;
    if (quiet >= kQuietSteps) return {value, u, it + 1, true};
  }
  return {value, u, options.max_iter, false};
}

}  // namespace

PoincareResult poincare_eigenpair(double p, std::size_t n_cells, const PoincareOptions& options) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("poincare_constant: need finite p > 1");
  if (n_cells < 2) throw InvalidArgument("poincare_constant: need at least two cells");

  auto linear = linear_eigenpair(n_cells);
  if (p == 2.0) return linear;

  const Grid grid(n_cells);
  const Quotient rq{p, n_cells, grid.h()};
  const auto stiffness = stiffness_matrix(n_cells);
  const Vec base(linear.eigenfunction.values().begin() + 1, linear.eigenfunction.values().end() - 1);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coeff(-0.3, 0.3);

  DescentOutcome best{std::numeric_limits<double>::infinity(), {}, 0, false};
  std::size_t total_iterations = 0;
  const std::size_t starts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t start = 0; start < starts; ++start) {
    Vec u0 = base;
    if (start > 0) {
      // Smooth Dirichlet perturbation by the next few sine modes.
      const double scale = std::sqrt(2.0);
      for (int mode = 2; mode <= 4; ++mode) {
        const double c = coeff(rng) * scale;
        for (std::size_t i = 0; i < u0.size(); ++i) {
          u0[i] += c * std::sin(mode * std::numbers::pi * grid.node(i + 1));
        }
      }
    }
    auto outcome = descend(rq, stiffness, std::move(u0), options);
    total_iterations += outcome.iterations;
    if (!outcome.converged) {
      throw NonConvergence("poincare_constant: descent did not settle within " +
                               std::to_string(options.max_iter) + " iterations (p = " +
                               std::to_string(p) + ", restart " + std::to_string(start) + ")",
                           {outcome.value});
    }
    if (outcome.value < best.value) best = std::move(outcome);
  }

  Vec values(n_cells + 1, 0.0);
  std::copy(best.u.begin(), best.u.end(), values.begin() + 1);
  return {best.value, GridFunction(grid, std::move(values)), total_iterations};
}

double poincare_constant(double p, std::size_t n_cells, const PoincareOptions& options) {
  return poincare_eigenpair(p, n_cells, options).value;
}

}  // namespace hybridbvp
