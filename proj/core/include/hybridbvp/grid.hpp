#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hybridbvp {

/// Uniform partition of [0, 1] into `n_cells` cells. Node i sits at i / n_cells.
class Grid {
 public:
  explicit Grid(std::size_t n_cells);

  std::size_t n_cells() const noexcept { return n_cells_; }
  std::size_t n_nodes() const noexcept { return n_cells_ + 1; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_cells_); }
  double node(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(n_cells_);
  }
  std::vector<double> nodes() const;

  /// Cell containing t (the last cell owns t = 1).
  std::size_t cell_of(double t) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_cells_;
};

/// Throws InvalidArgument for n_cells == 0.
Grid make_grid(std::size_t n_cells);

enum class QuadratureRule { gauss2, midpoint };

/// Per-cell rule on the reference cell [0, 1]; weights sum to one.
struct CellQuadrature {
  std::vector<double> abscissae;
  std::vector<double> weights;
};

const CellQuadrature& cell_quadrature(QuadratureRule rule);

/// Composite integral of `f` over [a, b] split into `pieces` equal parts.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t pieces = 1, QuadratureRule rule = QuadratureRule::gauss2);

/// Continuous piecewise-linear function on a Grid, stored by nodal values.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction zeros(Grid grid);
  static GridFunction interpolate(Grid grid, const std::function<double(double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Linear interpolation between nodes.
  double operator()(double t) const noexcept;
  /// Constant derivative on `cell`.
  double slope(std::size_t cell) const noexcept;

  /// True when both endpoint values are within `tol` of zero.
  bool is_dirichlet(double tol = 0.0) const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// W_0^{1,p} norm (integral of |u'|^p)^(1/p); exact for piecewise-linear u.
double p_norm(const GridFunction& u, double p);
double sup_norm(const GridFunction& u);
/// L^p norm of the interpolant by composite quadrature.
double lp_norm(const GridFunction& u, double p, QuadratureRule rule = QuadratureRule::gauss2);
/// Integral of the interpolant over [0, 1] (composite trapezoid, exact).
double integral(const GridFunction& f);
/// Cumulative integral t -> int_0^t f, at the nodes; result(0) = 0.
GridFunction volterra(const GridFunction& f);
/// sup|u| <= p_norm(u, p) + 1e-12.
bool sobolev_check(const GridFunction& u, double p);

}  // namespace hybridbvp
