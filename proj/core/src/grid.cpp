#include "hybridbvp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

Grid::Grid(std::size_t n_cells) : n_cells_(n_cells) {
  if (n_cells == 0) throw InvalidArgument("grid needs at least one cell");
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
  return out;
}

std::size_t Grid::cell_of(double t) const noexcept {
  if (t <= 0.0) return 0;
  auto k = static_cast<std::size_t>(std::floor(t * static_cast<double>(n_cells_)));
  return std::min(k, n_cells_ - 1);
}

Grid make_grid(std::size_t n_cells) { return Grid(n_cells); }

const CellQuadrature& cell_quadrature(QuadratureRule rule) {
  static const CellQuadrature gauss2{
      {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)}, {0.5, 0.5}};
  static const CellQuadrature midpoint{{0.5}, {1.0}};
  return rule == QuadratureRule::gauss2 ? gauss2 : midpoint;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t pieces,
                 QuadratureRule rule) {
  if (pieces == 0) throw InvalidArgument("integrate: pieces must be positive");
  const auto& q = cell_quadrature(rule);
  const double w = (b - a) / static_cast<double>(pieces);
  double sum = 0.0;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double left = a + w * static_cast<double>(k);
    for (std::size_t g = 0; g < q.weights.size(); ++g) {
      sum += q.weights[g] * f(left + q.abscissae[g] * w);
    }
  }
  return sum * w;
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_nodes()) {
    throw InvalidArgument("grid function needs n_cells + 1 values, got " +
                          std::to_string(values_.size()));
  }
}

GridFunction GridFunction::zeros(Grid grid) {
  return GridFunction(grid, std::vector<double>(grid.n_nodes(), 0.0));
}

GridFunction GridFunction::interpolate(Grid grid, const std::function<double(double)>& f) {
  std::vector<double> values(grid.n_nodes());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(grid.node(i));
  return GridFunction(grid, std::move(values));
}

double GridFunction::operator()(double t) const noexcept {
  const std::size_t k = grid_.cell_of(t);
  const double local = (t - grid_.node(k)) / grid_.h();
  return values_[k] + local * (values_[k + 1] - values_[k]);
}

double GridFunction::slope(std::size_t cell) const noexcept {
  return (values_[cell + 1] - values_[cell]) / grid_.h();
}

bool GridFunction::is_dirichlet(double tol) const noexcept {
  return std::abs(values_.front()) <= tol && std::abs(values_.back()) <= tol;
}

double p_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("p_norm: need finite p >= 1");
  double sum = 0.0;
  for (std::size_t k = 0; k < u.grid().n_cells(); ++k) sum += std::pow(std::abs(u.slope(k)), p);
  return std::pow(sum * u.grid().h(), 1.0 / p);
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

double lp_norm(const GridFunction& u, double p, QuadratureRule rule) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("lp_norm: need finite p >= 1");
  const auto& q = cell_quadrature(rule);
  const double h = u.grid().h();
  double sum = 0.0;
  for (std::size_t k = 0; k < u.grid().n_cells(); ++k) {
    for (std::size_t g = 0; g < q.weights.size(); ++g) {
      const double x = u[k] + q.abscissae[g] * (u[k + 1] - u[k]);
      sum += q.weights[g] * std::pow(std::abs(x), p);
    }
  }
  return std::pow(sum * h, 1.0 / p);
}

double integral(const GridFunction& f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < f.grid().n_cells(); ++k) sum += 0.5 * (f[k] + f[k + 1]);
  return sum * f.grid().h();
}

GridFunction volterra(const GridFunction& f) {
  auto out = GridFunction::zeros(f.grid());
  const double h = f.grid().h();
  double acc = 0.0;
  for (std::size_t k = 0; k < f.grid().n_cells(); ++k) {
    acc += 0.5 * h * (f[k] + f[k + 1]);
    out[k + 1] = acc;
  }
  return out;
}

bool sobolev_check(const GridFunction& u, double p) {
  return sup_norm(u) <= p_norm(u, p) + 1e-12;
}

}  // namespace hybridbvp
