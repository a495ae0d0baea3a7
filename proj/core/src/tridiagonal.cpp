#include "hybridbvp/tridiagonal.hpp"

#include <string>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

std::vector<double> SymTridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> solve(const SymTridiagonal& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n) throw InvalidArgument("tridiagonal solve: size mismatch");
  std::vector<double> c(n), d(n);
  double denom = a.diag[0];
  if (denom == 0.0) throw InvalidArgument("tridiagonal solve: zero pivot at row 0");
  c[0] = n > 1 ? a.off[0] / denom : 0.0;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = a.diag[i] - a.off[i - 1] * c[i - 1];
    if (denom == 0.0) throw InvalidArgument("tridiagonal solve: zero pivot at row " + std::to_string(i));
    c[i] = i + 1 < n ? a.off[i] / denom : 0.0;
    d[i] = (rhs[i] - a.off[i - 1] * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

SymTridiagonal stiffness_matrix(std::size_t n_cells) {
  const double h = 1.0 / static_cast<double>(n_cells);
  const std::size_t n = n_cells - 1;
  return {std::vector<double>(n, 2.0 / h), std::vector<double>(n > 0 ? n - 1 : 0, -1.0 / h)};
}

SymTridiagonal mass_matrix(std::size_t n_cells) {
  const double h = 1.0 / static_cast<double>(n_cells);
  const std::size_t n = n_cells - 1;
  return {std::vector<double>(n, 4.0 * h / 6.0), std::vector<double>(n > 0 ? n - 1 : 0, h / 6.0)};
}

}  // namespace hybridbvp
