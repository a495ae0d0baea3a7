#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hybridbvp {

/// Symmetric tridiagonal matrix: `diag` of size n, `off` of size n - 1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }
  std::vector<double> multiply(std::span<const double> x) const;
};

/// Thomas algorithm. Throws InvalidArgument on a zero pivot.
std::vector<double> solve(const SymTridiagonal& a, std::span<const double> rhs);

/// Dirichlet stiffness tridiag(-1, 2, -1) / h on the interior nodes of a
/// uniform grid with n_cells cells.
SymTridiagonal stiffness_matrix(std::size_t n_cells);
/// Consistent P1 mass matrix tridiag(1, 4, 1) * h / 6 on the interior nodes.
SymTridiagonal mass_matrix(std::size_t n_cells);

}  // namespace hybridbvp
