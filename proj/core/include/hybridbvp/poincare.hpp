#pragma once

#include <cstddef>
#include <cstdint>

#include "hybridbvp/grid.hpp"

namespace hybridbvp {

struct PoincareOptions {
  std::size_t restarts = 10;
  std::uint64_t seed = 42;
  std::size_t max_iter = 50000;
  /// Stop once the relative decrease of the quotient stays below this for
  /// several consecutive accepted steps.
  double rel_tol = 1e-12;
};

struct PoincareResult {
  double value;
  GridFunction eigenfunction;  // normalized so that int |u|^p = 1
  std::size_t iterations;
};

/// Minimizes int|u'|^p / int|u|^p over piecewise-linear Dirichlet functions.
///
/// p = 2 is the generalized tridiagonal eigenproblem K z = lambda M z with the
/// consistent mass matrix, solved by inverse iteration. Other p start from
/// that eigenvector and run Sobolev-preconditioned gradient descent on the
/// quotient with Armijo backtracking, from `restarts` seeded perturbations;
/// the smallest value wins. The discrete value bounds the continuous
/// constant from above and decreases under nested refinement.
PoincareResult poincare_eigenpair(double p, std::size_t n_cells, const PoincareOptions& options = {});

double poincare_constant(double p, std::size_t n_cells, const PoincareOptions& options = {});

}  // namespace hybridbvp
