#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "hybridbvp/check_report.hpp"
#include "hybridbvp/engine.hpp"
#include "hybridbvp/expr.hpp"
#include "hybridbvp/grid.hpp"

namespace hybridbvp {

/// phi(t, y, r) with bounds m(y) <= phi <= M(y).
struct PhiSpec {
  Expr phi{1.0};  // over t, y, r
  Expr m{1.0};    // over y
  Expr M{1.0};    // over y

  static PhiSpec parse(std::string_view phi, std::string_view m, std::string_view M);
};

struct FSpec {
  Expr f{0.0};      // over t, u, v
  Expr delta{0.0};  // over v

  static FSpec parse(std::string_view f, std::string_view delta);
};

/// -(phi(t, v, |u'|^{p-1}) |u'|^{p-2} u')' = f(t, u, v), u(0) = u(1) = 0.
struct PLaplaceSpec {
  double p = 2.0;
  PhiSpec phi;
  FSpec f;
  QuadratureRule rule = QuadratureRule::gauss2;

  /// Throws InvalidArgument for p < 2 or non-finite p.
  void validate() const;
};

/// Pairings of a residual with the interior hat functions (n_cells - 1).
using DualVector = Vector;

/// <F(u, v), w_i> = int phi psi_p(u') w_i' - int f(t, u, v) w_i, cellwise
/// Gauss quadrature. u must vanish at both ends. DomainError from an
/// expression is rethrown naming the cell.
DualVector assemble_F(const GridFunction& u, const GridFunction& v, const PLaplaceSpec& spec);

/// H^1_0 inner product on the interior nodes: Gram = tridiag(-1, 2, -1) / h.
std::shared_ptr<const VecSpace> h10_space(std::size_t n_cells);

/// Interior values <-> Dirichlet grid functions.
Vector interior(const GridFunction& u);
GridFunction with_boundary(const Grid& grid, const Vector& interior_values);

/// Which constant multiplies delta(y) x in the coercivity minorant.
///   holder: lambda_p^{-1/p}, from Hölder and the Poincaré inequality.
///   paper:  1 / lambda_p, as printed; not a valid lower bound in general.
enum class CoercivityConstant { holder, paper };

/// gamma(x, y) = m(y) x^p - k(lambda_p) delta(y) x.
double gamma_eval(double x, double y, const PLaplaceSpec& spec, double lambda_p,
                  CoercivityConstant constant = CoercivityConstant::holder);

/// Largest x with gamma(x, y) <= 0.
double gamma_root(double y, const PLaplaceSpec& spec, double lambda_p,
                  CoercivityConstant constant = CoercivityConstant::holder);

/// F as an engine operator on (interior u, nodal v). Supplies the
/// tangent preconditioner and, for p = 2, the modulus m(||v||_inf).
ParamOperator make_operator(const PLaplaceSpec& spec, const Grid& grid,
                            std::optional<double> lambda_p = std::nullopt,
                            CoercivityConstant constant = CoercivityConstant::holder);

struct SolveUOptions {
  double eps = 0.0;
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  std::optional<GridFunction> initial_guess;
};

/// u = S_eps(v): zero of F(., v) + eps J on the grid of v.
GridFunction solve_u(const GridFunction& v, const PLaplaceSpec& spec, const SolveUOptions& options = {});

/// Dual norm sqrt(r^T K^{-1} r) of a DualVector.
double dual_norm(const DualVector& r, std::size_t n_cells);

struct CoercivitySampling {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 42;
  double u_amplitude = 2.0;  // sup of the sampled u
  double v_amplitude = 2.0;  // sup of the sampled v
  double slack = 1e-8;
};

/// <F(u, v), u> >= gamma(||u||_p, ||v||_inf) - slack on seeded (u, v).
CheckReport check_coercivity(const PLaplaceSpec& spec, const Grid& grid, double lambda_p,
                             const CoercivitySampling& sampling = {},
                             CoercivityConstant constant = CoercivityConstant::holder);

struct Lattice {
  std::size_t t_points = 11;    // t in {0, 0.1, ..., 1}
  double y_max = 10.0;          // y, u in [-y_max, y_max]
  std::size_t y_points = 21;
  double r_max = 10.0;          // r in [0, r_max]
  std::size_t r_points = 21;
  std::size_t random_points = 1000;
  std::uint64_t seed = 42;
};

/// (Phi3) bounds, (Phi4) r -> phi r nondecreasing, (F2) f nonincreasing in
/// u, (F4) |f(t, 0, y)| <= delta(v) for |y| <= v.
CheckReport check_phi_f_assumptions(const PLaplaceSpec& spec, const Lattice& lattice = {});

}  // namespace hybridbvp
