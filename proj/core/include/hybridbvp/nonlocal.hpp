#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hybridbvp/bv_function.hpp"
#include "hybridbvp/check_report.hpp"
#include "hybridbvp/expr.hpp"
#include "hybridbvp/grid.hpp"

namespace hybridbvp {

/// g(t, u, v) with |g| <= A|u|^r + B|v|^theta + C for large |u|, |v|.
struct GSpec {
  double q = 2.0;
  Expr g{0.0};  // over t, u, v
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double r = 0.0;
  double theta = 0.0;

  static GSpec parse(double q, std::string_view g, double A, double B, double C, double r, double theta);
  /// Throws InvalidArgument unless q > 1, A, B, C, r >= 0 and 0 <= theta < q - 1.
  void validate() const;
};

/// Boundary data v(0) = int h0(v) dA0, v(1) = int h1(v) dA1 with
/// |h_j(v)| <= alpha_j |v| + beta_j.
struct HSpec {
  Expr h0{0.0};  // over v
  Expr h1{0.0};  // over v
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  BVFunction A0 = BVFunction::linear(0.0);
  BVFunction A1 = BVFunction::linear(0.0);

  void validate() const;
};

struct NonlocalSpec {
  GSpec g;
  HSpec h;
  QuadratureRule rule = QuadratureRule::gauss2;
  double c_tol = 1e-10;

  void validate() const {
    g.validate();
    h.validate();
  }
};

/// Sub-intervals per cell for the psi_q^{-1} integral when q != 2.
inline constexpr std::size_t kFluxPieces = 4;

/// |z|^{q-2} z and its inverse |x|^{1/(q-1) - 1} x.
double psi_q(double z, double q);
double psi_q_inv(double x, double q);

/// Quantities of one application of T(u, .) at v.
struct TApplication {
  GridFunction value;
  double c = 0.0;
  double theta_at_c = 0.0;  // Theta(c)
  double h0_integral = 0.0; // int h0(v) dA0 = T(u, v)(0)
  double h1_integral = 0.0; // int h1(v) dA1
  double ng_sup = 0.0;      // ||N_g(u, v)||_inf over nodes and quadrature points
  std::pair<double, double> bracket;  // a-priori interval for c
};

/// Theta(c) = int_0^1 psi_q^{-1}(c - V N_g(s)) ds + int h0 dA0 - int h1 dA1, the
/// Volterra term integrated per cell and interpolated by cubic Hermite. For
/// q != 2 the outer integral uses the exact mean of psi_q^{-1} over the linear
/// interpolant of c - V N_g on kFluxPieces sub-intervals per cell.
class ThetaFunction {
 public:
  ThetaFunction(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec);

  double operator()(double c) const;
  /// Nodal T values for a given c: h0 integral + cumulative integral.
  std::vector<double> primitive(double c) const;

  double h0_integral() const noexcept { return s0_; }
  double h1_integral() const noexcept { return s1_; }
  double ng_sup() const noexcept { return ng_sup_; }
  /// psi_q(int h1 dA1 - int h0 dA0) -/+ ||N_g||_inf.
  std::pair<double, double> apriori_bracket() const;
  const std::vector<double>& volterra_nodes() const noexcept { return w_; }

 private:
  double w_at(std::size_t cell, double xi) const;
  /// Mean of psi_q^{-1}(c - V N_g) over a cell.
  double cell_integral(std::size_t cell, double c) const;

  Grid grid_;
  double q_;
  QuadratureRule rule_;
  std::vector<double> w_;   // V N_g at the nodes
  std::vector<double> dw_;  // g at the nodes
  double s0_ = 0.0;
  double s1_ = 0.0;
  double ng_sup_ = 0.0;
};

/// The unique root of Theta: bisection from the a-priori bracket (widened
/// by doubling if rounding demands it) to |Theta(c)| <= tol. Throws
/// NonConvergence after 200 halvings without reaching tol.
double find_c(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec,
              std::optional<double> tol = std::nullopt);

TApplication apply_T_detailed(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec);
GridFunction apply_T(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec);

struct FixedPointOptions {
  double R = std::numeric_limits<double>::infinity();
  double tol = 1e-10;
  std::size_t max_iter = 500;
  double initial_damping = 1.0;
};

struct FixedPointResult {
  GridFunction v;
  std::size_t iterations = 0;    // damped updates applied
  std::vector<double> defects;   // ||T(u, v_k) - v_k||_inf
  bool left_ball = false;        // some iterate had ||v||_inf > R
  double c = 0.0;
};

/// Damped Picard v <- v + s (T(u, v) - v) until ||T(u, v) - v||_inf <= tol;
/// returns T(u, v) at that point. Throws NonConvergence with the defect trace.
FixedPointResult fixed_point_T(const GridFunction& u, const GridFunction& v0, const NonlocalSpec& spec,
                               const FixedPointOptions& options = {});

/// a = alpha1 Var A1 + 2 alpha0 Var A0 of the boundedness estimate.
double boundedness_slope(const NonlocalSpec& spec);

/// a y + beta1 Var A1 + beta0 Var A0 + (2A x^r + 2C)^{1/(q-1)} + (2B)^{1/(q-1)} y^{theta/(q-1)}:
/// bound on ||T(u, v)||_inf for ||u||_inf <= x, ||v||_inf <= y.
double boundedness_rhs(const NonlocalSpec& spec, double x, double y);

struct SchauderRadius {
  double R = 0.0;
  double a = 0.0;
};

/// Least R with boundedness_rhs(x, R) <= R (bisection to relative 1e-12).
/// Throws InvalidArgument when a >= 1.
SchauderRadius schauder_radius(const NonlocalSpec& spec, double x);

struct GLattice {
  double large_min = 10.0;
  double large_max = 1000.0;
  std::size_t large_points = 21;   // log-spaced, both signs
  std::size_t t_points = 11;
  double h_range = 1000.0;
  std::size_t h_points = 201;
  std::size_t random_points = 1000;
  std::uint64_t seed = 42;
};

/// (G0) integrators of bounded variation, (G1) growth of |g| on large
/// |u|, |v|, (G2) bounds on h_j, (G3) the variation condition.
CheckReport check_g_assumptions(const NonlocalSpec& spec, const GLattice& lattice = {});

struct NonlocalVerification {
  CheckReport report;
  double interior_residual = 0.0;  // max over interior nodes
  double interior_tolerance = 0.0;
  std::size_t worst_node = 0;
  double left_error = 0.0;         // |v(0) - int h0(v) dA0|
  double right_error = 0.0;        // |v(1) - int h1(v) dA1|
};

/// Classical residual: central differences of psi_q(v') against -g at the
/// interior nodes, within tol (1 + ||g||_inf), tol = 10 h by default; both
/// boundary identities within boundary_tol. The nodal psi_q(v') is the value
/// of the function linear across the two adjacent cells whose psi_q^{-1} has
/// the cells' slopes as means, so it stays accurate where v' changes sign
/// and q > 2 (a plain difference of slopes does not).
NonlocalVerification verify_nonlocal_solution(const GridFunction& u, const GridFunction& v,
                                              const NonlocalSpec& spec,
                                              std::optional<double> tol = std::nullopt,
                                              double boundary_tol = 1e-8);

}  // namespace hybridbvp
