#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybridbvp/check_report.hpp"
#include "hybridbvp/engine.hpp"
#include "hybridbvp/nonlocal.hpp"
#include "hybridbvp/plaplace.hpp"

namespace hybridbvp {

/// delta(y) / m(y) <= alpha y^exponent + beta.
struct SigmaSpec {
  double exponent = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct Tolerances {
  double inner = 1e-11;     // regularized solve, dual norm
  double outer = 1e-10;     // v-update and ||F(u, v)||_*
  double c = 1e-10;         // |Theta(c)|
  double residual = 1e-6;   // post-check of equation 1
  double gamma = 1e-6;      // post-check gamma(||u||_p, ||v||_inf) <= gamma
  double boundary = 1e-8;   // Stieltjes boundary identities
};

/// The coupled system: the p-Laplacian equation for u (parameter v) and the
/// nonlocal q-Laplacian equation for v (parameter u).
struct ProblemSpec {
  std::string name;
  PLaplaceSpec first;
  NonlocalSpec second;
  SigmaSpec sigma;
  std::size_t n_cells = 256;
  Tolerances tol;
  std::vector<double> eps_schedule = default_epsilon_schedule();
  std::size_t max_outer = 500;
  /// Ball radius; computed by radius_R when absent.
  std::optional<double> radius;
  /// Each G evaluation runs T(u, .) to its fixed point instead of applying T once.
  bool nested_inner = false;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Exponent condition sigma < (p - 1)(q - 1) / r (any sigma when r = 0) and
/// the functional bound on y in [0, 1000] plus seeded points.
CheckReport check_sigma_condition(const ProblemSpec& spec, std::size_t random_points = 1000);

struct RadiusResult {
  std::optional<double> R;
  double lambda_p = 0.0;
  double a = 0.0;  // boundedness_slope
  double b = 0.0;  // (2A)^{1/(q-1)}
  double c = 0.0;  // (2B)^{1/(q-1)}
  double d = 0.0;  // beta1 Var A1 + beta0 Var A0
  double phi_at_R = 0.0;  // sup_{y <= R} psi(x_max(y), y)
  double argmax_y = 0.0;
};

/// x_max(y): largest x with gamma(x, y) <= 0 (Hölder constant).
double x_max(const ProblemSpec& spec, double lambda_p, double y);

/// psi(x, y) = boundedness_rhs with ||u||_inf <= ||u||_p = x.
double radius_psi(const ProblemSpec& spec, double x, double y);

/// Phi(R) = sup_{y in [0, R]} psi(x_max(y), y) by a 1000-point scan refined
/// tenfold around the argmax; returns {Phi, argmax}.
std::pair<double, double> radius_phi(const ProblemSpec& spec, double lambda_p, double R);

/// Least R <= y_max_scan with Phi(R) <= R, by doubling then bisection to
/// relative `tol`; R is empty when none exists. Throws InvalidArgument when
/// a >= 1.
RadiusResult radius_R(const ProblemSpec& spec, double lambda_p, double y_max_scan = 1e6, double tol = 1e-9);

struct PostCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct SolveReport {
  std::string problem;
  std::size_t n_cells = 0;
  bool converged = false;
  bool nested_inner = false;
  std::string start = "u = 0, v = 0";
  double lambda_p = 0.0;
  RadiusResult radius;
  double R_used = 0.0;
  bool radius_forced = false;
  double eq1_residual = 0.0;          // ||F(u, v)||_*
  double eq2_update = 0.0;            // final ||G(S(v), v) - v||_inf
  double eq2_classical = 0.0;         // max interior residual
  double eq2_classical_tol = 0.0;
  double boundary_left = 0.0;
  double boundary_right = 0.0;
  double gamma_at_solution = 0.0;
  double u_p_norm = 0.0;
  double v_sup_norm = 0.0;
  double c = 0.0;
  double theta_at_c = 0.0;
  double final_eps = 0.0;
  std::size_t stages = 0;
  bool clipped_at_end = false;
  std::vector<TraceRow> trace;
  std::vector<PostCheck> post_checks;
  CheckReport assumptions;
  std::vector<double> eps_schedule;
  Tolerances tolerances;
};

struct SystemSolution {
  GridFunction u;
  GridFunction v;
  SolveReport report;
};

struct SolveOptions {
  /// Run check_phi_f_assumptions, check_coercivity, check_g_assumptions and
  /// check_sigma_condition first and include them in the report.
  bool run_checks = false;
  /// Throw InvalidArgument when a check fails (unless false).
  bool enforce_checks = true;
};

/// Hybrid solve of the system: F from the p-Laplacian adapter, G(u, v) =
/// T(u, v) (or its fixed point when nested_inner), inside the ball of radius
/// spec.radius or radius_R. Post-checks fill the report; converged is true
/// only when every post-check passes. Engine NonConvergence propagates.
/// Throws InvarianceViolation when no radius is given and none can be found.
SystemSolution solve_system(const ProblemSpec& spec, const SolveOptions& options = {});

/// All assumption checks for a problem plus the radius, as run by `check`.
struct AssumptionSummary {
  CheckReport report;
  double lambda_p = 0.0;
  RadiusResult radius;
};
AssumptionSummary check_problem(const ProblemSpec& spec);

/// Built-in problems: paper-example, manufactured-p2, manufactured-p3,
/// manufactured-q2, manufactured-q2-sin, decoupled, zero. Throws
/// InvalidArgument for an unknown name.
ProblemSpec registry(const std::string& name);
std::vector<std::string> registry_names();

}  // namespace hybridbvp
