#include "hybridbvp/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "hybridbvp/errors.hpp"
#include "hybridbvp/poincare.hpp"

namespace hybridbvp {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void ProblemSpec::validate() const {
  first.validate();
  second.validate();
  if (n_cells < 4) throw InvalidArgument("problem: n_cells must be at least 4");
  for (double t : {tol.inner, tol.outer, tol.c, tol.residual, tol.gamma, tol.boundary}) {
    if (!(t > 0.0)) throw InvalidArgument("problem: tolerances must be positive");
  }
  if (radius && !(*radius >= 0.0)) throw InvalidArgument("problem: radius must be >= 0");
  if (!(sigma.alpha >= 0.0 && sigma.beta >= 0.0 && sigma.exponent >= 0.0)) {
    throw InvalidArgument("problem: sigma, alpha, beta must be >= 0");
  }
}

CheckReport check_sigma_condition(const ProblemSpec& spec, std::size_t random_points) {
  const double p = spec.first.p;
  const double q = spec.second.g.q;
  const double r = spec.second.g.r;
  const double bound = r > 0.0 ? (p - 1.0) * (q - 1.0) / r : std::numeric_limits<double>::infinity();

  CheckReport report;
  report.items.push_back({"sigma < (p-1)(q-1)/r", spec.sigma.exponent < bound, bound - spec.sigma.exponent, {},
                          "sigma = " + fmt(spec.sigma.exponent) + ", bound = " + fmt(bound)});

  CheckItem item{"delta(y)/m(y) <= alpha y^sigma + beta", true, std::numeric_limits<double>::infinity(), {}, {}};
  std::size_t count = 0;
  std::size_t failures = 0;
  auto check = [&](double y) {
    ++count;
    try {
      const double m = spec.first.phi.m(Env{{Var::y, y}});
      if (!(m > 0.0)) throw DomainError("m(y) = " + fmt(m) + " is not positive");
      const double ratio = spec.first.f.delta(Env{{Var::v, y}}) / m;
      const double rhs = spec.sigma.alpha * std::pow(y, spec.sigma.exponent) + spec.sigma.beta;
      const double rel = (rhs - ratio) / (1.0 + std::abs(rhs));
      if (rel < -1e-12) ++failures;
      if (rel < item.worst_margin) {
        item.worst_margin = rel;
        item.witness = "y = " + fmt(y) + ": delta/m = " + fmt(ratio) + ", bound = " + fmt(rhs);
      }
    } catch (const DomainError& e) {
      ++failures;
      item.worst_margin = -std::numeric_limits<double>::infinity();
      item.witness = "y = " + fmt(y) + ": " + e.what();
    }
  };
  for (int k = 0; k <= 1000; ++k) check(static_cast<double>(k));
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uy(0.0, 1000.0);
  for (std::size_t i = 0; i < random_points; ++i) check(uy(rng));
  item.passed = failures == 0;
  item.detail = std::to_string(count) + " points, " + std::to_string(failures) + " violations";
  report.items.push_back(item);
  return report;
}

double x_max(const ProblemSpec& spec, double lambda_p, double y) {
  return gamma_root(y, spec.first, lambda_p, CoercivityConstant::holder);
}

double radius_psi(const ProblemSpec& spec, double x, double y) { return boundedness_rhs(spec.second, x, y); }

std::pair<double, double> radius_phi(const ProblemSpec& spec, double lambda_p, double R) {
  auto value = [&](double y) { return radius_psi(spec, x_max(spec, lambda_p, y), y); };
  constexpr int kScan = 1000;
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  int best_k = 0;
  for (int k = 0; k < kScan; ++k) {
    const double y = R * k / (kScan - 1);
    const double f = value(y);
    if (f > best) {
      best = f;
      arg = y;
      best_k = k;
    }
  }
  // Refine tenfold on the neighbouring scan intervals.
  const double lo = R * std::max(best_k - 1, 0) / (kScan - 1);
  const double hi = R * std::min(best_k + 1, kScan - 1) / (kScan - 1);
  for (int k = 0; k <= 20; ++k) {
    const double y = lo + (hi - lo) * k / 20.0;
    const double f = value(y);
    if (f > best) {
      best = f;
      arg = y;
    }
  }
  return {best, arg};
}

RadiusResult radius_R(const ProblemSpec& spec, double lambda_p, double y_max_scan, double tol) {
  RadiusResult out;
  out.lambda_p = lambda_p;
  const auto& g = spec.second.g;
  const double e = 1.0 / (g.q - 1.0);
  out.a = boundedness_slope(spec.second);
  out.b = std::pow(2.0 * g.A, e);
  out.c = std::pow(2.0 * g.B, e);
  out.d = spec.second.h.beta1 * total_variation(spec.second.h.A1) +
          spec.second.h.beta0 * total_variation(spec.second.h.A0);
  if (!(out.a < 1.0)) {
    throw InvalidArgument("radius_R: a = " + fmt(out.a) + " is not < 1; the invariant-ball estimate fails");
  }

  auto passes = [&](double R) {
    const auto [phi, arg] = radius_phi(spec, lambda_p, R);
    return std::make_tuple(phi <= R, phi, arg);
  };

  const double floor = radius_phi(spec, lambda_p, 0.0).first;  // Phi(R) >= Phi(0)
  if (floor > y_max_scan) return out;
  double lo = 0.0;
  double hi = floor;
  auto [ok, phi, arg] = passes(hi);
  while (!ok) {
    lo = hi;
    hi = hi > 0.0 ? 2.0 * hi : 1.0;
    if (hi > y_max_scan) {
      hi = y_max_scan;
      std::tie(ok, phi, arg) = passes(hi);
      if (!ok) return out;
      break;
    }
    std::tie(ok, phi, arg) = passes(hi);
  }
  for (int k = 0; k < 200 && hi - lo > tol * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto [ok_mid, phi_mid, arg_mid] = passes(mid);
    if (ok_mid) {
      hi = mid;
      phi = phi_mid;
      arg = arg_mid;
    } else {
      lo = mid;
    }
  }
  out.R = hi;
  out.phi_at_R = phi;
  out.argmax_y = arg;
  return out;
}

AssumptionSummary check_problem(const ProblemSpec& spec) {
  spec.validate();
  AssumptionSummary out;
  out.lambda_p = poincare_constant(spec.first.p, spec.n_cells);
  out.report.append(check_phi_f_assumptions(spec.first));
  CoercivitySampling sampling;
  sampling.seed = spec.seed;
  try {
    out.report.append(check_coercivity(spec.first, Grid(spec.n_cells), out.lambda_p, sampling));
  } catch (const Error& e) {
    out.report.items.push_back({"coercivity", false, -1.0, {}, e.what()});
  }
  out.report.append(check_g_assumptions(spec.second));
  out.report.append(check_sigma_condition(spec));
  try {
    out.radius = radius_R(spec, out.lambda_p);
    out.report.items.push_back({"invariant ball radius R", out.radius.R.has_value(),
                                out.radius.R ? *out.radius.R - out.radius.phi_at_R : -1.0, {},
                                out.radius.R ? "R = " + fmt(*out.radius.R) : "no R within the scan"});
  } catch (const Error& e) {
    out.report.items.push_back({"invariant ball radius R", false, -1.0, {}, e.what()});
  }
  return out;
}

SystemSolution solve_system(const ProblemSpec& spec, const SolveOptions& options) {
  spec.validate();
  const Grid grid(spec.n_cells);
  SolveReport report;
  report.problem = spec.name;
  report.n_cells = spec.n_cells;
  report.nested_inner = spec.nested_inner;
  report.eps_schedule = spec.eps_schedule;
  report.tolerances = spec.tol;

  if (options.run_checks) {
    auto summary = check_problem(spec);
    report.assumptions = summary.report;
    if (options.enforce_checks && !summary.report.passed()) {
      for (const auto& item : summary.report.items) {
        if (!item.passed) throw InvalidArgument("assumption check failed: " + item.name + " (" + item.witness + ")");
      }
    }
  }

  report.lambda_p = poincare_constant(spec.first.p, spec.n_cells);
  if (spec.radius) {
    report.R_used = *spec.radius;
    report.radius_forced = true;
    report.radius.lambda_p = report.lambda_p;
  } else {
    try {
      report.radius = radius_R(spec, report.lambda_p);
    } catch (const Error& e) {
      throw InvarianceViolation(std::string("no invariant ball radius R: ") + e.what());
    }
    if (!report.radius.R) {
      throw InvarianceViolation("no invariant ball radius R found; supply one to force a solve");
    }
    report.R_used = *report.radius.R;
  }
  // A zero radius still admits v = 0; the engine wants a positive one.
  const double R_engine = std::max(report.R_used, std::numeric_limits<double>::min());

  const auto space = h10_space(spec.n_cells);
  const DualityMap J(space);
  const ParamOperator F = make_operator(spec.first, grid, report.lambda_p);

  NonlocalSpec second = spec.second;
  second.c_tol = spec.tol.c;
  auto nodal = [&grid](const Vector& x) {
    return GridFunction(grid, std::vector<double>(x.data(), x.data() + x.size()));
  };
  CompactMap G;
  G.eval = [&](const Vector& u, const Vector& v) -> Vector {
    const auto ug = with_boundary(grid, u);
    GridFunction out = spec.nested_inner
                           ? fixed_point_T(ug, nodal(v), second, {report.R_used, spec.tol.outer, 500, 1.0}).v
                           : apply_T(ug, nodal(v), second);
    return Eigen::Map<const Vector>(out.values().data(), static_cast<Eigen::Index>(out.size()));
  };
  G.v_norm = [](const Vector& x) { return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0; };
  G.majorant = [&](double x, double y) { return radius_psi(spec, x, y); };

  HybridOptions ho;
  ho.eps_schedule = spec.eps_schedule;
  ho.tol_inner = spec.tol.inner;
  ho.tol_outer = spec.tol.outer;
  ho.max_outer = spec.max_outer;
  ho.v0 = Vector::Zero(static_cast<Eigen::Index>(grid.n_nodes()));
  const HybridResult h = hybrid_solve(F, G, J, R_engine, ho);

  SystemSolution out{with_boundary(grid, h.u), nodal(h.v), std::move(report)};
  SolveReport& rep = out.report;
  rep.trace = h.trace;
  rep.final_eps = h.final_eps;
  rep.stages = h.stages;
  rep.clipped_at_end = h.clipped_at_end;
  rep.eq2_update = h.final_update;
  rep.eq1_residual = dual_norm(assemble_F(out.u, out.v, spec.first), spec.n_cells);
  rep.u_p_norm = p_norm(out.u, spec.first.p);
  rep.v_sup_norm = sup_norm(out.v);
  rep.gamma_at_solution = gamma_eval(rep.u_p_norm, rep.v_sup_norm, spec.first, rep.lambda_p);

  const auto t = apply_T_detailed(out.u, out.v, second);
  rep.c = t.c;
  rep.theta_at_c = t.theta_at_c;
  const auto ver = verify_nonlocal_solution(out.u, out.v, second, std::nullopt, spec.tol.boundary);
  rep.eq2_classical = ver.interior_residual;
  rep.eq2_classical_tol = ver.interior_tolerance;
  rep.boundary_left = ver.left_error;
  rep.boundary_right = ver.right_error;

  auto add = [&](std::string name, double value, double tolerance) {
    rep.post_checks.push_back({std::move(name), value <= tolerance, value, tolerance});
  };
  add("equation 1 dual residual", rep.eq1_residual, spec.tol.residual);
  add("equation 2 fixed-point update", rep.eq2_update, spec.tol.outer);
  add("equation 2 classical residual", rep.eq2_classical, rep.eq2_classical_tol);
  add("boundary identity at 0", rep.boundary_left, spec.tol.boundary);
  add("boundary identity at 1", rep.boundary_right, spec.tol.boundary);
  add("gamma(||u||_p, ||v||_inf)", rep.gamma_at_solution, spec.tol.gamma);
  add("||v||_inf <= R", rep.v_sup_norm, rep.R_used * (1.0 + 1e-12));
  rep.post_checks.push_back({"ball not clipped at termination", !rep.clipped_at_end, rep.clipped_at_end ? 1.0 : 0.0, 0.0});

  rep.converged = h.converged;
  for (const auto& c : rep.post_checks) rep.converged = rep.converged && c.passed;
  return out;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

ProblemSpec base(std::string name, double p, std::string_view f, std::string_view delta, double q,
                 std::string_view g) {
  ProblemSpec s;
  s.name = std::move(name);
  s.first.p = p;
  s.first.phi = PhiSpec::parse("1", "1", "1");
  s.first.f = FSpec::parse(f, delta);
  s.second.g.q = q;
  s.second.g.g = parse(g, {Var::t, Var::u, Var::v});
  return s;
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"paper-example", "manufactured-p2", "manufactured-p3", "manufactured-q2",
          "manufactured-q2-sin", "decoupled", "zero"};
}

ProblemSpec registry(const std::string& name) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (name == "paper-example") {
    auto s = base(name, 3.0, "abs(v)^2 - v^2*u^5 - v^4*u + t^2", "v^2 + 1", 4.0,
                  "v*cos(v) + u*sqrt(abs(u)) + cos(u) + v*sin(t)");
    s.second.g.A = 1.0;
    s.second.g.B = 2.0;
    s.second.g.C = 1.0;
    s.second.g.r = 1.5;
    s.second.g.theta = 1.0;
    s.second.h.h0 = parse("sin(v)", {Var::v});
    s.second.h.h1 = parse("cos(v)", {Var::v});
    s.second.h.beta0 = 1.0;
    s.second.h.beta1 = 1.0;
    s.second.h.A0 = BVFunction::linear(0.5);
    s.second.h.A1 = BVFunction::linear(0.5);
    s.sigma = {2.0, 1.0, 1.0};
    return s;
  }
  if (name == "manufactured-p2") {
    auto s = base(name, 2.0, "pi^2*sin(pi*t) - u + sin(pi*t)", "pi^2 + 1", 2.0, "0");
    s.sigma = {0.0, 0.0, pi2 + 1.0};
    return s;
  }
  if (name == "manufactured-p3") {
    auto s = base(name, 3.0, "4*abs(1 - 2*t)", "4", 2.0, "0");
    s.sigma = {0.0, 0.0, 4.0};
    return s;
  }
  if (name == "manufactured-q2") {
    auto s = base(name, 2.0, "0", "0", 2.0, "6*t");
    s.second.g.C = 6.0;
    s.n_cells = 512;
    return s;
  }
  if (name == "manufactured-q2-sin") {
    auto s = base(name, 2.0, "0", "0", 2.0, "pi^2*sin(pi*t)");
    s.second.g.C = pi2;
    s.n_cells = 512;
    return s;
  }
  if (name == "decoupled") {
    auto s = base(name, 2.0, "pi^2*sin(pi*t) - u + sin(pi*t)", "pi^2 + 1", 2.0, "6*t");
    s.second.g.C = 6.0;
    s.sigma = {0.0, 0.0, pi2 + 1.0};
    return s;
  }
  if (name == "zero") return base(name, 2.0, "0", "0", 2.0, "0");
  throw InvalidArgument("unknown problem '" + name + "'");
}

}  // namespace hybridbvp
