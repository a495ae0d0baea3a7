#include "hybridbvp/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "hybridbvp/engine.hpp"
#include "hybridbvp/errors.hpp"

namespace hybridbvp {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

GSpec GSpec::parse(double q, std::string_view g, double A, double B, double C, double r, double theta) {
  GSpec out{q, hybridbvp::parse(g, {Var::t, Var::u, Var::v}), A, B, C, r, theta};
  out.validate();
  return out;
}

void GSpec::validate() const {
  if (!(q > 1.0) || !std::isfinite(q)) throw InvalidArgument("g: q must be finite and > 1");
  if (!(A >= 0.0 && B >= 0.0 && C >= 0.0 && r >= 0.0)) {
    throw InvalidArgument("g: growth constants A, B, C, r must be >= 0");
  }
  if (!(theta >= 0.0 && theta < q - 1.0)) {
    throw InvalidArgument("g: theta must satisfy 0 <= theta < q - 1 (theta = " + fmt(theta) +
                          ", q = " + fmt(q) + ")");
  }
}

void HSpec::validate() const {
  if (!(alpha0 >= 0.0 && alpha1 >= 0.0 && beta0 >= 0.0 && beta1 >= 0.0)) {
    throw InvalidArgument("h: alpha_j and beta_j must be >= 0");
  }
  for (const Expr* e : {&h0, &h1}) {
    if (e->variables() & ~static_cast<std::uint8_t>(1u << static_cast<unsigned>(Var::v))) {
      throw InvalidArgument("h: boundary functions may only use v");
    }
  }
}

double psi_q(double z, double q) { return std::copysign(std::pow(std::abs(z), q - 1.0), z); }

double psi_q_inv(double x, double q) {
  return std::copysign(std::pow(std::abs(x), 1.0 / (q - 1.0)), x);
}

namespace {

// Mean of psi_q^{-1} over [x, y].
double mean_inverse(double x, double y, double q) {
  const double w = y - x;
  if (std::abs(w) <= 1e-9 * (std::abs(x) + std::abs(y)) || w == 0.0) return psi_q_inv(0.5 * (x + y), q);
  const double e = q / (q - 1.0);
  return (std::pow(std::abs(y), e) - std::pow(std::abs(x), e)) / (e * w);
}

}  // namespace

// ---------------------------------------------------------------------------
// Theta and T
// ---------------------------------------------------------------------------

ThetaFunction::ThetaFunction(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec)
    : grid_(v.grid()), q_(spec.g.q), rule_(spec.rule) {
  spec.validate();
  if (!(u.grid() == v.grid())) throw InvalidArgument("T: u and v live on different grids");
  const std::size_t n = grid_.n_cells();
  const double h = grid_.h();
  const auto& quad = cell_quadrature(rule_);

  auto g = [&](double t, double ut, double vt) {
    const double value = spec.g.g(Env{{Var::t, t}, {Var::u, ut}, {Var::v, vt}});
    ng_sup_ = std::max(ng_sup_, std::abs(value));
    return value;
  };

  w_.assign(n + 1, 0.0);
  dw_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) dw_[i] = g(grid_.node(i), u[i], v[i]);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < quad.weights.size(); ++k) {
      const double xi = quad.abscissae[k];
      s += quad.weights[k] *
           g(grid_.node(c) + xi * h, (1.0 - xi) * u[c] + xi * u[c + 1], (1.0 - xi) * v[c] + xi * v[c + 1]);
    }
    w_[c + 1] = w_[c] + h * s;
  }

  const Expr& h0 = spec.h.h0;
  const Expr& h1 = spec.h.h1;
  s0_ = stieltjes_integral([&](double t) { return h0(Env{{Var::v, v(t)}}); }, spec.h.A0, grid_, rule_);
  s1_ = stieltjes_integral([&](double t) { return h1(Env{{Var::v, v(t)}}); }, spec.h.A1, grid_, rule_);
}

double ThetaFunction::w_at(std::size_t cell, double xi) const {
  const double h = grid_.h();
  const double xi2 = xi * xi;
  const double xi3 = xi2 * xi;
  return (2 * xi3 - 3 * xi2 + 1) * w_[cell] + (xi3 - 2 * xi2 + xi) * h * dw_[cell] +
         (-2 * xi3 + 3 * xi2) * w_[cell + 1] + (xi3 - xi2) * h * dw_[cell + 1];
}

double ThetaFunction::cell_integral(std::size_t cell, double c) const {
  if (q_ == 2.0) {
    const auto& quad = cell_quadrature(rule_);
    double s = 0.0;
    for (std::size_t k = 0; k < quad.weights.size(); ++k) s += quad.weights[k] * (c - w_at(cell, quad.abscissae[k]));
    return s;
  }
  // psi_q^{-1} has an unbounded derivative where c - V N_g crosses zero, which
  // ruins any fixed Gauss rule there. Integrate it exactly against the linear
  // interpolant of c - V N_g on sub-intervals instead; this is also
  // continuous in c, which the root finder relies on.
  double s = 0.0;
  double a = c - w_[cell];
  for (std::size_t k = 1; k <= kFluxPieces; ++k) {
    const double b = c - w_at(cell, static_cast<double>(k) / kFluxPieces);
    s += mean_inverse(a, b, q_);
    a = b;
  }
  return s / kFluxPieces;
}

std::vector<double> ThetaFunction::primitive(double c) const {
  const std::size_t n = grid_.n_cells();
  const double h = grid_.h();
  std::vector<double> out(n + 1);
  out[0] = s0_;
  for (std::size_t cell = 0; cell < n; ++cell) out[cell + 1] = out[cell] + h * cell_integral(cell, c);
  return out;
}

double ThetaFunction::operator()(double c) const { return primitive(c).back() - s1_; }

std::pair<double, double> ThetaFunction::apriori_bracket() const {
  const double centre = psi_q(s1_ - s0_, q_);
  return {centre - ng_sup_, centre + ng_sup_};
}

namespace {

double root_of(const ThetaFunction& theta, double tol) {
  auto [lo, hi] = theta.apriori_bracket();
  // Rounding can put the root a hair outside the analytic bracket.
  double width = std::max(hi - lo, 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)));
  double flo = theta(lo);
  for (int k = 0; flo > 0.0; ++k) {
    if (k > 1100) throw NonConvergence("find_c: could not bracket the root from below", {flo});
    lo -= width;
    width *= 2.0;
    flo = theta(lo);
  }
  double fhi = theta(hi);
  for (int k = 0; fhi < 0.0; ++k) {
    if (k > 1100) throw NonConvergence("find_c: could not bracket the root from above", {fhi});
    hi += width;
    width *= 2.0;
    fhi = theta(hi);
  }
  if (std::abs(flo) <= tol && std::abs(flo) <= std::abs(fhi)) return lo;
  if (std::abs(fhi) <= tol) return hi;

  std::vector<double> trace;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = theta(mid);
    trace.push_back(fm);
    if (std::abs(fm) <= tol) return mid;
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  const double best = std::abs(flo) <= std::abs(fhi) ? lo : hi;
  if (std::min(std::abs(flo), std::abs(fhi)) <= tol) return best;
  throw NonConvergence("find_c: |Theta(c)| stayed above " + fmt(tol) + " (best " +
                           fmt(std::min(std::abs(flo), std::abs(fhi))) + ")",
                       trace);
}

}  // namespace

double find_c(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec, std::optional<double> tol) {
  const ThetaFunction theta(u, v, spec);
  return root_of(theta, tol.value_or(spec.c_tol));
}

TApplication apply_T_detailed(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec) {
  const ThetaFunction theta(u, v, spec);
  const double c = root_of(theta, spec.c_tol);
  auto values = theta.primitive(c);
  const double theta_c = values.back() - theta.h1_integral();
  return {GridFunction(v.grid(), std::move(values)), c, theta_c, theta.h0_integral(),
          theta.h1_integral(), theta.ng_sup(), theta.apriori_bracket()};
}

GridFunction apply_T(const GridFunction& u, const GridFunction& v, const NonlocalSpec& spec) {
  return apply_T_detailed(u, v, spec).value;
}

FixedPointResult fixed_point_T(const GridFunction& u, const GridFunction& v0, const NonlocalSpec& spec,
                               const FixedPointOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("fixed_point_T: tol must be positive");
  FixedPointResult out{v0, 0, {}, sup_norm(v0) > options.R, 0.0};
  DampingPolicy damping(options.initial_damping);
  std::vector<double> defect(v0.size());
  for (std::size_t k = 0; k <= options.max_iter; ++k) {
    auto t = apply_T_detailed(u, out.v, spec);
    double dn = 0.0;
    for (std::size_t i = 0; i < defect.size(); ++i) {
      defect[i] = t.value[i] - out.v[i];
      dn = std::max(dn, std::abs(defect[i]));
    }
    out.defects.push_back(dn);
    if (dn <= options.tol) {
      out.v = std::move(t.value);
      out.c = t.c;
      out.left_ball = out.left_ball || sup_norm(out.v) > options.R;
      return out;
    }
    if (k == options.max_iter) break;
    const double s = damping.next(defect);
    for (std::size_t i = 0; i < defect.size(); ++i) out.v[i] += s * defect[i];
    out.iterations = k + 1;
    if (sup_norm(out.v) > options.R) out.left_ball = true;
  }
  throw NonConvergence("fixed_point_T: no fixed point within " + std::to_string(options.max_iter) +
                           " iterations (last defect " + fmt(out.defects.back()) + ")",
                       out.defects);
}

// ---------------------------------------------------------------------------
// Radius
// ---------------------------------------------------------------------------

double boundedness_slope(const NonlocalSpec& spec) {
  return spec.h.alpha1 * total_variation(spec.h.A1) + 2.0 * spec.h.alpha0 * total_variation(spec.h.A0);
}

double boundedness_rhs(const NonlocalSpec& spec, double x, double y) {
  const auto& g = spec.g;
  const double e = 1.0 / (g.q - 1.0);
  const double v0 = total_variation(spec.h.A0);
  const double v1 = total_variation(spec.h.A1);
  return boundedness_slope(spec) * y + spec.h.beta1 * v1 + spec.h.beta0 * v0 +
         std::pow(2.0 * g.A * std::pow(x, g.r) + 2.0 * g.C, e) +
         std::pow(2.0 * g.B, e) * std::pow(y, g.theta * e);
}

SchauderRadius schauder_radius(const NonlocalSpec& spec, double x) {
  spec.validate();
  const double a = boundedness_slope(spec);
  if (!(a < 1.0)) {
    throw InvalidArgument("schauder_radius: a = alpha1 Var A1 + 2 alpha0 Var A0 = " + fmt(a) +
                          " is not < 1; (G3) fails for this estimate");
  }
  auto excess = [&](double R) { return boundedness_rhs(spec, x, R) - R; };
  if (excess(0.0) <= 0.0) return {0.0, a};
  double lo = 0.0;
  double hi = std::max(1.0, boundedness_rhs(spec, x, 0.0));
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NonConvergence("schauder_radius: no finite radius", {});
  }
  for (int k = 0; k < 200 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) <= 0.0 ? hi : lo) = mid;
  }
  return {hi, a};
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

CheckReport check_g_assumptions(const NonlocalSpec& spec, const GLattice& lattice) {
  spec.validate();
  CheckReport report;

  {
    CheckItem item{"G0: A0, A1 of bounded variation", true, 0.0, {}, {}};
    const double v0 = total_variation(spec.h.A0);
    const double v1 = total_variation(spec.h.A1);
    item.passed = std::isfinite(v0) && std::isfinite(v1);
    item.detail = "Var A0 = " + fmt(v0) + ", Var A1 = " + fmt(v1);
    report.items.push_back(item);
  }

  std::mt19937_64 rng(lattice.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  {
    CheckItem item{"G1: |g(t,u,v)| <= A|u|^r + B|v|^theta + C for large |u|, |v|", true,
                   std::numeric_limits<double>::infinity(), {}, {}};
    std::size_t count = 0;
    std::size_t failures = 0;
    auto check = [&](double t, double u, double v) {
      ++count;
      const auto& g = spec.g;
      const double bound = g.A * std::pow(std::abs(u), g.r) + g.B * std::pow(std::abs(v), g.theta) + g.C;
      double value;
      try {
        value = std::abs(g.g(Env{{Var::t, t}, {Var::u, u}, {Var::v, v}}));
      } catch (const DomainError& e) {
        ++failures;
        item.worst_margin = -std::numeric_limits<double>::infinity();
        item.witness = "t = " + fmt(t) + ", u = " + fmt(u) + ", v = " + fmt(v) + ": " + e.what();
        return;
      }
      const double rel = (bound - value) / (1.0 + bound);
      if (rel < -1e-12) ++failures;
      if (rel < item.worst_margin) {
        item.worst_margin = rel;
        item.witness = "t = " + fmt(t) + ", u = " + fmt(u) + ", v = " + fmt(v) + ": |g| = " + fmt(value) +
                       ", bound = " + fmt(bound);
      }
    };
    std::vector<double> mags;
    const double l0 = std::log(lattice.large_min);
    const double l1 = std::log(lattice.large_max);
    for (std::size_t i = 0; i < lattice.large_points; ++i) {
      const double s = lattice.large_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(lattice.large_points - 1);
      mags.push_back(std::exp(l0 + s * (l1 - l0)));
    }
    for (std::size_t k = 0; k < lattice.t_points; ++k) {
      const double t = lattice.t_points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(lattice.t_points - 1);
      for (double mu : mags) {
        for (double mv : mags) {
          for (double su : {-1.0, 1.0}) {
            for (double sv : {-1.0, 1.0}) check(t, su * mu, sv * mv);
          }
        }
      }
    }
    for (std::size_t i = 0; i < lattice.random_points; ++i) {
      const double t = unit(rng);
      const double u = std::exp(l0 + unit(rng) * (l1 - l0)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
      const double v = std::exp(l0 + unit(rng) * (l1 - l0)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
      check(t, u, v);
    }
    item.passed = failures == 0;
    item.detail = std::to_string(count) + " points, " + std::to_string(failures) + " violations";
    report.items.push_back(item);
  }

  {
    CheckItem item{"G2: |h_j(v)| <= alpha_j |v| + beta_j", true, std::numeric_limits<double>::infinity(), {}, {}};
    std::size_t count = 0;
    std::size_t failures = 0;
    auto check = [&](int j, double v) {
      ++count;
      const Expr& h = j == 0 ? spec.h.h0 : spec.h.h1;
      const double bound = (j == 0 ? spec.h.alpha0 : spec.h.alpha1) * std::abs(v) + (j == 0 ? spec.h.beta0 : spec.h.beta1);
      double value;
      try {
        value = std::abs(h(Env{{Var::v, v}}));
      } catch (const DomainError& e) {
        ++failures;
        item.worst_margin = -std::numeric_limits<double>::infinity();
        item.witness = "h" + std::to_string(j) + " at v = " + fmt(v) + ": " + e.what();
        return;
      }
      const double rel = (bound - value) / (1.0 + bound);
      if (rel < -1e-12) ++failures;
      if (rel < item.worst_margin) {
        item.worst_margin = rel;
        item.witness = "h" + std::to_string(j) + " at v = " + fmt(v) + ": |h| = " + fmt(value) + ", bound = " + fmt(bound);
      }
    };
    for (int j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < lattice.h_points; ++i) {
        const double s = lattice.h_points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(lattice.h_points - 1);
        check(j, -lattice.h_range + 2.0 * lattice.h_range * s);
      }
      for (std::size_t i = 0; i < lattice.random_points; ++i) {
        check(j, lattice.h_range * (2.0 * unit(rng) - 1.0));
      }
    }
    item.passed = failures == 0;
    item.detail = std::to_string(count) + " points, " + std::to_string(failures) + " violations";
    report.items.push_back(item);
  }

  {
    const double v0 = total_variation(spec.h.A0);
    const double v1 = total_variation(spec.h.A1);
    const double left = 2.0 * spec.h.alpha0 * v0 + spec.h.alpha1 * v1;
    const double right = 2.0 * spec.h.alpha1 * v1 + spec.h.alpha0 * v0;
    const double m = std::min(left, right);
    CheckItem item{"G3: min(2 alpha0 Var A0 + alpha1 Var A1, 2 alpha1 Var A1 + alpha0 Var A0) < 1",
                   m < 1.0, 1.0 - m, {}, "value " + fmt(m)};
    report.items.push_back(item);
  }
  return report;
}

namespace {

// psi_q(v') at the node between two cells with slopes sl, sr, taking
// psi_q(v') linear across both cells: the node value b and the change d
// over one cell solve mean(b - d, b) = sl and mean(b, b + d) = sr. For
// q = 2 this is the central difference (sl + sr) / 2.
double nodal_flux(double sl, double sr, double q) {
  if (q == 2.0) return 0.5 * (sl + sr);
  auto b_of = [&](double d) {
    double lo = psi_q(sl, q) + std::min(d, 0.0);
    double hi = psi_q(sl, q) + std::max(d, 0.0);
    for (int k = 0; k < 200 && lo < hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (mean_inverse(mid - d, mid, q) < sl ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto excess = [&](double d) { return mean_inverse(b_of(d), b_of(d) + d, q) - sr; };
  if (sl == sr) return psi_q(sl, q);
  double span = std::abs(psi_q(sr, q) - psi_q(sl, q));
  double lo = -span;
  double hi = span;
  for (int k = 0; excess(lo) > 0.0 && k < 200; ++k) lo *= 2.0;
  for (int k = 0; excess(hi) < 0.0 && k < 200; ++k) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return b_of(0.5 * (lo + hi));
}

}  // namespace

NonlocalVerification verify_nonlocal_solution(const GridFunction& u, const GridFunction& v,
                                              const NonlocalSpec& spec, std::optional<double> tol,
                                              double boundary_tol) {
  spec.validate();
  if (!(u.grid() == v.grid())) throw InvalidArgument("verify: u and v live on different grids");
  const Grid& grid = v.grid();
  const std::size_t n = grid.n_cells();
  if (n < 4) throw InvalidArgument("verify: need at least four cells");
  const double h = grid.h();
  const double q = spec.g.q;

  NonlocalVerification out;
  std::vector<double> slope(n);
  for (std::size_t k = 0; k < n; ++k) slope[k] = v.slope(k);
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) flux[i] = nodal_flux(slope[i - 1], slope[i], q);

  std::vector<double> g(n + 1);
  double g_sup = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    g[i] = spec.g.g(Env{{Var::t, grid.node(i)}, {Var::u, u[i]}, {Var::v, v[i]}});
    g_sup = std::max(g_sup, std::abs(g[i]));
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double res = std::abs((flux[i + 1] - flux[i - 1]) / (2.0 * h) + g[i]);
    if (res > out.interior_residual) {
      out.interior_residual = res;
      out.worst_node = i;
    }
  }
  out.interior_tolerance = tol.value_or(10.0 * h) * (1.0 + g_sup);

  const ThetaFunction theta(u, v, spec);
  out.left_error = std::abs(v[0] - theta.h0_integral());
  out.right_error = std::abs(v[n] - theta.h1_integral());

  out.report.items.push_back({"classical residual of -(psi_q(v'))' = g", out.interior_residual <= out.interior_tolerance,
                              out.interior_tolerance - out.interior_residual,
                              "node " + std::to_string(out.worst_node) + " (t = " + fmt(grid.node(out.worst_node)) + ")",
                              "max residual " + fmt(out.interior_residual) + ", tolerance " + fmt(out.interior_tolerance)});
  out.report.items.push_back({"v(0) = int h0(v) dA0", out.left_error <= boundary_tol, boundary_tol - out.left_error,
                              {}, "error " + fmt(out.left_error)});
  out.report.items.push_back({"v(1) = int h1(v) dA1", out.right_error <= boundary_tol, boundary_tol - out.right_error,
                              {}, "error " + fmt(out.right_error)});
  return out;
}

}  // namespace hybridbvp
