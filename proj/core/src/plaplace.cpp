#include "hybridbvp/plaplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hybridbvp/errors.hpp"
#include "hybridbvp/tridiagonal.hpp"

namespace hybridbvp {

PhiSpec PhiSpec::parse(std::string_view phi, std::string_view m, std::string_view M) {
  return {hybridbvp::parse(phi, {Var::t, Var::y, Var::r}), hybridbvp::parse(m, {Var::y}),
          hybridbvp::parse(M, {Var::y})};
}

FSpec FSpec::parse(std::string_view f, std::string_view delta) {
  return {hybridbvp::parse(f, {Var::t, Var::u, Var::v}), hybridbvp::parse(delta, {Var::v})};
}

void PLaplaceSpec::validate() const {
  if (!std::isfinite(p) || p < 2.0) {
    throw InvalidArgument("p-Laplacian: p must be a finite number >= 2 (got " + std::to_string(p) + ")");
  }
}

namespace {

double psi(double s, double p) { return std::copysign(std::pow(std::abs(s), p - 1.0), s); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Cellwise evaluation shared by the residual and the tangent.
class Assembler {
 public:
  Assembler(const PLaplaceSpec& spec, const Grid& grid)
      : spec_(spec), grid_(grid), quad_(cell_quadrature(spec.rule)) {
    spec_.validate();
  }

  // (1/h) int_cell phi(t, v(t), |s|^{p-1}) dt * psi_p(s)
  double flux(std::size_t cell, double s, const GridFunction& v) const {
    const double h = grid_.h();
    const double r = std::pow(std::abs(s), spec_.p - 1.0);
    if (spec_.phi.phi.is_constant()) return spec_.phi.phi(Env{}) * psi(s, spec_.p);
    const double t0 = grid_.node(cell);
    double avg = 0.0;
    for (std::size_t g = 0; g < quad_.weights.size(); ++g) {
      const double xi = quad_.abscissae[g];
      const double t = t0 + xi * h;
      const double vt = (1.0 - xi) * v[cell] + xi * v[cell + 1];
      avg += quad_.weights[g] * spec_.phi.phi(Env{{Var::t, t}, {Var::y, vt}, {Var::r, r}});
    }
    return avg * psi(s, spec_.p);
  }

  DualVector residual(const GridFunction& u, const GridFunction& v) const {
    const std::size_t n = grid_.n_cells();
    const double h = grid_.h();
    DualVector out = DualVector::Zero(static_cast<Eigen::Index>(n - 1));
    auto add = [&](std::size_t node, double value) {
      if (node >= 1 && node <= n - 1) out[static_cast<Eigen::Index>(node - 1)] += value;
    };
    for (std::size_t c = 0; c < n; ++c) {
      try {
        const double s = u.slope(c);
        const double fl = flux(c, s, v);
        add(c, -fl);
        add(c + 1, fl);
        const double t0 = grid_.node(c);
        for (std::size_t g = 0; g < quad_.weights.size(); ++g) {
          const double xi = quad_.abscissae[g];
          const double t = t0 + xi * h;
          const double ut = (1.0 - xi) * u[c] + xi * u[c + 1];
          const double vt = (1.0 - xi) * v[c] + xi * v[c + 1];
          const double fv = spec_.f.f(Env{{Var::t, t}, {Var::u, ut}, {Var::v, vt}});
          const double w = quad_.weights[g] * h * fv;
          add(c, -w * (1.0 - xi));
          add(c + 1, -w * xi);
        }
      } catch (const DomainError& e) {
        throw DomainError("assemble_F: cell " + std::to_string(c) + ": " + e.what());
      }
    }
    return out;
  }

  // Tridiagonal approximation of F'(u, v) + eps K.
  SymTridiagonal tangent(const GridFunction& u, const GridFunction& v, double eps) const {
    const std::size_t n = grid_.n_cells();
    const double h = grid_.h();
    std::vector<double> k(n);
    double kmax = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double s = u.slope(c);
      const double eta = 1e-6 * (1.0 + std::abs(s));
      double d = 0.0;
      try {
        d = (flux(c, s + eta, v) - flux(c, s - eta, v)) / (2.0 * eta);
      } catch (const DomainError&) {
        d = 0.0;
      }
      k[c] = std::isfinite(d) ? std::max(d, 0.0) : 0.0;
      kmax = std::max(kmax, k[c]);
    }
    const double floor = kmax > 0.0 ? 1e-6 * kmax : 1.0;
    for (double& x : k) x = std::max(x, floor);

    SymTridiagonal a;
    a.diag.assign(n - 1, 0.0);
    a.off.assign(n >= 2 ? n - 2 : 0, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      const double w = (k[c] + eps) / h;
      if (c >= 1) a.diag[c - 1] += w;
      if (c + 1 <= n - 1) a.diag[c] += w;
      if (c >= 1 && c + 1 <= n - 1) a.off[c - 1] -= w;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double t = grid_.node(i);
      const double eta = 1e-6 * (1.0 + std::abs(u[i]));
      try {
        const double fp = spec_.f.f(Env{{Var::t, t}, {Var::u, u[i] + eta}, {Var::v, v[i]}});
        const double fm = spec_.f.f(Env{{Var::t, t}, {Var::u, u[i] - eta}, {Var::v, v[i]}});
        const double dfu = (fp - fm) / (2.0 * eta);
        if (std::isfinite(dfu) && dfu < 0.0) a.diag[i - 1] += -dfu * h;
      } catch (const DomainError&) {
      }
    }
    return a;
  }

 private:
  PLaplaceSpec spec_;
  Grid grid_;
  const CellQuadrature& quad_;
};

GridFunction nodal(const Grid& grid, const Vector& values) {
  if (static_cast<std::size_t>(values.size()) != grid.n_nodes()) {
    throw InvalidArgument("v has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(grid.n_nodes()));
  }
  return GridFunction(grid, std::vector<double>(values.data(), values.data() + values.size()));
}

double eval_y(const Expr& e, double y) { return e(Env{{Var::y, y}}); }
double eval_v(const Expr& e, double v) { return e(Env{{Var::v, v}}); }

}  // namespace

DualVector assemble_F(const GridFunction& u, const GridFunction& v, const PLaplaceSpec& spec) {
  if (!(u.grid() == v.grid())) throw InvalidArgument("assemble_F: u and v live on different grids");
  if (u.grid().n_cells() < 2) throw InvalidArgument("assemble_F: need at least two cells");
  if (!u.is_dirichlet(1e-14)) throw InvalidArgument("assemble_F: u must vanish at both endpoints");
  return Assembler(spec, u.grid()).residual(u, v);
}

std::shared_ptr<const VecSpace> h10_space(std::size_t n_cells) {
  if (n_cells < 2) throw InvalidArgument("h10_space: need at least two cells");
  const auto k = stiffness_matrix(n_cells);
  const auto m = static_cast<Eigen::Index>(n_cells - 1);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < m; ++i) {
    triplets.emplace_back(i, i, k.diag[static_cast<std::size_t>(i)]);
    if (i + 1 < m) {
      triplets.emplace_back(i, i + 1, k.off[static_cast<std::size_t>(i)]);
      triplets.emplace_back(i + 1, i, k.off[static_cast<std::size_t>(i)]);
    }
  }
  SparseMatrix gram(m, m);
  gram.setFromTriplets(triplets.begin(), triplets.end());
  return std::make_shared<const VecSpace>(std::move(gram));
}

Vector interior(const GridFunction& u) {
  const auto vals = u.values();
  Vector out(static_cast<Eigen::Index>(vals.size() - 2));
  for (std::size_t i = 1; i + 1 < vals.size(); ++i) out[static_cast<Eigen::Index>(i - 1)] = vals[i];
  return out;
}

GridFunction with_boundary(const Grid& grid, const Vector& interior_values) {
  if (static_cast<std::size_t>(interior_values.size()) + 2 != grid.n_nodes()) {
    throw InvalidArgument("with_boundary: wrong number of interior values");
  }
  std::vector<double> values(grid.n_nodes(), 0.0);
  for (Eigen::Index i = 0; i < interior_values.size(); ++i) {
    values[static_cast<std::size_t>(i) + 1] = interior_values[i];
  }
  return GridFunction(grid, std::move(values));
}

double dual_norm(const DualVector& r, std::size_t n_cells) {
  const auto k = stiffness_matrix(n_cells);
  const std::vector<double> rv(r.data(), r.data() + r.size());
  const auto z = solve(k, rv);
  double s = 0.0;
  for (std::size_t i = 0; i < rv.size(); ++i) s += rv[i] * z[i];
  return std::sqrt(std::max(0.0, s));
}

namespace {

double coercivity_factor(double p, double lambda_p, CoercivityConstant constant) {
  if (!(lambda_p > 0.0)) throw InvalidArgument("coercivity: lambda_p must be positive");
  return constant == CoercivityConstant::holder ? std::pow(lambda_p, -1.0 / p) : 1.0 / lambda_p;
}

}  // namespace

double gamma_eval(double x, double y, const PLaplaceSpec& spec, double lambda_p,
                  CoercivityConstant constant) {
  const double k = coercivity_factor(spec.p, lambda_p, constant);
  if (x == 0.0) return 0.0;
  return eval_y(spec.phi.m, y) * std::pow(x, spec.p) - k * eval_v(spec.f.delta, y) * x;
}

double gamma_root(double y, const PLaplaceSpec& spec, double lambda_p, CoercivityConstant constant) {
  const double k = coercivity_factor(spec.p, lambda_p, constant);
  const double m = eval_y(spec.phi.m, y);
  if (!(m > 0.0)) throw DomainError("gamma_root: m(" + fmt(y) + ") = " + fmt(m) + " is not positive");
  const double d = eval_v(spec.f.delta, y);
  if (d <= 0.0) return 0.0;
  return std::pow(k * d / m, 1.0 / (spec.p - 1.0));
}

ParamOperator make_operator(const PLaplaceSpec& spec, const Grid& grid, std::optional<double> lambda_p,
                            CoercivityConstant constant) {
  auto assembler = std::make_shared<const Assembler>(spec, grid);
  ParamOperator op;
  op.eval = [assembler, grid](const Vector& u, const Vector& v) {
    return assembler->residual(with_boundary(grid, u), nodal(grid, v));
  };
  op.tangent_solve = [assembler, grid](const Vector& u, const Vector& v, double eps, const Vector& r) {
    const auto a = assembler->tangent(with_boundary(grid, u), nodal(grid, v), eps);
    const auto d = solve(a, std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
    return Vector(Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size())));
  };
  if (spec.p == 2.0 && spec.phi.m.is_constant()) {
    const double m = spec.phi.m(Env{});
    if (m > 0.0) op.strong_modulus = m;
  }
  op.u_norm = [grid, p = spec.p](const Vector& u) { return p_norm(with_boundary(grid, u), p); };
  if (lambda_p) {
    op.gamma = [spec, lp = *lambda_p, constant](double x, double y) {
      return gamma_eval(x, y, spec, lp, constant);
    };
  }
  op.concurrent_safe = true;
  return op;
}

GridFunction solve_u(const GridFunction& v, const PLaplaceSpec& spec, const SolveUOptions& options) {
  const Grid& grid = v.grid();
  const auto space = h10_space(grid.n_cells());
  const DualityMap J(space);
  const auto F = make_operator(spec, grid);
  RegularizedOptions ro;
  ro.tol = options.tol;
  ro.max_iter = options.max_iter;
  if (options.initial_guess) ro.initial_guess = interior(*options.initial_guess);
  const Vector vv = Eigen::Map<const Vector>(v.values().data(), static_cast<Eigen::Index>(v.size()));
  return with_boundary(grid, solve_regularized(F, J, vv, options.eps, ro).u);
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

CheckReport check_coercivity(const PLaplaceSpec& spec, const Grid& grid, double lambda_p,
                             const CoercivitySampling& sampling, CoercivityConstant constant) {
  spec.validate();
  std::mt19937_64 rng(sampling.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const Assembler assembler(spec, grid);

  CheckItem item;
  item.name = "coercivity";
  item.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;

  auto random_shape = [&](bool dirichlet, double amplitude) {
    double a[4];
    double phase[4];
    for (int k = 0; k < 4; ++k) {
      a[k] = coeff(rng) / (k + 1);
      phase[k] = dirichlet ? 0.0 : std::numbers::pi * unit(rng);
    }
    const double offset = dirichlet ? 0.0 : coeff(rng);
    auto values = GridFunction::interpolate(grid, [&](double t) {
      double s = offset;
      for (int k = 0; k < 4; ++k) s += a[k] * std::sin((k + 1) * std::numbers::pi * t + phase[k]);
      return s;
    });
    const double sup = sup_norm(values);
    // Half the samples log-uniform in size so small u are covered too.
    const double size = unit(rng) < 0.5 ? amplitude * unit(rng) : amplitude * std::pow(10.0, -4.0 * unit(rng));
    if (sup > 0.0) {
      for (double& x : values.values()) x *= size / sup;
    }
    return values;
  };

  for (std::size_t i = 0; i < sampling.n_samples; ++i) {
    const auto u = random_shape(true, sampling.u_amplitude);
    const auto v = random_shape(false, sampling.v_amplitude);
    const double x = p_norm(u, spec.p);
    const double y = sup_norm(v);
    const double pairing = assembler.residual(u, v).dot(interior(u));
    const double gamma = gamma_eval(x, y, spec, lambda_p, constant);
    const double margin = pairing - gamma;
    if (margin < -sampling.slack) ++violations;
    if (margin < item.worst_margin) {
      item.worst_margin = margin;
      item.witness = "sample " + std::to_string(i) + ": ||u||_p = " + fmt(x) + ", ||v||_inf = " + fmt(y) +
                     ", <F(u,v),u> = " + fmt(pairing) + ", gamma = " + fmt(gamma);
    }
  }
  item.passed = violations == 0;
  item.detail = std::to_string(sampling.n_samples) + " samples, " + std::to_string(violations) + " violations";
  return {{item}};
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

// Tracks the worst relative margin of one condition.
struct Tracker {
  CheckItem item;
  std::size_t checked = 0;
  std::size_t failures = 0;

  explicit Tracker(std::string name) {
    item.name = std::move(name);
    item.worst_margin = std::numeric_limits<double>::infinity();
  }

  void record(double margin, double scale, const std::string& where) {
    ++checked;
    const double rel = margin / (1.0 + std::abs(scale));
    if (rel < -1e-12) ++failures;
    if (rel < item.worst_margin) {
      item.worst_margin = rel;
      item.witness = where;
    }
  }
  void error(const std::string& where, const std::string& what) {
    ++checked;
    ++failures;
    item.worst_margin = -std::numeric_limits<double>::infinity();
    item.witness = where + ": " + what;
  }
  CheckItem finish() {
    item.passed = failures == 0;
    item.detail = std::to_string(checked) + " points, " + std::to_string(failures) + " violations";
    if (checked == 0) item.worst_margin = 0.0;
    return item;
  }
};

}  // namespace

CheckReport check_phi_f_assumptions(const PLaplaceSpec& spec, const Lattice& lattice) {
  spec.validate();
  const auto ts = linspace(0.0, 1.0, lattice.t_points);
  const auto ys = linspace(-lattice.y_max, lattice.y_max, lattice.y_points);
  const auto rs = linspace(0.0, lattice.r_max, lattice.r_points);
  const auto vs = linspace(0.0, lattice.y_max, (lattice.y_points + 1) / 2);

  std::mt19937_64 rng(lattice.seed);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::uniform_real_distribution<double> uy(-lattice.y_max, lattice.y_max);
  std::uniform_real_distribution<double> ur(0.0, lattice.r_max);

  Tracker phi3("Phi3: m(|y|) <= phi(t,y,r) <= M(|y|)");
  Tracker phi4("Phi4: r -> phi(t,y,r) r nondecreasing");
  Tracker f2("F2: f nonincreasing in u");
  Tracker f4("F4: |f(t,0,y)| <= delta(v) for |y| <= v");

  const auto& S = spec;
  auto phi = [&](double t, double y, double r) {
    return S.phi.phi(Env{{Var::t, t}, {Var::y, y}, {Var::r, r}});
  };
  auto f = [&](double t, double u, double v) { return S.f.f(Env{{Var::t, t}, {Var::u, u}, {Var::v, v}}); };
  auto where = [](std::initializer_list<std::pair<const char*, double>> kv) {
    std::string s;
    for (const auto& [k, x] : kv) s += (s.empty() ? "" : ", ") + std::string(k) + " = " + fmt(x);
    return s;
  };

  auto check_phi3 = [&](double t, double y, double r) {
    const auto w = where({{"t", t}, {"y", y}, {"r", r}});
    try {
      const double value = phi(t, y, r);
      const double lo = eval_y(S.phi.m, std::abs(y));
      const double hi = eval_y(S.phi.M, std::abs(y));
      phi3.record(std::min(value - lo, hi - value), value, w);
    } catch (const DomainError& e) {
      phi3.error(w, e.what());
    }
  };
  auto check_phi4 = [&](double t, double y, double r1, double r2) {
    const auto w = where({{"t", t}, {"y", y}, {"r1", r1}, {"r2", r2}});
    try {
      const double a = phi(t, y, r1) * r1;
      const double b = phi(t, y, r2) * r2;
      phi4.record(b - a, std::max(std::abs(a), std::abs(b)), w);
    } catch (const DomainError& e) {
      phi4.error(w, e.what());
    }
  };
  auto check_f2 = [&](double t, double v, double u1, double u2) {
    const auto w = where({{"t", t}, {"v", v}, {"u1", u1}, {"u2", u2}});
    try {
      const double a = f(t, u1, v);
      const double b = f(t, u2, v);
      f2.record(a - b, std::max(std::abs(a), std::abs(b)), w);
    } catch (const DomainError& e) {
      f2.error(w, e.what());
    }
  };
  auto check_f4 = [&](double t, double v, double y) {
    const auto w = where({{"t", t}, {"v", v}, {"y", y}});
    try {
      const double a = std::abs(f(t, 0.0, y));
      const double d = eval_v(S.f.delta, v);
      f4.record(d - a, a, w);
    } catch (const DomainError& e) {
      f4.error(w, e.what());
    }
  };

  for (double t : ts) {
    for (double y : ys) {
      for (std::size_t k = 0; k < rs.size(); ++k) {
        check_phi3(t, y, rs[k]);
        if (k + 1 < rs.size()) check_phi4(t, y, rs[k], rs[k + 1]);
      }
      for (std::size_t k = 0; k + 1 < ys.size(); ++k) check_f2(t, y, ys[k], ys[k + 1]);
    }
    for (double v : vs) {
      for (double y : ys) {
        if (std::abs(y) <= v) check_f4(t, v, y);
      }
      check_f4(t, v, v);
      check_f4(t, v, -v);
    }
  }
  for (std::size_t i = 0; i < lattice.random_points; ++i) {
    const double t = ut(rng);
    const double y = uy(rng);
    double r1 = ur(rng);
    double r2 = ur(rng);
    if (r1 > r2) std::swap(r1, r2);
    double u1 = uy(rng);
    double u2 = uy(rng);
    if (u1 > u2) std::swap(u1, u2);
    const double v = std::abs(uy(rng));
    const double yy = v * (2.0 * ut(rng) - 1.0);
    check_phi3(t, y, r1);
    check_phi4(t, y, r1, r2);
    check_f2(t, y, u1, u2);
    check_f4(t, v, yy);
  }

  return {{phi3.finish(), phi4.finish(), f2.finish(), f4.finish()}};
}

}  // namespace hybridbvp
