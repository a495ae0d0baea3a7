#include "hybridbvp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

// ---------------------------------------------------------------------------
// VecSpace / DualityMap
// ---------------------------------------------------------------------------

VecSpace::VecSpace(Eigen::Index dim) : dim_(dim) {
  if (dim <= 0) throw InvalidArgument("VecSpace: dimension must be positive");
  gram_.resize(dim, dim);
  gram_.setIdentity();
}

VecSpace::VecSpace(SparseMatrix gram) : dim_(gram.rows()), gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols() || dim_ <= 0) {
    throw InvalidArgument("VecSpace: Gram matrix must be square and non-empty");
  }
  const SparseMatrix asym = gram_ - SparseMatrix(gram_.transpose());
  const double scale = std::max(1.0, gram_.norm());
  if (asym.norm() > 1e-12 * scale) throw InvalidArgument("VecSpace: Gram matrix is not symmetric");
  auto chol = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(gram_);
  if (chol->info() != Eigen::Success) {
    throw InvalidArgument("VecSpace: Gram matrix is not positive definite");
  }
  chol_ = std::move(chol);
}

double VecSpace::inner(const Vector& a, const Vector& b) const {
  if (!chol_) return a.dot(b);
  return a.dot(gram_ * b);
}

double VecSpace::norm(const Vector& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Vector VecSpace::lower(const Vector& a) const {
  if (!chol_) return a;
  return gram_ * a;
}

Vector VecSpace::riesz(const Vector& r) const {
  if (!chol_) return r;
  return chol_->solve(r);
}

double VecSpace::dual_norm(const Vector& r) const {
  if (!chol_) return r.norm();
  return std::sqrt(std::max(0.0, r.dot(riesz(r))));
}

DualityMap::DualityMap(std::shared_ptr<const VecSpace> space) : space_(std::move(space)) {
  if (!space_) throw InvalidArgument("DualityMap: null space");
}

// ---------------------------------------------------------------------------
// solve_regularized
// ---------------------------------------------------------------------------

RegularizedResult solve_regularized(const ParamOperator& F, const DualityMap& J, const Vector& v,
                                    double eps, const RegularizedOptions& options) {
  if (!(eps >= 0.0)) throw InvalidArgument("solve_regularized: eps must be >= 0");
  if (eps == 0.0 && !(F.strong_modulus && *F.strong_modulus > 0.0)) {
    throw InvalidArgument(
        "solve_regularized: eps = 0 needs a strongly monotone operator (no modulus advertised)");
  }
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_regularized: tol must be positive");

  const VecSpace& space = J.space();
  RegularizedResult out;
  out.u = options.initial_guess ? *options.initial_guess : Vector::Zero(space.dim());
  if (out.u.size() != space.dim()) throw InvalidArgument("solve_regularized: initial guess has wrong size");

  auto residual_at = [&](const Vector& u) -> Vector {
    Vector r = F.eval(u, v);
    if (eps != 0.0) r += eps * J(u);
    return r;
  };

  Vector r = residual_at(out.u);
  double rn = space.dual_norm(r);
  if (!std::isfinite(rn)) throw DomainError("solve_regularized: residual is not finite at the start");
  out.residuals.push_back(rn);

  double tau_gradient = 1.0;
  constexpr int kMaxHalvings = 60;

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    if (rn <= options.tol) {
      out.iterations = it;
      return out;
    }

    auto try_direction = [&](const Vector& d, double tau) -> std::optional<std::pair<double, Vector>> {
      for (int h = 0; h < kMaxHalvings; ++h, tau *= 0.5) {
        Vector trial = out.u - tau * d;
        Vector rt = residual_at(trial);
        const double n = space.dual_norm(rt);
        if (std::isfinite(n) && n < rn) {
          out.u = std::move(trial);
          r = std::move(rt);
          rn = n;
          return std::make_pair(tau, Vector());
        }
      }
      return std::nullopt;
    };

    std::optional<std::pair<double, Vector>> accepted;
    if (F.tangent_solve) {
      const Vector d = F.tangent_solve(out.u, v, eps, r);
      if (d.allFinite()) accepted = try_direction(d, 1.0);
    }
    if (!accepted) {
      accepted = try_direction(space.riesz(r), std::min(1.0, 2.0 * tau_gradient));
      if (accepted) tau_gradient = accepted->first;
    }
    if (!accepted) {
      throw NonConvergence("solve_regularized: no step decreases the residual (stalled at " +
                               std::to_string(rn) + ")",
                           out.residuals);
    }
    out.residuals.push_back(rn);
    out.steps.push_back(accepted->first);
  }
  if (rn <= options.tol) {
    out.iterations = options.max_iter;
    return out;
  }
  throw NonConvergence("solve_regularized: " + std::to_string(options.max_iter) +
                           " iterations without reaching tol (residual " + std::to_string(rn) + ")",
                       out.residuals);
}

// ---------------------------------------------------------------------------
// Traces and damping
// ---------------------------------------------------------------------------

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = "stage,iter,eps,residual,update,step,clipped\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%d\n", row.stage, row.iter,
                  row.eps, row.residual, row.update, row.step, row.clipped ? 1 : 0);
    out += buf;
  }
  return out;
}

DampingPolicy::DampingPolicy(double initial, double min_factor) : s_(initial), min_(min_factor) {
  if (!(initial > 0.0 && initial <= 1.0)) throw InvalidArgument("damping factor must lie in (0, 1]");
}

double DampingPolicy::next(std::span<const double> defect) {
  if (previous_.size() == defect.size()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < defect.size(); ++i) dot += defect[i] * previous_[i];
    if (dot < 0.0) s_ = std::max(0.5 * s_, min_);
  }
  previous_.assign(defect.begin(), defect.end());
  return s_;
}

std::vector<double> default_epsilon_schedule() {
  std::vector<double> out;
  for (int k = 0; k <= 40; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

// ---------------------------------------------------------------------------
// hybrid_solve
// ---------------------------------------------------------------------------

HybridResult hybrid_solve(const ParamOperator& F, const CompactMap& G, const DualityMap& J, double R,
                          const HybridOptions& options) {
  if (!(R > 0.0)) throw InvalidArgument("hybrid_solve: ball radius must be positive");
  if (options.eps_schedule.empty()) throw InvalidArgument("hybrid_solve: empty eps schedule");
  for (std::size_t k = 0; k < options.eps_schedule.size(); ++k) {
    const double e = options.eps_schedule[k];
    if (!(e >= 0.0) || (k > 0 && !(e < options.eps_schedule[k - 1]))) {
      throw InvalidArgument("hybrid_solve: eps schedule must be non-negative and strictly decreasing");
    }
  }
  const VecSpace& space = J.space();
  auto v_norm = [&](const Vector& x) { return G.v_norm ? G.v_norm(x) : x.norm(); };
  auto u_norm = [&](const Vector& x) { return F.u_norm ? F.u_norm(x) : space.norm(x); };

  HybridResult out;
  out.u = options.u0 ? *options.u0 : Vector::Zero(space.dim());
  if (!options.v0) throw InvalidArgument("hybrid_solve: an initial v (v0) is required");
  out.v = *options.v0;

  auto clip = [&](Vector& x) {
    const double n = v_norm(x);
    if (n > R) {
      x *= R / n;
      return true;
    }
    return false;
  };
  bool clipped = clip(out.v);

  auto inner_solve = [&](const Vector& v, double eps, std::size_t stage) {
    RegularizedOptions ro;
    ro.tol = options.tol_inner;
    ro.max_iter = options.max_inner;
    ro.initial_guess = out.u;
    try {
      return solve_regularized(F, J, v, eps, ro).u;
    } catch (const NonConvergence& e) {
      throw NonConvergence("hybrid_solve: inner solve failed at stage " + std::to_string(stage) +
                               " (eps = " + std::to_string(eps) + "): " + e.what(),
                           e.residual_trace());
    }
  };

  for (std::size_t stage = 0; stage < options.eps_schedule.size(); ++stage) {
    const double eps = options.eps_schedule[stage];
    DampingPolicy damping(options.initial_damping);
    bool settled = false;
    std::vector<double> defects;
    for (std::size_t it = 0; it < options.max_outer; ++it) {
      out.u = inner_solve(out.v, eps, stage);
      const Vector target = G.eval(out.u, out.v);
      const Vector defect = target - out.v;
      const double defect_norm = v_norm(defect);
      defects.push_back(defect_norm);
      const double s = damping.next(std::span<const double>(defect.data(), static_cast<std::size_t>(defect.size())));
      out.v += s * defect;
      clipped = clip(out.v);

      TraceRow row;
      row.stage = stage;
      row.iter = it;
      row.eps = eps;
      row.update = defect_norm;
      row.step = s;
      row.clipped = clipped;
      Vector res = F.eval(out.u, out.v);
      if (eps != 0.0) res += eps * J(out.u);
      row.residual = space.dual_norm(res);
      out.trace.push_back(row);

      if (defect_norm <= options.tol_outer) {
        settled = true;
        break;
      }
    }
    if (!settled) {
      throw NonConvergence("hybrid_solve: stage " + std::to_string(stage) + " (eps = " +
                               std::to_string(eps) + ") did not settle in " +
                               std::to_string(options.max_outer) + " outer iterations",
                           defects);
    }
    out.u = inner_solve(out.v, eps, stage);
    out.stages = stage + 1;
    out.final_eps = eps;
    out.final_update = defects.back();
    out.final_residual = space.dual_norm(F.eval(out.u, out.v));

    const bool small_regularization = eps * space.norm(out.u) < 0.1 * options.tol_outer;
    if (out.final_residual <= options.tol_outer || small_regularization) break;
  }

  out.converged = out.final_update <= options.tol_outer && out.final_residual <= options.tol_outer;
  out.clipped_at_end = clipped;
  if (F.gamma) out.gamma_at_solution = F.gamma(u_norm(out.u), v_norm(out.v));
  return out;
}

// ---------------------------------------------------------------------------
// Sampled verifiers
// ---------------------------------------------------------------------------

PairSampler ball_pair_sampler(std::shared_ptr<const VecSpace> space, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball_pair_sampler: radius must be >= 0");
  return [space = std::move(space), radius](std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const auto d = static_cast<double>(space->dim());
    auto draw = [&] {
      Vector z(space->dim());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
      const double n = space->norm(z);
      const double rho = radius * std::pow(uniform(rng), 1.0 / d);
      return n > 0.0 ? Vector(z * (rho / n)) : Vector(z);
    };
    Vector a = draw();
    Vector b = draw();
    return std::make_pair(std::move(a), std::move(b));
  };
}

namespace {

// Evaluates `ratio` on every pair and reduces with `better`; NaN marks a
// skipped (coincident) pair.
template <class Ratio, class Better>
double sampled_extremum(const PairSampler& sampler, const SampleOptions& options, double start,
                        Ratio ratio, Better better) {
  if (options.n_samples == 0) throw InvalidArgument("need at least one sample");
  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<Vector, Vector>> pairs;
  pairs.reserve(options.n_samples);
  for (std::size_t i = 0; i < options.n_samples; ++i) pairs.push_back(sampler(rng));

  std::vector<double> values(pairs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = ratio(pairs[i].first, pairs[i].second);
  };
  const std::size_t threads =
      options.concurrent ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : 1;
  if (threads == 1) {
    work(0, pairs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (pairs.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(pairs.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  double best = start;
  bool any = false;
  for (double x : values) {
    if (std::isnan(x)) continue;
    any = true;
    if (better(x, best)) best = x;
  }
  if (!any) throw InvalidArgument("all sampled pairs were coincident");
  return best;
}

}  // namespace

double one_sided_constant(const VectorMap& A, const PairSampler& sampler, const VecSpace& space,
                          const SampleOptions& options) {
  return sampled_extremum(
      sampler, options, -std::numeric_limits<double>::infinity(),
      [&](const Vector& u, const Vector& w) {
        const Vector diff = u - w;
        const double d2 = space.inner(diff, diff);
        if (d2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return space.inner(A(u) - A(w), diff) / d2;
      },
      [](double x, double best) { return x > best; });
}

double monotonicity_margin(const ParamOperator& F, const Vector& v, const PairSampler& sampler,
                           const VecSpace& space, const SampleOptions& options) {
  SampleOptions opts = options;
  opts.concurrent = options.concurrent && F.concurrent_safe;
  return sampled_extremum(
      sampler, opts, std::numeric_limits<double>::infinity(),
      [&](const Vector& u, const Vector& w) {
        const Vector diff = u - w;
        const double d2 = space.inner(diff, diff);
        if (d2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
        // F is dual-valued: the pairing is the Euclidean dot product.
        return (F.eval(u, v) - F.eval(w, v)).dot(diff) / d2;
      },
      [](double x, double best) { return x < best; });
}

// ---------------------------------------------------------------------------
// Krasnoselskii-type sandbox
// ---------------------------------------------------------------------------

namespace {

double sampled_sup_norm(const VectorMap& B, const VecSpace& space, double radius,
                        std::size_t budget, std::mt19937_64& rng) {
  double sup = space.norm(B(Vector::Zero(space.dim())));
  if (radius == 0.0) return sup;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const auto d = static_cast<double>(space.dim());
  for (std::size_t i = 0; i < budget; ++i) {
    Vector z(space.dim());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
    const double n = space.norm(z);
    if (n == 0.0) continue;
    z *= radius * std::pow(uniform(rng), 1.0 / d) / n;
    sup = std::max(sup, space.norm(B(z)));
  }
  return sup;
}

}  // namespace

Lambda0Result krasnoselskii_lambda0(const VectorMap& A, const VectorMap& B,
                                    std::shared_ptr<const VecSpace> space,
                                    const Lambda0Options& options) {
  if (options.sample_budget == 0) throw InvalidArgument("krasnoselskii_lambda0: empty sample budget");
  Lambda0Result out;
  const double a0 = space->norm(A(Vector::Zero(space->dim())));
  if (options.m) {
    out.m = *options.m;
  } else {
    SampleOptions so;
    so.n_samples = options.sample_budget;
    so.seed = options.seed;
    out.m = one_sided_constant(A, ball_pair_sampler(space, 10.0 * (1.0 + a0)), *space, so);
    out.m_estimated = true;
  }
  if (!(out.m < 1.0)) {
    throw InvalidArgument("krasnoselskii_lambda0: one-sided constant m = " + std::to_string(out.m) +
                          " is not < 1");
  }
  std::mt19937_64 rng(options.seed);
  out.r = a0 / (1.0 - out.m);
  out.sup_b = sampled_sup_norm(B, *space, out.r, options.sample_budget, rng);
  out.lambda0 = 1.0 / (1.0 + out.sup_b);
  out.lambda0_safe = options.safety_factor * out.lambda0;
  out.certified_radius = (a0 + 1.0) / (1.0 - out.m);
  out.certified_sup_b = sampled_sup_norm(B, *space, out.certified_radius, options.sample_budget, rng);
  out.certified_lambda0 = 1.0 / (1.0 + out.certified_sup_b);
  return out;
}

Vector radial_projection(const Vector& u, double r, const VecSpace& space) {
  const double n = space.norm(u);
  if (n <= r) return u;
  return u * (r / n);
}

EigenSolveResult solve_eigen(const VectorMap& A, const VectorMap& B, double lambda, double r,
                             double m, std::shared_ptr<const VecSpace> space, double tol) {
  if (!(m < 1.0)) throw InvalidArgument("solve_eigen: A must be a one-sided contraction (m < 1)");
  if (!(lambda >= 0.0)) throw InvalidArgument("solve_eigen: lambda must be >= 0");
  if (!(r >= 0.0)) throw InvalidArgument("solve_eigen: radius must be >= 0");

  const DualityMap J(space);
  ParamOperator F;
  F.eval = [&](const Vector& u, const Vector& v) { return J(Vector(u - A(u) - v)); };
  F.strong_modulus = 1.0 - m;
  CompactMap G;
  G.eval = [&](const Vector& u, const Vector&) -> Vector {
    return lambda * B(radial_projection(u, r, *space));
  };
  G.v_norm = [&](const Vector& x) { return space->norm(x); };

  HybridOptions ho;
  ho.eps_schedule = {0.0};
  ho.tol_inner = 0.01 * tol;
  ho.tol_outer = 0.1 * tol;
  ho.v0 = Vector::Zero(space->dim());
  const auto h = hybrid_solve(F, G, J, std::numeric_limits<double>::infinity(), ho);

  EigenSolveResult out;
  out.u = h.u;
  out.norm = space->norm(h.u);
  out.residual = space->norm(h.u - A(h.u) - lambda * B(radial_projection(h.u, r, *space)));
  out.iterations = h.trace.size();
  if (out.residual > tol) {
    throw NonConvergence("solve_eigen: residual " + std::to_string(out.residual) + " above tol",
                         {out.residual});
  }
  if (out.norm > r * (1.0 + 1e-12) + tol) {
    throw InvarianceViolation("solve_eigen: ||u|| = " + std::to_string(out.norm) +
                              " exceeds the ball radius r = " + std::to_string(r));
  }
  return out;
}

CondKrasResult solve_condkras(const VectorMap& A, const VectorMap& B, const ConvexSet& D, double m,
                              std::shared_ptr<const VecSpace> space, double tol,
                              std::size_t max_iter) {
  if (!(m < 1.0)) throw InvalidArgument("solve_condkras: A must be a one-sided contraction (m < 1)");
  const DualityMap J(space);
  ParamOperator inverse;  // x - A(x) - y = 0  <=>  x = (I - A)^{-1} y
  inverse.eval = [&](const Vector& x, const Vector& y) { return J(Vector(x - A(x) - y)); };
  inverse.strong_modulus = 1.0 - m;

  CondKrasResult out;
  out.u = D.project(Vector::Zero(space->dim()));
  if (!D.contains(out.u)) throw InvalidArgument("solve_condkras: projection does not land in D");

  DampingPolicy damping;
  RegularizedOptions ro;
  ro.tol = 0.01 * tol;
  for (std::size_t it = 0; it < max_iter; ++it) {
    ro.initial_guess = out.u;
    const Vector image = solve_regularized(inverse, J, B(out.u), 0.0, ro).u;
    if (!D.contains(image)) {
      throw InvarianceViolation("solve_condkras: (I - A)^{-1} B(u) left D at iteration " +
                                std::to_string(it));
    }
    const Vector defect = image - out.u;
    const double dn = space->norm(defect);
    out.defects.push_back(dn);
    const double s = damping.next(std::span<const double>(defect.data(), static_cast<std::size_t>(defect.size())));
    out.u += s * defect;
    out.iterations = it + 1;
    if (dn <= 0.1 * tol) {
      out.residual = space->norm(out.u - A(out.u) - B(out.u));
      if (out.residual <= tol) return out;
    }
  }
  throw NonConvergence("solve_condkras: no fixed point within " + std::to_string(max_iter) +
                           " iterations",
                       out.defects);
}

}  // namespace hybridbvp
