#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hybridbvp {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Finite-dimensional Hilbert space R^n with inner product <a, b> = a^T G b
/// for a symmetric positive-definite Gram matrix G (identity by default).
/// Dual vectors are measured with ||r||_* = sqrt(r^T G^{-1} r).
class VecSpace {
 public:
  explicit VecSpace(Eigen::Index dim);
  /// Throws InvalidArgument if `gram` is not symmetric to 1e-12 or the
  /// Cholesky factorization fails.
  explicit VecSpace(SparseMatrix gram);

  Eigen::Index dim() const noexcept { return dim_; }
  bool is_identity() const noexcept { return !chol_; }
  const SparseMatrix& gram() const noexcept { return gram_; }

  double inner(const Vector& a, const Vector& b) const;
  double norm(const Vector& a) const;
  /// G a: the dual vector representing a.
  Vector lower(const Vector& a) const;
  /// G^{-1} r: the primal vector representing r.
  Vector riesz(const Vector& r) const;
  double dual_norm(const Vector& r) const;

 private:
  Eigen::Index dim_;
  SparseMatrix gram_;
  std::shared_ptr<const Eigen::SimplicialLLT<SparseMatrix>> chol_;
};

/// Discrete duality map J u = G u. Linear, J(0) = 0, <Ju, u> = ||u||^2 and
/// strictly monotone because G is positive definite.
class DualityMap {
 public:
  explicit DualityMap(std::shared_ptr<const VecSpace> space);

  Vector operator()(const Vector& u) const { return space_->lower(u); }
  const VecSpace& space() const noexcept { return *space_; }
  std::shared_ptr<const VecSpace> space_ptr() const noexcept { return space_; }

 private:
  std::shared_ptr<const VecSpace> space_;
};

/// Parametric operator F(u, v) with values in the dual of the u-space.
/// Structure flags are claims; the sampled verifiers below check them.
struct ParamOperator {
  std::function<Vector(const Vector& u, const Vector& v)> eval;
  bool monotone = true;
  std::optional<double> strong_modulus;
  /// Coercivity minorant gamma(||u||, ||v||) <= <F(u, v), u>; optional.
  std::function<double(double, double)> gamma;
  /// Norm fed to gamma's first argument; the space norm when empty.
  std::function<double(const Vector&)> u_norm;
  /// Optional preconditioner: approximately solves (F'(u, v) + eps J) d = r.
  std::function<Vector(const Vector& u, const Vector& v, double eps, const Vector& r)> tangent_solve;
  /// Set when `eval` may be called from several threads at once.
  bool concurrent_safe = false;
};

/// G(u, v) with values in the v-space.
struct CompactMap {
  std::function<Vector(const Vector& u, const Vector& v)> eval;
  /// Majorant psi(||u||, ||v||) >= ||G(u, v)||; optional.
  std::function<double(double, double)> majorant;
  /// Norm of the v-space; Euclidean when empty.
  std::function<double(const Vector&)> v_norm;
};

struct RegularizedOptions {
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  std::optional<Vector> initial_guess;
};

struct RegularizedResult {
  Vector u;
  std::vector<double> residuals;  // dual norms, one per accepted iterate
  std::vector<double> steps;      // accepted step sizes
  std::size_t iterations = 0;
};

/// Solves F(u, v) + eps J u = 0 for u by damped preconditioned descent
/// u <- u - tau P^{-1}(F(u, v) + eps J u), P = G or the operator's tangent,
/// halving tau until the dual residual strictly decreases.
///
/// Throws InvalidArgument when eps < 0, or eps = 0 without a strong
/// monotonicity modulus; NonConvergence (with the residual trace) when the
/// budget runs out or no step decreases the residual.
RegularizedResult solve_regularized(const ParamOperator& F, const DualityMap& J, const Vector& v,
                                    double eps, const RegularizedOptions& options = {});

/// One row of an iteration trace.
struct TraceRow {
  std::size_t stage = 0;
  std::size_t iter = 0;
  double eps = 0.0;
  double residual = 0.0;  // dual norm of F(u, v) + eps J u after the update
  double update = 0.0;    // norm of the undamped fixed-point defect G(S(v), v) - v
  double step = 1.0;      // damping factor applied
  bool clipped = false;
};

/// CSV with header stage,iter,eps,residual,update,step,clipped and 17
/// significant digits.
std::string trace_csv(std::span<const TraceRow> rows);

/// Damping for Picard-type updates v <- v + s (T(v) - v). Starts at
/// `initial`; halves s whenever two successive defects point in opposite
/// directions (negative inner product).
class DampingPolicy {
 public:
  explicit DampingPolicy(double initial = 1.0, double min_factor = 1.0 / 1024.0);

  double factor() const noexcept { return s_; }
  /// Feeds the undamped defect and returns the factor to apply to it.
  double next(std::span<const double> defect);

 private:
  double s_;
  double min_;
  std::vector<double> previous_;
};

/// eps_k = 2^-k, k = 0..40.
std::vector<double> default_epsilon_schedule();

struct HybridOptions {
  std::vector<double> eps_schedule = default_epsilon_schedule();
  double tol_inner = 1e-11;
  double tol_outer = 1e-10;
  std::size_t max_outer = 500;  // per stage
  std::size_t max_inner = 20000;
  double initial_damping = 1.0;
  std::optional<Vector> u0;
  std::optional<Vector> v0;
};

struct HybridResult {
  Vector u;
  Vector v;
  std::vector<TraceRow> trace;
  bool converged = false;
  bool clipped_at_end = false;
  double final_eps = 0.0;
  double final_update = 0.0;
  double final_residual = 0.0;  // ||F(u, v)||_* without the eps term
  std::optional<double> gamma_at_solution;
  std::size_t stages = 0;
};

/// For each eps in the schedule iterates v <- v + s (G(S_eps(v), v) - v),
/// S_eps = solve_regularized, with iterates radially projected onto the ball
/// of radius R in the v-norm (reported, since clipping at the end means R does
/// not certify the data). u and v are warm-started across stages. Stops when
/// the defect and ||F(u, v)||_* are both <= tol_outer, or once
/// eps ||Ju||_* < 0.1 tol_outer.
///
/// Throws NonConvergence naming the stage when an inner solve fails or a
/// stage exhausts max_outer.
HybridResult hybrid_solve(const ParamOperator& F, const CompactMap& G, const DualityMap& J, double R,
                          const HybridOptions& options = {});

using VectorMap = std::function<Vector(const Vector&)>;
using PairSampler = std::function<std::pair<Vector, Vector>(std::mt19937_64&)>;

/// Pairs drawn independently from the ball of `radius` about the origin
/// (radially uniform in the space norm).
PairSampler ball_pair_sampler(std::shared_ptr<const VecSpace> space, double radius);

struct SampleOptions {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 42;
  /// Evaluate samples on several threads; the map must tolerate it. The
  /// pairs are still drawn sequentially, so results do not depend on it.
  bool concurrent = false;
};

/// max over sampled pairs of <A(u) - A(w), u - w> / ||u - w||^2: a lower
/// bound on the one-sided constant m. Coincident pairs are skipped; throws
/// InvalidArgument if every pair is coincident.
double one_sided_constant(const VectorMap& A, const PairSampler& sampler, const VecSpace& space,
                          const SampleOptions& options = {});

/// min over sampled pairs of <F(u, v) - F(w, v), u - w> / ||u - w||^2 for a
/// fixed v: negative values witness a failure of monotonicity.
double monotonicity_margin(const ParamOperator& F, const Vector& v, const PairSampler& sampler,
                           const VecSpace& space, const SampleOptions& options = {});

struct Lambda0Options {
  /// One-sided constant of A; estimated by sampling when absent.
  std::optional<double> m;
  std::size_t sample_budget = 10000;
  std::uint64_t seed = 42;
  double safety_factor = 0.9;
};

struct Lambda0Result {
  double m = 0.0;
  bool m_estimated = false;
  double r = 0.0;          // ||A(0)|| / (1 - m)
  double sup_b = 0.0;      // sampled sup of ||B|| on the ball of radius r
  double lambda0 = 0.0;    // 1 / (1 + sup_b); sampled sup, so an over-estimate
  double lambda0_safe = 0.0;
  /// Radius (||A(0)|| + 1) / (1 - m), for which ||u|| < radius does follow
  /// from u - A(u) = lambda B(P(u)) whenever lambda sup ||B|| < 1.
  double certified_radius = 0.0;
  double certified_sup_b = 0.0;
  double certified_lambda0 = 0.0;
};

/// Radius and parameter bound for A(u) = lambda B(u) + u. Throws
/// InvalidArgument when m >= 1.
Lambda0Result krasnoselskii_lambda0(const VectorMap& A, const VectorMap& B,
                                    std::shared_ptr<const VecSpace> space,
                                    const Lambda0Options& options = {});

/// Radial projection onto the closed ball of radius r: r u / ||u|| outside.
Vector radial_projection(const Vector& u, double r, const VecSpace& space);

struct EigenSolveResult {
  Vector u;
  double residual = 0.0;  // ||u - A(u) - lambda B(P_r(u))||
  double norm = 0.0;
  std::size_t iterations = 0;
};

/// Solves u = A(u) + lambda B(P_r(u)) through F(u, v) = u - A(u) - v and
/// G(u, v) = lambda B(P_r(u)), A a one-sided contraction with constant m < 1.
/// Throws InvarianceViolation when the solution leaves the ball of radius r
/// (then it need not solve the unprojected equation).
EigenSolveResult solve_eigen(const VectorMap& A, const VectorMap& B, double lambda, double r,
                             double m, std::shared_ptr<const VecSpace> space, double tol = 1e-10);

/// Closed convex set given by a membership test and a projection.
struct ConvexSet {
  std::function<bool(const Vector&)> contains;
  std::function<Vector(const Vector&)> project;
};

struct CondKrasResult {
  Vector u;
  double residual = 0.0;  // ||u - A(u) - B(u)||
  std::size_t iterations = 0;
  std::vector<double> defects;
};

/// Fixed point of A + B via Picard iteration of T(u) = (I - A)^{-1} B(u)
/// from a point of D, each inverse by solve_regularized with modulus 1 - m.
/// Throws InvarianceViolation if an iterate of T leaves D, NonConvergence if
/// the iteration does not settle.
CondKrasResult solve_condkras(const VectorMap& A, const VectorMap& B, const ConvexSet& D, double m,
                              std::shared_ptr<const VecSpace> space, double tol = 1e-10,
                              std::size_t max_iter = 1000);

}  // namespace hybridbvp
