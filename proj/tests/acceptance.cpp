// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <hybridbvp/bv_function.hpp>
#include <hybridbvp/coupled.hpp>
#include <hybridbvp/engine.hpp>
#include <hybridbvp/nonlocal.hpp>
#include <hybridbvp/plaplace.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "sandbox.hpp"

using namespace hybridbvp;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += (cond ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

fs::path workdir(const std::string& name) {
  const auto p = fs::temp_directory_path() / "hybridbvp_acceptance" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

double seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sup_error(const GridFunction& u, const std::function<double(double)>& exact) {
  double e = 0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - exact(u.grid().node(i))));
  return e;
}

Outcome poincare() {
  Outcome o;
  const auto out = workdir("eigen");
  int code = -1;
  const double secs = seconds([&] { code = cli::run({"eigen", "--p", "2", "--n-cells", "1024", "-o", out.string()}); });
  const double l2 = code == 0 ? read_json(out / "report.json")["lambda_p"].get<double>() : 0.0;
  o.require(code == 0 && std::abs(l2 - 9.8696) <= 0.01 * 9.8696, "p=2 lambda " + num(l2));
  o.require(secs < 5.0, "time " + num(secs) + " s");
  code = cli::run({"eigen", "--p", "3", "--n-cells", "1024", "-o", out.string()});
  const double l3 = code == 0 ? read_json(out / "report.json")["lambda_p"].get<double>() : 0.0;
  const double ref = oracle::poincare_inverse_iteration(3.0);
  o.require(std::abs(l3 - ref) <= 0.02 * ref, "p=3 lambda " + num(l3) + " vs oracle " + num(ref));
  return o;
}

Outcome manufactured_p() {
  Outcome o;
  auto solve = [](const char* name, std::size_t n) {
    const auto spec = registry(name).first;
    SolveUOptions opts;
    opts.eps = spec.p == 2 ? 0.0 : 1e-13;
    return solve_u(GridFunction::zeros(Grid(n)), spec, opts);
  };
  auto sin_pi = [](double t) { return std::sin(std::numbers::pi * t); };
  const double e128 = sup_error(solve("manufactured-p2", 128), sin_pi);
  const double e256 = sup_error(solve("manufactured-p2", 256), sin_pi);
  const double e3 = sup_error(solve("manufactured-p3", 256), [](double t) { return t * (1 - t); });
  o.require(e256 <= 5e-3, "p=2 error " + num(e256));
  o.require(e3 <= 1e-2, "p=3 error " + num(e3));
  o.require(e128 / e256 > 3.5 && e128 / e256 < 4.5, "p=2 ratio " + num(e128 / e256));
  return o;
}

Outcome nonlocal() {
  Outcome o;
  const Grid g(512);
  const auto zero = GridFunction::zeros(g);
  const auto t = apply_T_detailed(zero, zero, registry("manufactured-q2").second);
  const double err = sup_error(t.value, [](double s) { return s - s * s * s; });
  o.require(err <= 1e-3, "cubic error " + num(err));
  o.require(std::abs(t.theta_at_c) <= 1e-10, "|Theta(c)| " + num(std::abs(t.theta_at_c)));
  const double c = find_c(zero, zero, registry("manufactured-q2-sin").second);
  o.require(std::abs(c - std::numbers::pi) <= 1e-6, "|c - pi| " + num(std::abs(c - std::numbers::pi)));
  return o;
}

Outcome example() {
  Outcome o;
  const auto out = workdir("example");
  const int code = cli::run({"solve", "--problem", "paper-example", "--n-cells", "256", "-o", out.string()});
  o.require(code == 0, "solve exit " + std::to_string(code));
  if (code == 0) {
    const auto r = read_json(out / "report.json");
    const auto& res = r["residuals"];
    o.require(r["converged"].get<bool>(), "converged");
    o.require(res["equation1_dual"].get<double>() <= 1e-6, "eq1 " + num(res["equation1_dual"].get<double>()));
    o.require(res["equation2_classical"].get<double>() <= res["equation2_classical_tolerance"].get<double>(),
              "eq2 " + num(res["equation2_classical"].get<double>()) + " <= " +
                  num(res["equation2_classical_tolerance"].get<double>()));
    const double bd = std::max(res["boundary_left"].get<double>(), res["boundary_right"].get<double>());
    o.require(bd <= 1e-8, "boundary " + num(bd));
    o.require(r["gamma_at_solution"].get<double>() <= 1e-6, "gamma " + num(r["gamma_at_solution"].get<double>()));
    o.require(r["v_sup_norm"].get<double>() <= r["radius"]["R_used"].get<double>(),
              "|v| " + num(r["v_sup_norm"].get<double>()) + " <= R " + num(r["radius"]["R_used"].get<double>()));
  }
  const auto chk = workdir("check");
  const int ccode = cli::run({"check", "--problem", "paper-example", "-o", chk.string()});
  o.require(ccode == 0, "check exit " + std::to_string(ccode));
  if (ccode == 0) {
    const auto r = read_json(chk / "report.json");
    bool all = r["passed"].get<bool>();
    bool sigma = false;
    for (const auto& item : r["checks"]) {
      all = all && item["passed"].get<bool>();
      if (item["name"].get<std::string>().rfind("sigma <", 0) == 0) sigma = item["passed"].get<bool>();
    }
    o.require(all && sigma, "all checks incl. sigma = 2 < 4");
    o.require(!r["radius"]["R"].is_null() && std::isfinite(r["radius"]["R"].get<double>()),
              "finite R " + (r["radius"]["R"].is_null() ? std::string("none") : num(r["radius"]["R"].get<double>())));
  }
  return o;
}

Outcome boundedness() {
  Outcome o;
  const auto spec = registry("paper-example").second;
  const Grid g(64);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> amp(0.0, 3.0), node(-1.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const double au = amp(rng), av = amp(rng);
    std::vector<double> uu(g.n_nodes()), vv(g.n_nodes());
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
      uu[i] = (i == 0 || i == g.n_cells()) ? 0.0 : au * node(rng);
      vv[i] = av * node(rng);
    }
    const GridFunction u(g, uu), v(g, vv);
    const double lhs = sup_norm(apply_T(u, v, spec));
    worst = std::min(worst, boundedness_rhs(spec, sup_norm(u), sup_norm(v)) - lhs);
  }
  o.require(worst >= -1e-8, "1000 pairs, worst margin " + num(worst));
  return o;
}

Outcome sandbox_oracles() {
  Outcome o;
  const auto space = sandbox::plane();
  const auto ck = sandbox::condkras_demo();
  const auto r = solve_condkras(ck.A(), ck.B(), ck.D(), ck.m(), space, 1e-12);
  const auto A = ck.A();
  const auto B = ck.B();
  const Eigen::Vector2d newton = oracle::newton2(
      [&](const Eigen::Vector2d& x) -> Eigen::Vector2d { return x - A(x) - B(x); }, Eigen::Vector2d::Zero());
  o.require((r.u - newton).norm() <= 1e-8, "condKras vs Newton " + num((r.u - newton).norm()));

  const auto ld = sandbox::lambda0_demo();
  Lambda0Options lo;
  lo.m = ld.m();
  const auto l = krasnoselskii_lambda0(ld.A(), ld.B(), space, lo);
  const double lambda = 0.9 * l.certified_lambda0;
  const auto e = solve_eigen(ld.A(), ld.B(), lambda, l.certified_radius, l.m, space, 1e-12);
  const Eigen::Vector2d lin = (Eigen::Matrix2d::Identity() - ld.K - lambda * ld.N).lu().solve(ld.a + lambda * ld.b0);
  o.require((e.u - lin).norm() <= 1e-8, "lambda0 vs linear solve " + num((e.u - lin).norm()));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    Eigen::Matrix2d K;
    K << n(rng), n(rng), n(rng), n(rng);
    const double top =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (K + K.transpose())).eigenvalues().maxCoeff();
    SampleOptions so;
    so.n_samples = 10000;
    const double m = one_sided_constant([K](const Vector& u) -> Vector { return K * u; },
                                        ball_pair_sampler(space, 1.0), *space, so);
    worst = std::max(worst, std::abs(m - top));
  }
  o.require(worst <= 1e-6, "one-sided constant vs eigenvalue " + num(worst));
  return o;
}

Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> z(-20, 20), q(1.2, 6);
  double psi_err = 0;
  for (int k = 0; k < 10000; ++k) {
    const double x = z(rng), qq = q(rng);
    psi_err = std::max(psi_err, std::abs(psi_q_inv(psi_q(x, qq), qq) - x) / (1 + std::abs(x)));
  }
  o.require(psi_err <= 1e-12, "psi round trip " + num(psi_err));

  const Grid g(64);
  auto f = [](double t) { return std::exp(t); };
  auto h = [](double t) { return std::sin(5 * t); };
  const BVFunction a({0.2, 0.7}, {0.1, 0.9}, {0.4, 1.2});
  const double lin_err = std::abs(stieltjes_integral([&](double t) { return 2 * f(t) - h(t); }, a, g) -
                                  (2 * stieltjes_integral(f, a, g) - stieltjes_integral(h, a, g)));
  const double atom_err = std::abs(stieltjes_integral(f, BVFunction::step(0.45, 3.0), g) - 3 * std::exp(0.45));
  o.require(lin_err <= 1e-12 && atom_err <= 1e-12, "Stieltjes linearity " + num(lin_err) + ", atom " + num(atom_err));

  std::uniform_real_distribution<double> unit(0, 1);
  double tv_err = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> bp(5), left(5), right(5);
    for (auto& b : bp) b = unit(rng);
    std::sort(bp.begin(), bp.end());
    double level = unit(rng);
    for (int i = 0; i < 5; ++i) {
      left[i] = level += unit(rng);
      right[i] = level += unit(rng);
    }
    const BVFunction m(bp, left, right);
    const double span = m.right_values().back() - m.left_values().front();
    tv_err = std::max(tv_err, std::abs(total_variation(m) - span));
  }
  o.require(tv_err <= 1e-12, "variation of monotone BV " + num(tv_err));

  std::normal_distribution<double> nd(0, 1);
  bool sobolev = true;
  for (int k = 0; k < 1000; ++k) {
    const Grid gk(4 + k % 97);
    std::vector<double> x(gk.n_nodes());
    for (std::size_t i = 1; i + 1 < x.size(); ++i) x[i] = nd(rng);
    const GridFunction u(gk, x);
    for (double p : {2.0, 3.0, 5.0}) sobolev = sobolev && sup_norm(u) <= p_norm(u, p) + 1e-12;
  }
  o.require(sobolev, "Sobolev on 1000 grid functions");

  const auto spec = registry("paper-example").first;
  const std::size_t n = 32;
  const Grid gm(n);
  const auto F = make_operator(spec, gm);
  const auto space = h10_space(n);
  double margin = std::numeric_limits<double>::infinity();
  for (double amp : {0.0, 1.0, 2.0}) {
    const auto v = GridFunction::interpolate(gm, [amp](double t) { return amp * std::cos(3 * t); });
    const Vector vv = Eigen::Map<const Vector>(v.values().data(), static_cast<Eigen::Index>(v.size()));
    SampleOptions so;
    so.n_samples = 2000;
    margin = std::min(margin, monotonicity_margin(F, vv, ball_pair_sampler(space, 2.0), *space, so));
  }
  o.require(margin >= -1e-10, "monotonicity in u, margin " + num(margin));

  bool decreasing = true;
  const Grid gr(128);
  const auto Fr = make_operator(spec, gr);
  const auto v = GridFunction::interpolate(gr, [](double t) { return 1 + t; });
  const Vector vv = Eigen::Map<const Vector>(v.values().data(), static_cast<Eigen::Index>(v.size()));
  for (double eps : {1.0, 1e-3, 1e-8}) {
    const auto res = solve_regularized(Fr, DualityMap(h10_space(128)), vv, eps);
    for (std::size_t k = 1; k < res.residuals.size(); ++k) decreasing = decreasing && res.residuals[k] < res.residuals[k - 1];
  }
  o.require(decreasing, "accepted residuals strictly decrease");
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto a = workdir("det_a");
  const auto b = workdir("det_b");
  const int ca = cli::run({"solve", "--problem", "paper-example", "--seed", "7", "-o", a.string()});
  const int cb = cli::run({"solve", "--problem", "paper-example", "--seed", "7", "-o", b.string()});
  const auto ja = slurp(a / "report.json");
  o.require(ca == 0 && cb == 0 && !ja.empty(), "both runs succeed");
  o.require(ja == slurp(b / "report.json"), "report.json byte-identical (" + std::to_string(ja.size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"Poincare constant", poincare},
      {"manufactured p-Laplacian", manufactured_p},
      {"nonlocal equation", nonlocal},
      {"example end-to-end", example},
      {"boundedness of T", boundedness},
      {"sandbox oracle equivalence", sandbox_oracles},
      {"invariant suites", invariants},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.ok ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", o.ok ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
