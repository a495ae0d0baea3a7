#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <hybridbvp/coupled.hpp>
#include <hybridbvp/errors.hpp>
#include <hybridbvp/poincare.hpp>
#include <hybridbvp/problem_io.hpp>
#include <hybridbvp/report_json.hpp>

#include "sandbox.hpp"

namespace hybridbvp::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string problem = "paper-example";
  std::string out = ".";
  std::optional<std::size_t> n_cells;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool force = false;
  bool nested_inner = false;
  std::string u_file;
  std::string v_file;
  std::optional<double> p;
};

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_mt("hybridbvp");
    l->set_pattern("[%l] %v");
    return l;
  }();
  return log;
}

void configure_logging() {
  const char* env = std::getenv("HYBRIDBVP_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") logger()->set_level(spdlog::level::err);
  else if (level == "info") logger()->set_level(spdlog::level::info);
  else if (level == "debug") logger()->set_level(spdlog::level::debug);
  else throw ParseError("HYBRIDBVP_LOG must be error, info or debug, got '" + level + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ParseError("write failed for '" + path.string() + "'");
}

// --config file: the same settings as the flags, flags win.
void load_config(const std::string& path, RunConfig& cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& x = it.value();
      if (k == "problem") {
        // inline problem objects are accepted as well as names and paths
        cfg.problem = x.is_string() ? x.get<std::string>() : x.dump();
      } else if (k == "out") {
        cfg.out = x.get<std::string>();
      } else if (k == "n_cells") {
        if (!x.is_number_unsigned()) throw ParseError("config \"n_cells\" must be a positive integer");
        cfg.n_cells = x.get<std::size_t>();
      } else if (k == "tol") {
        if (!x.is_number()) throw ParseError("config \"tol\" must be a number");
        cfg.tol = x.get<double>();
      } else if (k == "seed") {
        if (!x.is_number_unsigned()) throw ParseError("config \"seed\" must be a non-negative integer");
        cfg.seed = x.get<std::uint64_t>();
      } else if (k == "force") {
        cfg.force = x.get<bool>();
      } else if (k == "nested_inner") {
        cfg.nested_inner = x.get<bool>();
      } else if (k == "u_file") {
        cfg.u_file = x.get<std::string>();
      } else if (k == "v_file") {
        cfg.v_file = x.get<std::string>();
      } else if (k == "p") {
        if (!x.is_number()) throw ParseError("config \"p\" must be a number");
        cfg.p = x.get<double>();
      } else {
        throw ParseError("unknown config key \"" + k + "\"");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

ProblemSpec resolve_problem(const RunConfig& cfg) {
  ProblemSpec spec;
  const auto names = registry_names();
  if (std::find(names.begin(), names.end(), cfg.problem) != names.end()) {
    spec = registry(cfg.problem);
  } else if (!cfg.problem.empty() && cfg.problem.front() == '{') {
    spec = problem_from_json(cfg.problem);
  } else if (fs::is_regular_file(cfg.problem)) {
    spec = load_problem(cfg.problem);
  } else {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw ParseError("unknown problem '" + cfg.problem + "' (not a file; built-in: " + known + ")");
  }
  if (cfg.n_cells) spec.n_cells = *cfg.n_cells;
  if (cfg.tol) {
    if (!(*cfg.tol > 0.0)) throw ParseError("--tol must be positive");
    spec.tol.outer = *cfg.tol;
    spec.tol.inner = 0.1 * *cfg.tol;
    spec.tol.c = *cfg.tol;
  }
  if (cfg.seed) spec.seed = *cfg.seed;
  if (cfg.nested_inner) spec.nested_inner = true;
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  return spec;
}

fs::path prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw ParseError("cannot create output directory '" + cfg.out + "'");
  return fs::path(cfg.out);
}

// Reads column `column` of a "t,..." CSV and resamples it on `grid`.
GridFunction read_column(const std::string& path, const std::string& column, const Grid& grid) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  const auto col = std::find(header.begin(), header.end(), column);
  if (header.empty() || header.front() != "t" || col == header.end()) {
    throw ParseError("'" + path + "' needs a header starting with t and a column " + column);
  }
  const auto idx = static_cast<std::size_t>(col - header.begin());
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("'" + path + "' row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (cells.size() != header.size()) throw ParseError("'" + path + "' row " + std::to_string(row) + ": wrong column count");
    values.push_back(cells[idx]);
  }
  if (values.size() < 3) throw ParseError("'" + path + "' needs at least 3 rows");
  const Grid file_grid(values.size() - 1);
  const GridFunction file(file_grid, std::move(values));
  if (file.grid() == grid) return file;
  return GridFunction::interpolate(grid, [&file](double t) { return file(t); });
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void log_failed(const CheckReport& report) {
  for (const auto& item : report.items) {
    if (!item.passed) {
      logger()->error("check failed: {} (margin {}, {}{})", item.name, item.worst_margin, item.witness,
                      item.detail.empty() ? "" : "; " + item.detail);
    }
  }
}

int cmd_solve(const RunConfig& cfg) {
  const ProblemSpec spec = resolve_problem(cfg);
  const fs::path out = prepare_out(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  logger()->info("checking assumptions for {}", spec.name);
  const AssumptionSummary checks = check_problem(spec);
  if (!checks.report.passed()) {
    log_failed(checks.report);
    if (!cfg.force) {
      write_file(out / "report.json", check_to_json(checks, spec));
      std::cout << "solve " << spec.name << ": assumption checks failed (use --force to solve anyway)\n";
      return kCheckFailed;
    }
    logger()->warn("--force: solving despite failed checks");
  }

  logger()->info("solving {} on {} cells", spec.name, spec.n_cells);
  SystemSolution sol = solve_system(spec);
  sol.report.assumptions = checks.report;
  const SolveReport& r = sol.report;
  if (r.clipped_at_end) logger()->warn("iterate clipped to the ball at termination; R does not certify the data");
  for (const auto& c : r.post_checks) {
    if (!c.passed) logger()->error("post-check failed: {} = {} > {}", c.name, c.value, c.tolerance);
  }

  write_file(out / "solution.csv", solution_csv(sol.u, sol.v));
  write_file(out / "report.json", report_to_json(r, spec));
  write_file(out / "trace.csv", trace_csv(r.trace));

  std::cout << "solve " << spec.name << ": " << (r.converged ? "converged" : "NOT converged") << ", n_cells "
            << r.n_cells << ", R " << sci(r.R_used) << ", |v|_inf " << sci(r.v_sup_norm) << ", |u|_p "
            << sci(r.u_p_norm) << ", eq1 " << sci(r.eq1_residual) << ", stages " << r.stages << ", "
            << sci(seconds_since(t0)) << " s\n";
  return r.converged ? kOk : kNonConvergence;
}

Vector as_vector(const GridFunction& f) {
  return Eigen::Map<const Vector>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

int cmd_solve_p(const RunConfig& cfg) {
  const ProblemSpec spec = resolve_problem(cfg);
  const fs::path out = prepare_out(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid(spec.n_cells);
  const GridFunction v = cfg.v_file.empty() ? GridFunction::zeros(grid) : read_column(cfg.v_file, "v", grid);

  const auto space = h10_space(spec.n_cells);
  const DualityMap J(space);
  const ParamOperator F = make_operator(spec.first, grid);
  // eps = 0 needs strong monotonicity; otherwise the smallest scheduled eps
  const double eps = F.strong_modulus ? 0.0 : spec.eps_schedule.back();
  RegularizedOptions ro;
  ro.tol = spec.tol.inner;
  const RegularizedResult res = solve_regularized(F, J, as_vector(v), eps, ro);
  const GridFunction u = with_boundary(grid, res.u);
  const double residual = dual_norm(assemble_F(u, v, spec.first), spec.n_cells);
  const bool ok = residual <= spec.tol.residual;

  std::vector<TraceRow> trace;
  for (std::size_t k = 0; k < res.residuals.size(); ++k) {
    trace.push_back({0, k, eps, res.residuals[k], 0.0, k < res.steps.size() ? res.steps[k] : 1.0, false});
  }
  write_file(out / "solution.csv", solution_csv(u, v));
  write_file(out / "trace.csv", trace_csv(trace));
  write_file(out / "report.json",
             flat_json({{"problem", spec.name},
                        {"equation", std::string("first")},
                        {"n_cells", static_cast<std::int64_t>(spec.n_cells)},
                        {"v_source", cfg.v_file.empty() ? std::string("zero") : cfg.v_file},
                        {"eps", eps},
                        {"converged", ok},
                        {"equation1_dual", residual},
                        {"tolerance", spec.tol.residual},
                        {"iterations", static_cast<std::int64_t>(res.iterations)},
                        {"u_p_norm", p_norm(u, spec.first.p)}}));
  std::cout << "solve-p " << spec.name << ": " << (ok ? "converged" : "NOT converged") << ", n_cells "
            << spec.n_cells << ", eq1 " << sci(residual) << ", iterations " << res.iterations << ", "
            << sci(seconds_since(t0)) << " s\n";
  return ok ? kOk : kNonConvergence;
}

int cmd_solve_q(const RunConfig& cfg) {
  const ProblemSpec spec = resolve_problem(cfg);
  const fs::path out = prepare_out(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid(spec.n_cells);
  const GridFunction u = cfg.u_file.empty() ? GridFunction::zeros(grid) : read_column(cfg.u_file, "u", grid);

  NonlocalSpec second = spec.second;
  second.c_tol = spec.tol.c;
  FixedPointOptions fo;
  fo.tol = spec.tol.outer;
  fo.max_iter = spec.max_outer;
  const FixedPointResult fp = fixed_point_T(u, GridFunction::zeros(grid), second, fo);
  const auto t = apply_T_detailed(u, fp.v, second);
  const auto ver = verify_nonlocal_solution(u, fp.v, second, std::nullopt, spec.tol.boundary);
  const bool ok = ver.report.passed();
  if (!ok) log_failed(ver.report);

  std::vector<TraceRow> trace;
  for (std::size_t k = 0; k < fp.defects.size(); ++k) trace.push_back({0, k, 0.0, 0.0, fp.defects[k], 1.0, false});
  write_file(out / "solution.csv", solution_csv(u, fp.v));
  write_file(out / "trace.csv", trace_csv(trace));
  write_file(out / "report.json",
             flat_json({{"problem", spec.name},
                        {"equation", std::string("second")},
                        {"n_cells", static_cast<std::int64_t>(spec.n_cells)},
                        {"u_source", cfg.u_file.empty() ? std::string("zero") : cfg.u_file},
                        {"converged", ok},
                        {"c", t.c},
                        {"theta_at_c", t.theta_at_c},
                        {"iterations", static_cast<std::int64_t>(fp.iterations)},
                        {"equation2_classical", ver.interior_residual},
                        {"equation2_classical_tolerance", ver.interior_tolerance},
                        {"boundary_left", ver.left_error},
                        {"boundary_right", ver.right_error},
                        {"v_sup_norm", sup_norm(fp.v)}}));
  std::cout << "solve-q " << spec.name << ": " << (ok ? "converged" : "NOT converged") << ", n_cells "
            << spec.n_cells << ", c " << sci(t.c) << ", classical " << sci(ver.interior_residual) << ", "
            << sci(seconds_since(t0)) << " s\n";
  return ok ? kOk : kNonConvergence;
}

int cmd_check(const RunConfig& cfg) {
  const ProblemSpec spec = resolve_problem(cfg);
  const fs::path out = prepare_out(cfg);
  const AssumptionSummary summary = check_problem(spec);
  write_file(out / "report.json", check_to_json(summary, spec));
  for (const auto& item : summary.report.items) {
    std::cout << (item.passed ? "PASS  " : "FAIL  ") << item.name << "  margin " << sci(item.worst_margin);
    if (!item.detail.empty()) std::cout << "  " << item.detail;
    std::cout << "\n";
  }
  const bool ok = summary.report.passed();
  std::cout << "check " << spec.name << ": " << (ok ? "all passed" : "FAILED") << ", lambda_p "
            << sci(summary.lambda_p) << ", R " << (summary.radius.R ? sci(*summary.radius.R) : "none") << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_eigen(const RunConfig& cfg, bool problem_given) {
  double p = 2.0;
  std::size_t n = 1024;
  if (problem_given) {
    const ProblemSpec spec = resolve_problem(cfg);
    p = spec.first.p;
    n = spec.n_cells;
  }
  if (cfg.p) p = *cfg.p;
  if (cfg.n_cells) n = *cfg.n_cells;
  if (!(p > 1.0) || n < 2) throw ParseError("eigen needs p > 1 and at least 2 cells");
  const fs::path out = prepare_out(cfg);
  PoincareOptions po;
  if (cfg.seed) po.seed = *cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const PoincareResult res = poincare_eigenpair(p, n, po);
  const double secs = seconds_since(t0);

  std::string csv = "t,u\n";
  char buf[64];
  for (std::size_t i = 0; i < res.eigenfunction.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", res.eigenfunction.grid().node(i), res.eigenfunction[i]);
    csv += buf;
  }
  write_file(out / "eigenfunction.csv", csv);
  write_file(out / "report.json", flat_json({{"p", p},
                                            {"n_cells", static_cast<std::int64_t>(n)},
                                            {"lambda_p", res.value},
                                            {"iterations", static_cast<std::int64_t>(res.iterations)},
                                            {"restarts", static_cast<std::int64_t>(po.restarts)},
                                            {"seed", static_cast<std::int64_t>(po.seed)}}));
  char line[160];
  std::snprintf(line, sizeof line, "eigen p=%g n_cells=%zu: lambda_p = %.10g (%.3g s)\n", p, n, res.value, secs);
  std::cout << line;
  return kOk;
}

std::string vec2(const Vector& x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.12g, %.12g]", x[0], x[1]);
  return buf;
}

int cmd_sandbox(const std::string& demo, const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const auto space = sandbox::plane();
  const double tol = cfg.tol.value_or(1e-12);
  std::vector<std::pair<std::string, JsonScalar>> fields{{"demo", demo}};
  std::string line;
  if (demo == "browder-minty") {
    const auto d = sandbox::browder_minty_demo();
    const auto F = d.op();
    RegularizedOptions ro;
    ro.tol = tol;
    const auto res = solve_regularized(F, DualityMap(space), Vector::Zero(2), 0.0, ro);
    const double r = F.eval(res.u, Vector::Zero(2)).norm();
    fields.insert(fields.end(), {{"u0", res.u[0]}, {"u1", res.u[1]}, {"residual", r},
                                 {"iterations", static_cast<std::int64_t>(res.iterations)}});
    line = "u = " + vec2(res.u) + ", residual " + sci(r);
  } else if (demo == "lambda0") {
    const auto d = sandbox::lambda0_demo();
    Lambda0Options lo;
    lo.m = d.m();
    if (cfg.seed) lo.seed = *cfg.seed;
    const auto l = krasnoselskii_lambda0(d.A(), d.B(), space, lo);
    const auto e = solve_eigen(d.A(), d.B(), l.certified_lambda0 * lo.safety_factor, l.certified_radius, l.m, space, tol);
    fields.insert(fields.end(), {{"m", l.m}, {"r", l.r}, {"lambda0", l.lambda0}, {"certified_radius", l.certified_radius},
                                 {"certified_lambda0", l.certified_lambda0}, {"lambda", l.certified_lambda0 * lo.safety_factor},
                                 {"u0", e.u[0]}, {"u1", e.u[1]}, {"residual", e.residual}});
    line = "lambda0 " + sci(l.lambda0) + ", certified " + sci(l.certified_lambda0) + ", u = " + vec2(e.u) +
           ", residual " + sci(e.residual);
  } else if (demo == "condkras") {
    const auto d = sandbox::condkras_demo();
    const auto res = solve_condkras(d.A(), d.B(), d.D(), d.m(), space, tol);
    fields.insert(fields.end(), {{"m", d.m()}, {"u0", res.u[0]}, {"u1", res.u[1]}, {"residual", res.residual},
                                 {"iterations", static_cast<std::int64_t>(res.iterations)}});
    line = "u = " + vec2(res.u) + ", residual " + sci(res.residual) + ", iterations " + std::to_string(res.iterations);
  } else {
    throw ParseError("unknown sandbox demo '" + demo + "'");
  }
  write_file(out / "report.json", flat_json(fields));
  std::cout << "sandbox " << demo << ": " << line << "\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Hybrid solver for a coupled p-Laplacian / nonlocal q-Laplacian system", "hybridbvp"};
  app.require_subcommand(1);

  std::string config_path;
  std::string problem;
  std::string out;
  std::size_t n_cells = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool force = false;
  bool nested = false;
  std::string u_file;
  std::string v_file;
  double p = 0.0;
  std::vector<CLI::Option*> problem_opts;
  struct Common {
    CLI::Option* config;
    CLI::Option* problem;
    CLI::Option* out;
    CLI::Option* n_cells;
    CLI::Option* tol;
    CLI::Option* seed;
  };
  std::map<CLI::App*, Common> common;

  auto add_common = [&](CLI::App* sub, bool with_problem) {
    Common c{};
    c.config = sub->add_option("--config", config_path, "JSON file with run settings")->check(CLI::ExistingFile);
    if (with_problem) c.problem = sub->add_option("--problem", problem, "built-in problem name or problem JSON path");
    c.out = sub->add_option("-o,--out", out, "output directory");
    c.n_cells = sub->add_option("--n-cells", n_cells, "grid cells")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
    c.tol = sub->add_option("--tol", tol, "outer tolerance")->check(CLI::PositiveNumber);
    c.seed = sub->add_option("--seed", seed, "seed for sampled checks");
    common[sub] = c;
  };

  auto* solve = app.add_subcommand("solve", "solve the coupled system");
  add_common(solve, true);
  auto* force_opt = solve->add_flag("--force", force, "solve even when assumption checks fail");
  auto* nested_opt = solve->add_flag("--nested-inner", nested, "run T to its fixed point inside each outer step");

  auto* solve_p = app.add_subcommand("solve-p", "solve the first equation for a fixed v");
  add_common(solve_p, true);
  auto* v_opt = solve_p->add_option("--v-file", v_file, "CSV with columns t,...,v (default v = 0)")->check(CLI::ExistingFile);

  auto* solve_q = app.add_subcommand("solve-q", "solve the second equation for a fixed u");
  add_common(solve_q, true);
  auto* u_opt = solve_q->add_option("--u-file", u_file, "CSV with columns t,u,... (default u = 0)")->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "run the assumption checks and compute the radius");
  add_common(check, true);

  auto* eigen = app.add_subcommand("eigen", "Poincare constant lambda_p");
  add_common(eigen, true);
  auto* p_opt = eigen->add_option("--p", p, "exponent (default 2, or the problem's p)")->check(CLI::Range(1.0 + 1e-12, 1e6));

  auto* sandbox_cmd = app.add_subcommand("sandbox", "two-dimensional demos of the abstract engine");
  sandbox_cmd->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> demos;
  for (const char* name : {"browder-minty", "lambda0", "condkras"}) {
    auto* d = sandbox_cmd->add_subcommand(name, std::string(name) + " demo");
    add_common(d, false);
    demos.emplace_back(name, d);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    configure_logging();

    CLI::App* leaf = app.get_subcommands().front();
    if (leaf == sandbox_cmd) leaf = sandbox_cmd->get_subcommands().front();
    const Common& c = common.at(leaf);

    RunConfig cfg;
    if (c.config->count()) load_config(config_path, cfg);
    if (c.problem && c.problem->count()) cfg.problem = problem;
    if (c.out->count()) cfg.out = out;
    if (c.n_cells->count()) cfg.n_cells = n_cells;
    if (c.tol->count()) cfg.tol = tol;
    if (c.seed->count()) cfg.seed = seed;
    if (leaf == solve) {
      if (force_opt->count()) cfg.force = true;
      if (nested_opt->count()) cfg.nested_inner = true;
    }
    if (leaf == solve_p && v_opt->count()) cfg.v_file = v_file;
    if (leaf == solve_q && u_opt->count()) cfg.u_file = u_file;
    if (leaf == eigen && p_opt->count()) cfg.p = p;

    if (leaf == solve) return cmd_solve(cfg);
    if (leaf == solve_p) return cmd_solve_p(cfg);
    if (leaf == solve_q) return cmd_solve_q(cfg);
    if (leaf == check) return cmd_check(cfg);
    if (leaf == eigen) return cmd_eigen(cfg, c.problem->count() > 0 || c.config->count() > 0);
    for (const auto& [name, d] : demos) {
      if (leaf == d) return cmd_sandbox(name, cfg);
    }
    return kConfigError;
  } catch (const ParseError& e) {
    logger()->error("{}", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    logger()->error("{}", e.what());
    return kConfigError;
  } catch (const InvarianceViolation& e) {
    logger()->error("invariance violated: {}", e.what());
    return kCheckFailed;
  } catch (const NonConvergence& e) {
    logger()->error("no convergence: {}", e.what());
    if (!e.residual_trace().empty()) logger()->error("last residual {}", e.residual_trace().back());
    return kNonConvergence;
  } catch (const DomainError& e) {
    logger()->error("evaluation failed: {}", e.what());
    return kNonConvergence;
  }
}

}  // namespace hybridbvp::cli
