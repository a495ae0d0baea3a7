#include "hybridbvp/report_json.hpp"

#include <cstdio>

#include <json.hpp>

#include "hybridbvp/problem_io.hpp"

namespace hybridbvp {

using json = nlohmann::ordered_json;

namespace {

json check_items(const CheckReport& report) {
  json out = json::array();
  for (const auto& item : report.items) {
    out.push_back({{"name", item.name},
                   {"passed", item.passed},
                   {"worst_margin", item.worst_margin},
                   {"witness", item.witness},
                   {"detail", item.detail}});
  }
  return out;
}

json radius_json(const RadiusResult& r) {
  return {{"R", r.R ? json(*r.R) : json(nullptr)},
          {"a", r.a},
          {"b", r.b},
          {"c", r.c},
          {"d", r.d},
          {"phi_at_R", r.phi_at_R},
          {"argmax_y", r.argmax_y}};
}

}  // namespace

std::string report_to_json(const SolveReport& r, const ProblemSpec& spec) {
  json j;
  j["problem"] = r.problem;
  j["n_cells"] = r.n_cells;
  j["converged"] = r.converged;
  j["start"] = r.start;
  j["nested_inner"] = r.nested_inner;
  j["lambda_p"] = r.lambda_p;
  json radius = radius_json(r.radius);
  radius["R_used"] = r.R_used;
  radius["forced"] = r.radius_forced;
  j["radius"] = radius;
  j["residuals"] = {{"equation1_dual", r.eq1_residual},
                    {"equation2_update", r.eq2_update},
                    {"equation2_classical", r.eq2_classical},
                    {"equation2_classical_tolerance", r.eq2_classical_tol},
                    {"boundary_left", r.boundary_left},
                    {"boundary_right", r.boundary_right}};
  j["gamma_at_solution"] = r.gamma_at_solution;
  j["u_p_norm"] = r.u_p_norm;
  j["v_sup_norm"] = r.v_sup_norm;
  j["c"] = r.c;
  j["theta_at_c"] = r.theta_at_c;
  j["final_eps"] = r.final_eps;
  j["stages"] = r.stages;
  j["outer_iterations"] = r.trace.size();
  j["clipped_at_end"] = r.clipped_at_end;
  json post = json::array();
  for (const auto& c : r.post_checks) {
    post.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
  }
  j["post_checks"] = post;
  j["assumptions"] = check_items(r.assumptions);
  j["spec"] = json::parse(problem_to_json(spec));
  return j.dump(2) + "\n";
}

std::string check_to_json(const AssumptionSummary& summary, const ProblemSpec& spec) {
  json j;
  j["problem"] = spec.name;
  j["passed"] = summary.report.passed();
  j["lambda_p"] = summary.lambda_p;
  j["radius"] = radius_json(summary.radius);
  j["checks"] = check_items(summary.report);
  j["spec"] = json::parse(problem_to_json(spec));
  return j.dump(2) + "\n";
}

std::string solution_csv(const GridFunction& u, const GridFunction& v) {
  std::string out = "t,u,v\n";
  char buf[96];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", u.grid().node(i), u[i], v[i]);
    out += buf;
  }
  return out;
}

std::string flat_json(const std::vector<std::pair<std::string, JsonScalar>>& fields) {
  json j = json::object();
  for (const auto& [key, value] : fields) {
    std::visit([&](const auto& x) { j[key] = x; }, value);
  }
  return j.dump(2) + "\n";
}

}  // namespace hybridbvp
