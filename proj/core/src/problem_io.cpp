#include "hybridbvp/problem_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

using json = nlohmann::ordered_json;

namespace {

Expr expr_at(const json& j, const char* key, std::initializer_list<Var> allowed) {
  if (!j.is_string()) throw ParseError(std::string("\"") + key + "\" must be an expression string");
  try {
    return parse(j.get<std::string>(), allowed);
  } catch (const ParseError& e) {
    throw ParseError(std::string("\"") + key + "\": " + e.what());
  }
}

double number_at(const json& j, const char* key) {
  if (!j.is_number()) throw ParseError(std::string("\"") + key + "\" must be a number");
  return j.get<double>();
}

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ParseError("unknown key \"" + item.key() + "\" in " + where);
  }
}

BVFunction bv_from(const json& j) {
  require_keys(j, {"breakpoints", "left_values", "right_values", "density"}, "BV function");
  auto vec = [&](const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
    for (const auto& x : j[key]) out.push_back(number_at(x, key));
    return out;
  };
  std::optional<BVFunction::Density> density;
  if (j.contains("density")) {
    const Expr e = expr_at(j["density"], "density", {Var::t});
    density = BVFunction::Density{[e](double t) { return e(Env{{Var::t, t}}); }, e.source()};
  }
  try {
    return BVFunction(vec("breakpoints"), vec("left_values"), vec("right_values"), density);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("BV function: ") + e.what());
  }
}

json bv_json(const BVFunction& a) {
  json j;
  j["breakpoints"] = a.breakpoints();
  j["left_values"] = a.left_values();
  j["right_values"] = a.right_values();
  if (a.density()) j["density"] = a.density()->source;
  return j;
}

void apply_json(ProblemSpec& s, const json& j) {
  require_keys(j,
               {"base", "name", "p", "phi", "m", "M", "f", "delta", "q", "g", "A", "B", "C", "r", "theta", "h0",
                "h1", "alpha", "beta", "A0", "A1", "sigma", "n_cells", "tolerances", "epsilon_schedule",
                "max_outer", "radius", "nested_inner", "seed", "quadrature"},
               "problem");
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("\"name\" must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("p")) s.first.p = number_at(j["p"], "p");
  if (j.contains("phi")) s.first.phi.phi = expr_at(j["phi"], "phi", {Var::t, Var::y, Var::r});
  if (j.contains("m")) s.first.phi.m = expr_at(j["m"], "m", {Var::y});
  if (j.contains("M")) s.first.phi.M = expr_at(j["M"], "M", {Var::y});
  if (j.contains("f")) s.first.f.f = expr_at(j["f"], "f", {Var::t, Var::u, Var::v});
  if (j.contains("delta")) s.first.f.delta = expr_at(j["delta"], "delta", {Var::v});

  auto& g = s.second.g;
  if (j.contains("q")) g.q = number_at(j["q"], "q");
  if (j.contains("g")) g.g = expr_at(j["g"], "g", {Var::t, Var::u, Var::v});
  if (j.contains("A")) g.A = number_at(j["A"], "A");
  if (j.contains("B")) g.B = number_at(j["B"], "B");
  if (j.contains("C")) g.C = number_at(j["C"], "C");
  if (j.contains("r")) g.r = number_at(j["r"], "r");
  if (j.contains("theta")) g.theta = number_at(j["theta"], "theta");

  auto& h = s.second.h;
  if (j.contains("h0")) h.h0 = expr_at(j["h0"], "h0", {Var::v});
  if (j.contains("h1")) h.h1 = expr_at(j["h1"], "h1", {Var::v});
  auto pair = [&](const char* key, double& a, double& b) {
    if (!j.contains(key)) return;
    const auto& x = j[key];
    if (!x.is_array() || x.size() != 2) throw ParseError(std::string("\"") + key + "\" must be [value0, value1]");
    a = number_at(x[0], key);
    b = number_at(x[1], key);
  };
  pair("alpha", h.alpha0, h.alpha1);
  pair("beta", h.beta0, h.beta1);
  if (j.contains("A0")) h.A0 = bv_from(j["A0"]);
  if (j.contains("A1")) h.A1 = bv_from(j["A1"]);

  if (j.contains("sigma")) {
    const auto& x = j["sigma"];
    require_keys(x, {"exponent", "alpha", "beta"}, "\"sigma\"");
    if (x.contains("exponent")) s.sigma.exponent = number_at(x["exponent"], "sigma.exponent");
    if (x.contains("alpha")) s.sigma.alpha = number_at(x["alpha"], "sigma.alpha");
    if (x.contains("beta")) s.sigma.beta = number_at(x["beta"], "sigma.beta");
  }
  if (j.contains("n_cells")) {
    if (!j["n_cells"].is_number_unsigned()) throw ParseError("\"n_cells\" must be a positive integer");
    s.n_cells = j["n_cells"].get<std::size_t>();
  }
  if (j.contains("tolerances")) {
    const auto& x = j["tolerances"];
    require_keys(x, {"inner", "outer", "c", "residual", "gamma", "boundary"}, "\"tolerances\"");
    auto& t = s.tol;
    for (auto [key, slot] : {std::pair<const char*, double*>{"inner", &t.inner}, {"outer", &t.outer}, {"c", &t.c},
                             {"residual", &t.residual}, {"gamma", &t.gamma}, {"boundary", &t.boundary}}) {
      if (x.contains(key)) *slot = number_at(x[key], key);
    }
  }
  if (j.contains("epsilon_schedule")) {
    const auto& x = j["epsilon_schedule"];
    if (!x.is_array() || x.empty()) throw ParseError("\"epsilon_schedule\" must be a non-empty array");
    s.eps_schedule.clear();
    for (const auto& e : x) s.eps_schedule.push_back(number_at(e, "epsilon_schedule"));
  }
  if (j.contains("max_outer")) {
    if (!j["max_outer"].is_number_unsigned()) throw ParseError("\"max_outer\" must be a positive integer");
    s.max_outer = j["max_outer"].get<std::size_t>();
  }
  if (j.contains("radius")) {
    if (j["radius"].is_null()) s.radius.reset();
    else s.radius = number_at(j["radius"], "radius");
  }
  if (j.contains("nested_inner")) {
    if (!j["nested_inner"].is_boolean()) throw ParseError("\"nested_inner\" must be true or false");
    s.nested_inner = j["nested_inner"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("\"seed\" must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("quadrature")) {
    const auto& x = j["quadrature"];
    const std::string rule = x.is_string() ? x.get<std::string>() : "";
    if (rule != "gauss2" && rule != "midpoint") throw ParseError("\"quadrature\" must be \"gauss2\" or \"midpoint\"");
    const auto r = rule == "gauss2" ? QuadratureRule::gauss2 : QuadratureRule::midpoint;
    s.first.rule = r;
    s.second.rule = r;
  }
}

}  // namespace

ProblemSpec problem_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("problem JSON must be an object");
  ProblemSpec s;
  if (j.contains("base")) {
    if (!j["base"].is_string()) throw ParseError("\"base\" must be a registry name");
    try {
      s = registry(j["base"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
  }
  apply_json(s, j);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  return s;
}

std::string problem_to_json(const ProblemSpec& s) {
  json j;
  j["name"] = s.name;
  j["p"] = s.first.p;
  j["phi"] = s.first.phi.phi.source();
  j["m"] = s.first.phi.m.source();
  j["M"] = s.first.phi.M.source();
  j["f"] = s.first.f.f.source();
  j["delta"] = s.first.f.delta.source();
  const auto& g = s.second.g;
  j["q"] = g.q;
  j["g"] = g.g.source();
  j["A"] = g.A;
  j["B"] = g.B;
  j["C"] = g.C;
  j["r"] = g.r;
  j["theta"] = g.theta;
  const auto& h = s.second.h;
  j["h0"] = h.h0.source();
  j["h1"] = h.h1.source();
  j["alpha"] = {h.alpha0, h.alpha1};
  j["beta"] = {h.beta0, h.beta1};
  j["A0"] = bv_json(h.A0);
  j["A1"] = bv_json(h.A1);
  j["sigma"] = {{"exponent", s.sigma.exponent}, {"alpha", s.sigma.alpha}, {"beta", s.sigma.beta}};
  j["n_cells"] = s.n_cells;
  j["tolerances"] = {{"inner", s.tol.inner},       {"outer", s.tol.outer}, {"c", s.tol.c},
                     {"residual", s.tol.residual}, {"gamma", s.tol.gamma}, {"boundary", s.tol.boundary}};
  j["epsilon_schedule"] = s.eps_schedule;
  j["max_outer"] = s.max_outer;
  j["radius"] = s.radius ? json(*s.radius) : json(nullptr);
  j["nested_inner"] = s.nested_inner;
  j["seed"] = s.seed;
  j["quadrature"] = s.first.rule == QuadratureRule::gauss2 ? "gauss2" : "midpoint";
  return j.dump(2) + "\n";
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

BVFunction bv_from_json(std::string_view text) {
  try {
    return bv_from(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("BV JSON: ") + e.what(), e.byte);
  }
}

std::string bv_to_json(const BVFunction& a) { return bv_json(a).dump(); }

}  // namespace hybridbvp
