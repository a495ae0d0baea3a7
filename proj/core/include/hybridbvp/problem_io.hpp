#pragma once

#include <string>
#include <string_view>

#include "hybridbvp/bv_function.hpp"
#include "hybridbvp/coupled.hpp"

namespace hybridbvp {

/// Problem JSON: the union of the equation blocks
///   {"p", "phi", "m", "M", "f", "delta"}
///   {"q", "g", "A", "B", "C", "r", "theta", "h0", "h1", "alpha": [a0, a1],
///    "beta": [b0, b1], "A0": BV, "A1": BV}
/// plus {"name", "sigma": {"exponent", "alpha", "beta"}, "n_cells",
/// "tolerances": {"inner", "outer", "c", "residual", "gamma", "boundary"},
/// "epsilon_schedule": [...], "max_outer", "radius", "nested_inner", "seed",
/// "quadrature": "gauss2" | "midpoint", "base": registry name}.
/// BV = {"breakpoints", "left_values", "right_values", "density": expr in t}.
/// Missing keys keep the value of "base" (or the defaults). Unknown keys,
/// wrong types and malformed expressions raise ParseError.
ProblemSpec problem_from_json(std::string_view text);
std::string problem_to_json(const ProblemSpec& spec);

/// Reads a problem file. Throws ParseError when unreadable.
ProblemSpec load_problem(const std::string& path);

BVFunction bv_from_json(std::string_view text);
std::string bv_to_json(const BVFunction& a);

}  // namespace hybridbvp
