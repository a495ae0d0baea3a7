#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hybridbvp/coupled.hpp"

namespace hybridbvp {

/// Full solve report, including the problem it was run on. Key order and
/// number formatting are fixed, so equal inputs give equal bytes.
std::string report_to_json(const SolveReport& report, const ProblemSpec& spec);

/// Assumption checks and radius as produced by check_problem.
std::string check_to_json(const AssumptionSummary& summary, const ProblemSpec& spec);

/// CSV "t,u,v" with one row per node, 17 significant digits.
std::string solution_csv(const GridFunction& u, const GridFunction& v);

using JsonScalar = std::variant<double, std::int64_t, bool, std::string>;

/// A flat JSON object in the given key order.
std::string flat_json(const std::vector<std::pair<std::string, JsonScalar>>& fields);

}  // namespace hybridbvp
