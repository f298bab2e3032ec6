#pragma once

#include "wfdeploy/model.hpp"

#include <string>
#include <string_view>

namespace wfdeploy {

// Workflow file:
//   service <id> <location> <in_size> <out_size>
//   edge <producer> <consumer>
// Cost matrix file:
//   locations <id> <id> ...
//   <from> <c1> <c2> ...        one row per location, in header order
// `#` starts a comment line; blank lines are ignored.

/// Syntax only; run validate_workflow() for structural checks.
Workflow parse_workflow(std::string_view text);
std::string serialize_workflow(const Workflow& workflow);

CostMatrix parse_cost_matrix(std::string_view text);
std::string serialize_cost_matrix(const CostMatrix& matrix);

}  // namespace wfdeploy
