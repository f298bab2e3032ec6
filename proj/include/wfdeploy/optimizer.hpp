#pragma once

#include "wfdeploy/cost.hpp"
#include "wfdeploy/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wfdeploy {

struct SolveRequest {
  Workflow workflow;
  CostMatrix cost_matrix;
  std::vector<LocationId> candidate_regions;  // search order for every service
  Rational overhead_rate{0};
  std::optional<std::size_t> max_engines;
};

struct Solution {
  DeploymentPlan plan;
  CostReport report;
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = false;

  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Every cost-matrix location, in matrix order.
SolveRequest make_request(Workflow workflow, CostMatrix matrix, Rational overhead_rate,
                          std::optional<std::size_t> max_engines = std::nullopt);

/// Throws ValidationError when the workflow is invalid, a candidate region or
/// service location is unknown, candidates are empty/duplicated, or
/// max_engines is zero or exceeds the candidate count.
void validate_request(const SolveRequest& request);

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(long double size, std::uint64_t cap);
  long double size() const noexcept { return size_; }

 private:
  long double size_;
};

struct BruteForceOptions {
  std::uint64_t enumeration_cap = 10'000'000;
};

/// Enumerates every assignment in lexicographic order (workflow service order,
/// candidate order) and keeps the first one of minimum total cost.
Solution solve_brute_force(const SolveRequest& request, const BruteForceOptions& options = {});

struct BranchAndBoundOptions {
  unsigned threads = 1;
  /// Search stops (proven_optimal = false) once this many nodes were expanded.
  std::uint64_t node_limit = 200'000'000;
};

/// Depth-first branch and bound over services in topological order. Returns
/// the same plan as solve_brute_force, including tie-breaking. With more than
/// one thread, the root's branches are searched independently; the plan and
/// report do not depend on the thread count.
Solution solve_branch_and_bound(const SolveRequest& request,
                                const BranchAndBoundOptions& options = {});

/// Assignment of candidate-region indices, one slot per workflow service;
/// std::nullopt marks an unassigned service.
using PartialAssignment = std::vector<std::optional<std::size_t>>;

/// Lower bound on the total cost of every completion of `partial`. The
/// assigned services must be closed under predecessors. Exact when every
/// service is assigned.
Rational lower_bound(const PartialAssignment& partial, const SolveRequest& request);

/// All services on `region`. The region may be any matrix location, including
/// ones outside the candidate set.
Solution solve_centralized(const SolveRequest& request, std::string_view region);

struct SweepPoint {
  Rational rate;
  Solution solution;
};

/// One exact solve per rate, in the given order. `request.overhead_rate` is ignored.
std::vector<SweepPoint> sweep_overhead(const SolveRequest& request,
                                       const std::vector<Rational>& rates,
                                       const BranchAndBoundOptions& options = {});

/// Ratio of execution times (total movement), baseline over optimized.
/// Throws std::domain_error when either movement is zero.
Rational speedup(const Solution& baseline, const Solution& optimized);

}  // namespace wfdeploy
