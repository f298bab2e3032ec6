#include "wfdeploy/optimizer.hpp"

#include "wfdeploy/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace wfdeploy {

SearchSpaceTooLarge::SearchSpaceTooLarge(long double size, std::uint64_t cap)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << std::fixed << std::setprecision(0) << "search space of " << size << " assignments exceeds the enumeration cap of " << cap;
        return msg.str();
      }()),
      size_(size) {}

SolveRequest make_request(Workflow workflow, CostMatrix matrix, Rational overhead_rate,
                          std::optional<std::size_t> max_engines) {
  std::vector<LocationId> candidates = matrix.locations();
  return SolveRequest{std::move(workflow), std::move(matrix), std::move(candidates), overhead_rate,
                      max_engines};
}

void validate_request(const SolveRequest& req) {
  std::vector<std::string> problems;
  for (const Violation& v : validate_workflow(req.workflow)) {
    problems.push_back(v.message);
  }
  for (const Violation& v : validate_locations(req.workflow, req.cost_matrix)) {
    problems.push_back(v.message);
  }
  if (req.candidate_regions.empty()) {
    problems.emplace_back("no candidate regions");
  }
  std::set<std::string> seen;
  for (const auto& region : req.candidate_regions) {
    if (!req.cost_matrix.index_of(region)) {
      problems.push_back("candidate region '" + region + "' is not in the cost matrix");
    }
    if (!seen.insert(region).second) {
      problems.push_back("candidate region '" + region + "' listed twice");
    }
  }
  if (req.max_engines &&
      (*req.max_engines == 0 || *req.max_engines > req.candidate_regions.size())) {
    problems.push_back("max engines must be between 1 and the number of candidate regions");
  }
  if (req.overhead_rate < 0) {
    problems.emplace_back("overhead rate must be non-negative");
  }
  if (!problems.empty()) {
    throw ValidationError("invalid solve request", std::move(problems));
  }
}

namespace {

constexpr int kUnassigned = -1;

DeploymentPlan plan_of(const SolveRequest& req, const std::vector<int>& assignment) {
  DeploymentPlan plan;
  plan.overhead_rate = req.overhead_rate;
  for (int r : assignment) {
    plan.regions.push_back(req.candidate_regions[static_cast<std::size_t>(r)]);
  }
  return plan;
}

// Precomputed cost tables over candidate-region indices.
struct Problem {
  const SolveRequest& req;
  std::size_t n;
  std::size_t m;
  std::size_t engine_cap;
  std::vector<std::size_t> topo;
  std::vector<std::vector<std::size_t>> preds;
  std::vector<Rational> invo;  // [service * m + region]
  std::vector<Rational> move;  // [(service * m + from) * m + to], output of `service`

  explicit Problem(const SolveRequest& r)
      : req(r),
        n(r.workflow.size()),
        m(r.candidate_regions.size()),
        engine_cap(r.max_engines.value_or(r.candidate_regions.size())),
        topo(r.workflow.topological_order()) {
    const CostMatrix& cm = r.cost_matrix;
    std::vector<std::size_t> loc(m);
    for (std::size_t k = 0; k < m; ++k) {
      loc[k] = cm.require(r.candidate_regions[k]);
    }
    preds.resize(n);
    invo.resize(n * m);
    move.resize(n * m * m);
    for (std::size_t i = 0; i < n; ++i) {
      const Service& s = r.workflow.service(i);
      preds[i] = r.workflow.predecessor_indices(i);
      std::size_t sl = cm.require(s.location);
      for (std::size_t a = 0; a < m; ++a) {
        invo[i * m + a] = cm.access(loc[a], sl) * s.in_size + cm.access(sl, loc[a]) * s.out_size;
        for (std::size_t b = 0; b < m; ++b) {
          move[(i * m + a) * m + b] = cm.transfer(loc[a], loc[b]) * s.out_size;
        }
      }
    }
  }

  const Rational& invocation(std::size_t service, std::size_t region) const {
    return invo[service * m + region];
  }
  const Rational& moved(std::size_t producer, std::size_t from, std::size_t to) const {
    return move[(producer * m + from) * m + to];
  }

  // Completion time of `service` on `region`, all predecessors assigned.
  Rational up_to(std::size_t service, std::size_t region, const std::vector<int>& assign,
                 const std::vector<Rational>& done) const {
    Rational arrival = 0;
    for (std::size_t p : preds[service]) {
      Rational t = done[p] + moved(p, static_cast<std::size_t>(assign[p]), region);
      if (t > arrival) {
        arrival = t;
      }
    }
    return arrival + invocation(service, region);
  }

  // Assigned services contribute their exact completion time. An unassigned
  // service gets the cheapest region choice given bounds on its predecessors,
  // charging real transfer costs only from assigned predecessors. Once the
  // engine cap is reached only the regions already in use are considered.
  Rational bound(const std::vector<int>& assign, const std::vector<Rational>& done,
                 const std::vector<std::size_t>& region_count, std::size_t used,
                 std::vector<Rational>& scratch) const {
    Rational best = 0;
    for (std::size_t i : topo) {
      if (assign[i] != kUnassigned) {
        scratch[i] = done[i];
      } else {
        bool first = true;
        Rational lowest = 0;
        for (std::size_t r = 0; r < m; ++r) {
          if (used >= engine_cap && region_count[r] == 0) {
            continue;
          }
          Rational arrival = 0;
          for (std::size_t p : preds[i]) {
            Rational t = assign[p] != kUnassigned
                             ? done[p] + moved(p, static_cast<std::size_t>(assign[p]), r)
                             : scratch[p];
            if (t > arrival) {
              arrival = t;
            }
          }
          Rational v = arrival + invocation(i, r);
          if (first || v < lowest) {
            lowest = v;
            first = false;
          }
        }
        scratch[i] = lowest;
      }
      if (scratch[i] > best) {
        best = scratch[i];
      }
    }
    if (used > 1) {
      best += req.overhead_rate * Rational(static_cast<long long>(used - 1));
    }
    return best;
  }
};

struct Incumbent {
  Rational cost;
  std::vector<int> assignment;  // workflow order

  // Strictly better in (cost, lexicographic assignment) order.
  bool beaten_by(const Rational& c, const std::vector<int>& a) const {
    return c < cost || (c == cost && a < assignment);
  }
};

class Search {
 public:
  Search(const Problem& p, Incumbent incumbent, std::uint64_t node_limit)
      : p_(p),
        best_(std::move(incumbent)),
        node_limit_(node_limit),
        assign_(p.n, kUnassigned),
        done_(p.n),
        scratch_(p.n),
        count_(p.m, 0) {}

  // Explores the subtree below assigning `region` to the first service in
  // topological order. Pass std::nullopt to explore from the root.
  void run(std::optional<std::size_t> first_region) {
    if (p_.n == 0) {
      return;
    }
    if (!first_region) {
      dfs(0);
      return;
    }
    try_region(0, *first_region);
  }

  const Incumbent& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }

 private:
  bool prune(const Rational& lb) const {
    if (lb > best_.cost) {
      return true;
    }
    if (lb < best_.cost) {
      return false;
    }
    // Equal cost: only a lexicographically smaller completion could still win.
    std::vector<int> smallest(p_.n);
    for (std::size_t i = 0; i < p_.n; ++i) {
      smallest[i] = assign_[i] == kUnassigned ? 0 : assign_[i];
    }
    return !(smallest < best_.assignment);
  }

  void try_region(std::size_t depth, std::size_t r) {
    std::size_t service = p_.topo[depth];
    if (used_ >= p_.engine_cap && count_[r] == 0) {
      return;
    }
    assign_[service] = static_cast<int>(r);
    done_[service] = p_.up_to(service, r, assign_, done_);
    if (count_[r]++ == 0) {
      ++used_;
    }
    Rational lb = p_.bound(assign_, done_, count_, used_, scratch_);
    if (!prune(lb)) {
      dfs(depth + 1);
    }
    if (--count_[r] == 0) {
      --used_;
    }
    assign_[service] = kUnassigned;
  }

  void dfs(std::size_t depth) {
    if (aborted_) {
      return;
    }
    if (++nodes_ > node_limit_) {
      aborted_ = true;
      return;
    }
    if (depth == p_.n) {
      // The bound is exact once every service is assigned.
      Rational cost = p_.bound(assign_, done_, count_, used_, scratch_);
      if (best_.beaten_by(cost, assign_)) {
        best_ = Incumbent{cost, assign_};
      }
      return;
    }
    for (std::size_t r = 0; r < p_.m && !aborted_; ++r) {
      try_region(depth, r);
    }
  }

  const Problem& p_;
  Incumbent best_;
  std::uint64_t node_limit_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<int> assign_;
  std::vector<Rational> done_;
  std::vector<Rational> scratch_;
  std::vector<std::size_t> count_;
  std::size_t used_ = 0;
};

Solution finish(const SolveRequest& req, const std::vector<int>& assignment, std::uint64_t nodes,
                bool proven) {
  Solution sol;
  sol.plan = plan_of(req, assignment);
  sol.report = evaluate(req.workflow, sol.plan, req.cost_matrix);
  sol.nodes_explored = nodes;
  sol.proven_optimal = proven;
  return sol;
}

}  // namespace

Solution solve_brute_force(const SolveRequest& req, const BruteForceOptions& options) {
  validate_request(req);
  const std::size_t n = req.workflow.size();
  const std::size_t m = req.candidate_regions.size();
  const long double space = std::pow(static_cast<long double>(m), static_cast<long double>(n));
  if (space > static_cast<long double>(options.enumeration_cap)) {
    throw SearchSpaceTooLarge(space, options.enumeration_cap);
  }
  const std::size_t cap = req.max_engines.value_or(m);

  std::vector<int> current(n, 0);
  std::optional<Incumbent> best;
  std::uint64_t evaluated = 0;
  while (true) {
    std::set<int> distinct(current.begin(), current.end());
    if (distinct.size() <= cap) {
      ++evaluated;
      Rational cost = evaluate(req.workflow, plan_of(req, current), req.cost_matrix).total_cost;
      if (!best || cost < best->cost) {
        best = Incumbent{cost, current};
      }
    }
    // Odometer: the last service varies fastest, so assignments are visited
    // in lexicographic order.
    std::size_t k = n;
    while (k > 0 && static_cast<std::size_t>(current[k - 1]) + 1 == m) {
      current[k - 1] = 0;
      --k;
    }
    if (k == 0) {
      break;
    }
    ++current[k - 1];
  }
  return finish(req, best->assignment, evaluated, true);
}

Solution solve_branch_and_bound(const SolveRequest& req, const BranchAndBoundOptions& options) {
  validate_request(req);
  const Problem problem(req);

  // Start from the best single-region plan.
  Incumbent initial;
  for (std::size_t r = 0; r < problem.m; ++r) {
    std::vector<int> all(problem.n, static_cast<int>(r));
    Rational cost = evaluate(req.workflow, plan_of(req, all), req.cost_matrix).total_cost;
    if (r == 0 || cost < initial.cost) {
      initial = Incumbent{cost, all};
    }
  }

  Incumbent best = initial;
  std::uint64_t nodes = 1;  // root
  bool aborted = false;

  if (problem.n > 0 && options.threads > 1) {
    std::vector<std::optional<Search>> results(problem.m);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t r = next++; r < problem.m; r = next++) {
        Search search(problem, initial, options.node_limit);
        search.run(r);
        results[r].emplace(std::move(search));
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(options.threads, problem.m); ++t) {
      pool.emplace_back(worker);
    }
    pool.clear();
    for (const auto& result : results) {
      nodes += result->nodes();
      aborted = aborted || result->aborted();
      if (best.beaten_by(result->best().cost, result->best().assignment)) {
        best = result->best();
      }
    }
  } else {
    Search search(problem, initial, options.node_limit);
    search.run(std::nullopt);
    nodes = search.nodes();
    aborted = search.aborted();
    best = search.best();
  }

  Solution sol = finish(req, best.assignment, nodes, !aborted);
  if (sol.report.total_cost != best.cost) {
    throw std::logic_error("branch and bound cost disagrees with evaluate()");
  }
  return sol;
}

Rational lower_bound(const PartialAssignment& partial, const SolveRequest& req) {
  validate_request(req);
  const Problem problem(req);
  if (partial.size() != problem.n) {
    throw std::invalid_argument("partial assignment size does not match the workflow");
  }
  std::vector<int> assign(problem.n, kUnassigned);
  std::vector<std::size_t> count(problem.m, 0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < problem.n; ++i) {
    if (partial[i]) {
      if (*partial[i] >= problem.m) {
        throw std::invalid_argument("region index out of range");
      }
      assign[i] = static_cast<int>(*partial[i]);
      if (count[*partial[i]]++ == 0) {
        ++used;
      }
    }
  }
  if (used > problem.engine_cap) {
    throw std::invalid_argument("partial assignment already exceeds max engines");
  }
  std::vector<Rational> done(problem.n);
  for (std::size_t i : problem.topo) {
    if (assign[i] == kUnassigned) {
      continue;
    }
    for (std::size_t p : problem.preds[i]) {
      if (assign[p] == kUnassigned) {
        throw std::invalid_argument("assigned service '" + req.workflow.service(i).id +
                                    "' has an unassigned predecessor");
      }
    }
    done[i] = problem.up_to(i, static_cast<std::size_t>(assign[i]), assign, done);
  }
  std::vector<Rational> scratch(problem.n);
  return problem.bound(assign, done, count, used, scratch);
}

Solution solve_centralized(const SolveRequest& req, std::string_view region) {
  for (const Violation& v : validate_workflow(req.workflow)) {
    throw ValidationError("invalid workflow: " + v.message);
  }
  req.cost_matrix.require(region);
  Solution sol;
  sol.plan.overhead_rate = req.overhead_rate;
  sol.plan.regions.assign(req.workflow.size(), LocationId(region));
  sol.report = evaluate(req.workflow, sol.plan, req.cost_matrix);
  sol.nodes_explored = 1;
  sol.proven_optimal = true;
  return sol;
}

std::vector<SweepPoint> sweep_overhead(const SolveRequest& req, const std::vector<Rational>& rates,
                                       const BranchAndBoundOptions& options) {
  if (rates.empty()) {
    throw std::invalid_argument("overhead sweep needs at least one rate");
  }
  std::vector<SweepPoint> out;
  SolveRequest at_rate = req;
  for (const Rational& rate : rates) {
    at_rate.overhead_rate = rate;
    out.push_back({rate, solve_branch_and_bound(at_rate, options)});
  }
  return out;
}

Rational speedup(const Solution& baseline, const Solution& optimized) {
  if (baseline.report.total_movement == 0 || optimized.report.total_movement == 0) {
    throw std::domain_error("speedup is undefined for zero total movement");
  }
  return baseline.report.total_movement / optimized.report.total_movement;
}

}  // namespace wfdeploy
