#pragma once

// Test-only fixtures and oracles. Nothing here calls into the code paths it
// is used to check.

#include "wfdeploy/cost.hpp"
#include "wfdeploy/model.hpp"
#include "wfdeploy/optimizer.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace wfdeploy::testing {

inline Rational q(long long num, long long den = 1) { return Rational(num, den); }

// Two regions, chain s1 -> s2 with s1 in r1 and s2 in r2.
//   c(r1,r2) = c(r2,r1) = 2, engine<->service inside a region = 2/5
//   s1: in 11/2, out 2     s2: in 2, out 11/2
// Hand evaluation:
//   invo(s1 @ r1) = 2/5 * 11/2 + 2/5 * 2 = 3
//   invo(s2 @ r2) = 2/5 * 2 + 2/5 * 11/2 = 3
//   split (r1, r2):   3 + 2 * 2 + 3        = 10
//   all r1:           3 + 0 + (2*2 + 2*11/2) = 18
//   all r2:           (2*11/2 + 2*2) + 0 + 3 = 18
//   (r2, r1):         15 + 4 + 15          = 34
inline Workflow chain_workflow() {
  return Workflow({{"s1", "r1", q(11, 2), q(2)}, {"s2", "r2", q(2), q(11, 2)}}, {{"s1", "s2"}});
}

inline CostMatrix chain_matrix() {
  return CostMatrix({"r1", "r2"}, {q(2, 5), q(2), q(2), q(2, 5)});
}

inline CostMatrix uniform_matrix(const std::vector<LocationId>& locs, const Rational& value) {
  return CostMatrix(locs, std::vector<Rational>(locs.size() * locs.size(), value));
}

// Memoized recursion straight from the definition, over names and raw matrix
// entries: upto(s) = max_{p in pred(s)} (upto(p) + move(p -> s)) + invo(s).
inline std::map<std::string, Rational> oracle_cost_up_to(const Workflow& w,
                                                         const std::map<std::string, std::string>& engine_of,
                                                         const CostMatrix& m) {
  std::map<std::string, const Service*> by_name;
  for (const Service& s : w.services()) {
    by_name[s.id] = &s;
  }
  auto cost = [&](const std::string& a, const std::string& b) {
    return m.entry(*m.index_of(a), *m.index_of(b));
  };
  std::map<std::string, Rational> memo;
  std::function<Rational(const std::string&)> up_to = [&](const std::string& id) -> Rational {
    if (auto it = memo.find(id); it != memo.end()) {
      return it->second;
    }
    const Service& s = *by_name.at(id);
    const std::string& e = engine_of.at(id);
    Rational arrival = 0;
    for (const Edge& edge : w.edges()) {
      if (edge.consumer != id) {
        continue;
      }
      const std::string& pe = engine_of.at(edge.producer);
      Rational move = pe == e ? Rational(0) : cost(pe, e) * by_name.at(edge.producer)->out_size;
      Rational t = up_to(edge.producer) + move;
      if (t > arrival) {
        arrival = t;
      }
    }
    Rational invo = cost(e, s.location) * s.in_size + cost(s.location, e) * s.out_size;
    return memo[id] = arrival + invo;
  };
  for (const Service& s : w.services()) {
    up_to(s.id);
  }
  return memo;
}

inline std::map<std::string, std::string> engine_map(const Workflow& w, const DeploymentPlan& p) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[w.service(i).id] = p.regions[i];
  }
  return out;
}

// Random DAG over `n` services: edge i -> j (i < j) with probability 0.4,
// sizes in 0..8 (as halves, so non-integer rationals appear), declared in a
// shuffled order so the declaration order is not always topological.
inline Workflow random_workflow(std::mt19937_64& rng, std::size_t n,
                                const std::vector<LocationId>& locs) {
  std::uniform_int_distribution<int> size(0, 16);
  std::bernoulli_distribution edge(0.4);
  std::uniform_int_distribution<std::size_t> loc(0, locs.size() - 1);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    perm[i] = i;
  }
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Service> services(n);
  for (std::size_t i = 0; i < n; ++i) {
    services[perm[i]] = {"w" + std::to_string(i), locs[loc(rng)], q(size(rng), 2), q(size(rng), 2)};
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (edge(rng)) {
        edges.push_back({"w" + std::to_string(i), "w" + std::to_string(j)});
      }
    }
  }
  return Workflow(std::move(services), std::move(edges));
}

// Random asymmetric matrix with entries k/4, k in 1..20; diagonal k/4, k in 0..4.
inline CostMatrix random_matrix(std::mt19937_64& rng, const std::vector<LocationId>& locs) {
  std::uniform_int_distribution<int> off(1, 20);
  std::uniform_int_distribution<int> diag(0, 4);
  std::vector<Rational> costs(locs.size() * locs.size());
  for (std::size_t i = 0; i < locs.size(); ++i) {
    for (std::size_t j = 0; j < locs.size(); ++j) {
      costs[i * locs.size() + j] = i == j ? q(diag(rng), 4) : q(off(rng), 4);
    }
  }
  return CostMatrix(locs, std::move(costs));
}

inline std::vector<LocationId> region_names(std::size_t n) {
  std::vector<LocationId> out;
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back("r" + std::to_string(i));
  }
  return out;
}

inline DeploymentPlan random_plan(std::mt19937_64& rng, const Workflow& w,
                                  const std::vector<LocationId>& regions, Rational rate = 0) {
  std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
  DeploymentPlan p;
  p.overhead_rate = rate;
  for (std::size_t i = 0; i < w.size(); ++i) {
    p.regions.push_back(regions[pick(rng)]);
  }
  return p;
}

}  // namespace wfdeploy::testing
