#include "wfdeploy/model.hpp"

#include "wfdeploy/errors.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <stdexcept>

namespace wfdeploy {

bool is_valid_token(std::string_view token) {
  if (token.empty()) {
    return false;
  }
  return std::none_of(token.begin(), token.end(), [](char ch) {
    return ch == '\'' || ch == ':' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' ||
           ch == '\v' || ch == '\f';
  });
}

Workflow::Workflow(std::vector<Service> services, std::vector<Edge> edges)
    : services_(std::move(services)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    index_.emplace(services_[i].id, i);
  }
  preds_.resize(services_.size());
  succs_.resize(services_.size());
  for (const Edge& e : edges_) {
    auto p = index_of(e.producer);
    auto c = index_of(e.consumer);
    if (!p || !c || *p == *c) {
      continue;
    }
    preds_[*c].push_back(*p);
    succs_[*p].push_back(*c);
  }
  for (auto* lists : {&preds_, &succs_}) {
    for (auto& list : *lists) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
}

std::optional<std::size_t> Workflow::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::size_t> Workflow::topological_order() const {
  std::vector<std::size_t> indegree(services_.size());
  for (std::size_t i = 0; i < services_.size(); ++i) {
    indegree[i] = preds_[i].size();
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (indegree[i] == 0) {
      ready.push(i);
    }
  }
  std::vector<std::size_t> order;
  order.reserve(services_.size());
  while (!ready.empty()) {
    std::size_t next = ready.top();
    ready.pop();
    order.push_back(next);
    for (std::size_t s : succs_[next]) {
      if (--indegree[s] == 0) {
        ready.push(s);
      }
    }
  }
  if (order.size() != services_.size()) {
    throw ValidationError("workflow contains a cycle");
  }
  return order;
}

bool operator==(const Workflow& a, const Workflow& b) {
  if (a.services_.size() != b.services_.size() || a.edges_ != b.edges_) {
    return false;
  }
  for (std::size_t i = 0; i < a.services_.size(); ++i) {
    const Service& x = a.services_[i];
    const Service& y = b.services_[i];
    if (x.id != y.id || x.location != y.location || x.in_size != y.in_size ||
        x.out_size != y.out_size) {
      return false;
    }
  }
  return true;
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::InvalidName: return "invalid-name";
    case Violation::Kind::DuplicateService: return "duplicate-service";
    case Violation::Kind::NegativeSize: return "negative-size";
    case Violation::Kind::UnknownService: return "unknown-service";
    case Violation::Kind::SelfEdge: return "self-edge";
    case Violation::Kind::DuplicateEdge: return "duplicate-edge";
    case Violation::Kind::Cycle: return "cycle";
    case Violation::Kind::UnknownLocation: return "unknown-location";
  }
  return "unknown";
}

namespace {

// Tarjan's strongly connected components; each component with more than one
// member is a cycle.
std::vector<std::vector<std::size_t>> cyclic_components(const Workflow& w) {
  const std::size_t n = w.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> result;
  std::size_t counter = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t s : w.successor_indices(v)) {
      if (index[s] == unvisited) {
        visit(s);
        low[v] = std::min(low[v], low[s]);
      } else if (on_stack[s]) {
        low[v] = std::min(low[v], index[s]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> component;
      std::size_t top;
      do {
        top = stack.back();
        stack.pop_back();
        on_stack[top] = false;
        component.push_back(top);
      } while (top != v);
      if (component.size() > 1) {
        std::sort(component.begin(), component.end());
        result.push_back(std::move(component));
      }
    }
  };

  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == unvisited) {
      visit(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

std::vector<Violation> validate_workflow(const Workflow& w) {
  using Kind = Violation::Kind;
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const Service& s : w.services()) {
    if (!is_valid_token(s.id)) {
      out.push_back({Kind::InvalidName, {s.id}, "invalid service name '" + s.id + "'"});
    }
    if (!is_valid_token(s.location)) {
      out.push_back({Kind::InvalidName, {s.id, s.location},
                     "service '" + s.id + "' has invalid location name '" + s.location + "'"});
    }
    if (!seen.insert(s.id).second) {
      out.push_back({Kind::DuplicateService, {s.id}, "service '" + s.id + "' declared twice"});
    }
    if (s.in_size < 0 || s.out_size < 0) {
      out.push_back({Kind::NegativeSize, {s.id}, "service '" + s.id + "' has a negative size"});
    }
  }

  std::set<std::pair<std::string, std::string>> edge_set;
  for (const Edge& e : w.edges()) {
    bool known = true;
    for (const std::string* end : {&e.producer, &e.consumer}) {
      if (!w.index_of(*end)) {
        out.push_back({Kind::UnknownService, {*end},
                       "edge " + e.producer + " -> " + e.consumer + " names undeclared service '" +
                           *end + "'"});
        known = false;
      }
    }
    if (known && e.producer == e.consumer) {
      out.push_back({Kind::SelfEdge, {e.producer}, "self-edge on '" + e.producer + "'"});
    }
    if (!edge_set.emplace(e.producer, e.consumer).second) {
      out.push_back({Kind::DuplicateEdge, {e.producer, e.consumer},
                     "edge " + e.producer + " -> " + e.consumer + " declared twice"});
    }
  }

  for (const auto& component : cyclic_components(w)) {
    Violation v{Kind::Cycle, {}, "cycle among"};
    for (std::size_t i : component) {
      v.elements.push_back(w.service(i).id);
      v.message += " " + w.service(i).id;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ServiceId> predecessors(const Workflow& w, std::string_view service) {
  auto idx = w.index_of(service);
  if (!idx) {
    throw std::out_of_range("unknown service '" + std::string(service) + "'");
  }
  std::vector<ServiceId> out;
  for (std::size_t p : w.predecessor_indices(*idx)) {
    out.push_back(w.service(p).id);
  }
  return out;
}

std::vector<ServiceId> sinks(const Workflow& w) {
  std::vector<ServiceId> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.successor_indices(i).empty()) {
      out.push_back(w.service(i).id);
    }
  }
  return out;
}

CostMatrix::CostMatrix(std::vector<LocationId> locations, std::vector<Rational> costs)
    : locations_(std::move(locations)), costs_(std::move(costs)) {
  std::set<std::string> seen;
  for (const auto& loc : locations_) {
    if (!is_valid_token(loc)) {
      throw ValidationError("invalid location name '" + loc + "'");
    }
    if (!seen.insert(loc).second) {
      throw ValidationError("location '" + loc + "' declared twice");
    }
  }
  if (costs_.size() != locations_.size() * locations_.size()) {
    throw ValidationError("cost matrix needs " +
                          std::to_string(locations_.size() * locations_.size()) + " entries, got " +
                          std::to_string(costs_.size()));
  }
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    if (costs_[i] < 0) {
      throw ValidationError("negative cost from '" + locations_[i / locations_.size()] +
                            "' to '" + locations_[i % locations_.size()] + "'");
    }
  }
}

std::optional<std::size_t> CostMatrix::index_of(std::string_view id) const {
  auto it = std::find(locations_.begin(), locations_.end(), id);
  if (it == locations_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - locations_.begin());
}

std::size_t CostMatrix::require(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx) {
    throw std::out_of_range("unknown location '" + std::string(id) + "'");
  }
  return *idx;
}

std::vector<Violation> validate_locations(const Workflow& w, const CostMatrix& m) {
  std::vector<Violation> out;
  for (const Service& s : w.services()) {
    if (!m.index_of(s.location)) {
      out.push_back({Violation::Kind::UnknownLocation, {s.id, s.location},
                     "service '" + s.id + "' is located in '" + s.location +
                         "', which the cost matrix does not list"});
    }
  }
  return out;
}

}  // namespace wfdeploy
