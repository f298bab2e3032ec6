#pragma once

#include "wfdeploy/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wfdeploy {

using ServiceId = std::string;
using LocationId = std::string;

/// Service and location names: non-empty, no whitespace, no `'`, no `:`.
bool is_valid_token(std::string_view token);

struct Service {
  ServiceId id;
  LocationId location;
  Rational in_size{0};
  Rational out_size{0};
};

struct Edge {
  ServiceId producer;
  ServiceId consumer;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A DAG of services. Construction never fails; structural problems are
/// reported by validate_workflow(). Index-based accessors only consider edges
/// whose endpoints are both declared.
class Workflow {
 public:
  Workflow() = default;
  Workflow(std::vector<Service> services, std::vector<Edge> edges);

  const std::vector<Service>& services() const noexcept { return services_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return services_.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const Service& service(std::size_t index) const { return services_.at(index); }

  /// Distinct predecessor indices, ascending.
  const std::vector<std::size_t>& predecessor_indices(std::size_t index) const {
    return preds_.at(index);
  }
  const std::vector<std::size_t>& successor_indices(std::size_t index) const {
    return succs_.at(index);
  }

  /// Kahn's algorithm, always taking the smallest ready index first.
  /// Throws ValidationError when the graph has a cycle.
  std::vector<std::size_t> topological_order() const;

  friend bool operator==(const Workflow& a, const Workflow& b);

 private:
  std::vector<Service> services_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
};

struct Violation {
  enum class Kind {
    InvalidName,
    DuplicateService,
    NegativeSize,
    UnknownService,
    SelfEdge,
    DuplicateEdge,
    Cycle,
    UnknownLocation,
  };
  Kind kind;
  std::vector<std::string> elements;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

std::vector<Violation> validate_workflow(const Workflow& workflow);

/// Producers of edges whose consumer is `service`, in declaration order of the
/// services. Throws std::out_of_range naming the service when it is unknown.
std::vector<ServiceId> predecessors(const Workflow& workflow, std::string_view service);

/// Services with no outgoing edge, in declaration order.
std::vector<ServiceId> sinks(const Workflow& workflow);

/// Per-unit data movement costs between locations.
///
/// The stored diagonal entry is the cost between an engine and a service in
/// the same location. Engine-to-engine movement within one location is always
/// free, so `transfer(i, i) == 0` regardless of the stored value.
class CostMatrix {
 public:
  CostMatrix() = default;
  /// `costs` is row-major, |locations|^2 entries, all finite and >= 0.
  /// Throws ValidationError on duplicate/invalid names, wrong size or negative entries.
  CostMatrix(std::vector<LocationId> locations, std::vector<Rational> costs);

  const std::vector<LocationId>& locations() const noexcept { return locations_; }
  std::size_t size() const noexcept { return locations_.size(); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws std::out_of_range naming the location.
  std::size_t require(std::string_view id) const;

  /// Raw stored entry, used for engine <-> service movement.
  const Rational& entry(std::size_t from, std::size_t to) const {
    return costs_[from * locations_.size() + to];
  }
  Rational access(std::size_t engine, std::size_t service_location) const {
    return entry(engine, service_location);
  }
  Rational transfer(std::size_t from_engine, std::size_t to_engine) const {
    return from_engine == to_engine ? Rational(0) : entry(from_engine, to_engine);
  }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  std::vector<LocationId> locations_;
  std::vector<Rational> costs_;
};

/// Services whose location is not present in the matrix.
std::vector<Violation> validate_locations(const Workflow& workflow, const CostMatrix& matrix);

}  // namespace wfdeploy
