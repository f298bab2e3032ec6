#pragma once

#include "wfdeploy/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace wfdeploy {

/// Which region's engine invokes each service. `regions[i]` belongs to
/// `workflow.service(i)`; the set of distinct regions is the set of engines used.
struct DeploymentPlan {
  std::vector<LocationId> regions;
  Rational overhead_rate{0};

  friend bool operator==(const DeploymentPlan&, const DeploymentPlan&) = default;
};

struct ServiceCost {
  ServiceId service;
  Rational invocation;
  Rational up_to;

  friend bool operator==(const ServiceCost&, const ServiceCost&) = default;
};

struct CostReport {
  std::vector<ServiceCost> services;  // workflow order
  Rational total_movement{0};
  std::size_t engines_used = 0;
  Rational total_overhead{0};
  Rational total_cost{0};

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Round trip of a service's data between its engine and its location:
/// c(engine, location) * in + c(location, engine) * out.
/// Throws std::out_of_range naming an unknown location.
Rational invocation_cost(const Service& service, std::string_view engine, const CostMatrix& matrix);

/// Earliest completion of every service (workflow order): the slowest
/// predecessor's completion plus its output's engine-to-engine transfer, plus
/// the service's own invocation cost. Sources start at 0.
std::vector<Rational> cost_up_to(const Workflow& workflow, const DeploymentPlan& plan,
                                 const CostMatrix& matrix);

/// Movement is the largest completion over all services; overhead charges
/// `overhead_rate` per engine beyond the first.
CostReport evaluate(const Workflow& workflow, const DeploymentPlan& plan, const CostMatrix& matrix);

std::size_t engines_used(const DeploymentPlan& plan);

/// `service <id> invo <q> upto <q>` per service, then `movement`, `engines`,
/// `overhead` and `total` lines.
std::string format_report(const CostReport& report);

}  // namespace wfdeploy
