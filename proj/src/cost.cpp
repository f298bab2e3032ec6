#include "wfdeploy/cost.hpp"

#include "wfdeploy/errors.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace wfdeploy {

Rational invocation_cost(const Service& service, std::string_view engine, const CostMatrix& m) {
  std::size_t e = m.require(engine);
  std::size_t s = m.require(service.location);
  return m.access(e, s) * service.in_size + m.access(s, e) * service.out_size;
}

namespace {

void check_plan(const Workflow& w, const DeploymentPlan& plan) {
  if (plan.regions.size() != w.size()) {
    throw std::invalid_argument("deployment plan covers " + std::to_string(plan.regions.size()) +
                                " services, workflow has " + std::to_string(w.size()));
  }
  if (plan.overhead_rate < 0) {
    throw std::invalid_argument("overhead rate must be non-negative");
  }
}

}  // namespace

std::vector<Rational> cost_up_to(const Workflow& w, const DeploymentPlan& plan,
                                 const CostMatrix& m) {
  check_plan(w, plan);
  std::vector<std::size_t> engine(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    engine[i] = m.require(plan.regions[i]);
  }

  std::vector<Rational> up_to(w.size());
  for (std::size_t i : w.topological_order()) {
    const Service& s = w.service(i);
    Rational arrival = 0;
    for (std::size_t p : w.predecessor_indices(i)) {
      Rational candidate = up_to[p] + m.transfer(engine[p], engine[i]) * w.service(p).out_size;
      arrival = std::max(arrival, candidate);
    }
    up_to[i] = arrival + invocation_cost(s, plan.regions[i], m);
  }
  return up_to;
}

std::size_t engines_used(const DeploymentPlan& plan) {
  return std::set<LocationId>(plan.regions.begin(), plan.regions.end()).size();
}

CostReport evaluate(const Workflow& w, const DeploymentPlan& plan, const CostMatrix& m) {
  std::vector<Rational> up_to = cost_up_to(w, plan, m);

  CostReport report;
  Rational sink_movement = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Service& s = w.service(i);
    report.services.push_back({s.id, invocation_cost(s, plan.regions[i], m), up_to[i]});
    report.total_movement = std::max(report.total_movement, up_to[i]);
    if (w.successor_indices(i).empty()) {
      sink_movement = std::max(sink_movement, up_to[i]);
    }
    for (std::size_t p : w.predecessor_indices(i)) {
      assert(up_to[i] >= up_to[p]);
      (void)p;
    }
  }
  // Completion times never decrease along an edge, so the maximum is always
  // attained at a sink.
  if (sink_movement != report.total_movement) {
    throw std::logic_error("total movement over sinks differs from total over all services");
  }

  report.engines_used = engines_used(plan);
  std::size_t extra = report.engines_used == 0 ? 0 : report.engines_used - 1;
  report.total_overhead = plan.overhead_rate * Rational(static_cast<long long>(extra));
  report.total_cost = report.total_movement + report.total_overhead;
  return report;
}

std::string format_report(const CostReport& r) {
  std::string out;
  for (const ServiceCost& s : r.services) {
    out += "service " + s.service + " invo " + format_rational(s.invocation) + " upto " +
           format_rational(s.up_to) + "\n";
  }
  out += "movement " + format_rational(r.total_movement) + "\n";
  out += "engines " + std::to_string(r.engines_used) + "\n";
  out += "overhead " + format_rational(r.total_overhead) + "\n";
  out += "total " + format_rational(r.total_cost) + "\n";
  return out;
}

}  // namespace wfdeploy
