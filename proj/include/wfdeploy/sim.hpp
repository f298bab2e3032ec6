#pragma once

#include "wfdeploy/model.hpp"
#include "wfdeploy/optimizer.hpp"
#include "wfdeploy/plan_io.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfdeploy {

struct SimConfig {
  CostMatrix cost_matrix;
  /// Size of every reference that is consumed, produced or transferred.
  std::map<std::string, Rational> data_sizes;
  /// Location of every invoked service.
  std::map<ServiceId, LocationId> service_locations;
  /// Optional per-service compute time; missing entries are 0.
  std::map<ServiceId, Rational> compute_time;
};

struct SimTrace {
  std::vector<Rational> ready;       // per plan step
  std::vector<Rational> completion;  // per plan step
  Rational makespan{0};

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

class DeadlockError : public std::runtime_error {
 public:
  DeadlockError(const std::string& what, std::vector<std::size_t> blocked)
      : std::runtime_error(what), blocked_(std::move(blocked)) {}
  const std::vector<std::size_t>& blocked_steps() const noexcept { return blocked_; }

 private:
  std::vector<std::size_t> blocked_;
};

/// Event-driven run of `plan` where every engine fires a step as soon as all
/// the data it consumes is available on that engine, with no limit on
/// concurrent steps.
///
/// Engines sit at the location named by their host alias. An invocation takes
/// c(engine, service) * inputs + compute + c(service, engine) * output; a
/// Transfer takes c(from, to) * size and delivers its datum to the target.
/// Literals, and references that no step produces, are available everywhere
/// at time 0. Simultaneous events are processed in step order.
///
/// Throws DeadlockError listing steps that can never run, std::invalid_argument
/// for a missing size, location or deployment.
SimTrace simulate(const ExecutionPlan& plan, const SimConfig& config);

/// `step <index> ready <q> done <q>` per step, then `makespan <q>`.
std::string format_trace(const SimTrace& trace);

struct SimulationInputs {
  InvocationDescription description;
  ExecutionPlan plan;
  SimConfig config;
  /// Plan step index of each workflow service's invocation (workflow order).
  std::vector<std::size_t> service_step;
};

/// Turns a solved deployment into something the simulator can run.
///
/// One invocation per service in topological order, output `<id>_out`. Each
/// predecessor's output is a reference input. Whatever part of `in_size` the
/// predecessors do not supply arrives as an external reference `<id>_in`;
/// a service with no input at all gets a single literal input.
/// Regions without an entry in `hosts` get a default `aws ubuntu _` record.
/// Throws ValidationError when in_size is smaller than the predecessors' outputs.
SimulationInputs plan_from_solution(const Workflow& workflow, const DeploymentPlan& plan,
                                    const CostMatrix& matrix,
                                    const std::map<LocationId, HostRecord>& hosts = {});

}  // namespace wfdeploy
