#include "wfdeploy/sim.hpp"

#include "wfdeploy/errors.hpp"

#include <functional>
#include <queue>
#include <set>
#include <tuple>

namespace wfdeploy {

namespace {

using Slot = std::pair<std::string, std::string>;  // (engine, reference)

struct StepModel {
  std::set<Slot> needs;
  Rational duration{0};
  std::vector<Slot> delivers;
};

const Rational& size_of(const SimConfig& cfg, const std::string& ref) {
  auto it = cfg.data_sizes.find(ref);
  if (it == cfg.data_sizes.end()) {
    throw std::invalid_argument("no data size for reference '" + ref + "'");
  }
  return it->second;
}

}  // namespace

SimTrace simulate(const ExecutionPlan& plan, const SimConfig& cfg) {
  const CostMatrix& cm = cfg.cost_matrix;
  auto location_of_engine = [&](const std::string& engine) {
    auto host = plan.host_of(engine);
    if (!host) {
      throw std::invalid_argument("engine '" + engine + "' is not deployed");
    }
    auto idx = cm.index_of(*host);
    if (!idx) {
      throw std::invalid_argument("host '" + *host + "' is not a cost matrix location");
    }
    return *idx;
  };

  // Anything a step puts into an engine's store; all other references are external.
  std::set<std::string> internal;
  for (const PlanStep& step : plan.steps) {
    if (const auto* inv = std::get_if<Invocation>(&step)) {
      internal.insert(inv->output);
    } else {
      const auto& t = std::get<Transfer>(step);
      internal.insert(t.key);
      internal.insert(t.ack);
    }
  }

  std::vector<StepModel> model(plan.steps.size());
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    StepModel& sm = model[i];
    if (const auto* inv = std::get_if<Invocation>(&plan.steps[i])) {
      std::size_t engine = location_of_engine(inv->engine);
      auto loc = cfg.service_locations.find(inv->service);
      if (loc == cfg.service_locations.end()) {
        throw std::invalid_argument("no location for service '" + inv->service + "'");
      }
      std::size_t service = cm.require(loc->second);
      Rational in_total = 0;
      for (const std::string& ref : consumed_references(inv->inputs)) {
        in_total += size_of(cfg, ref);
        if (internal.count(ref)) {
          sm.needs.emplace(inv->engine, ref);
        }
      }
      Rational compute = 0;
      if (auto it = cfg.compute_time.find(inv->service); it != cfg.compute_time.end()) {
        compute = it->second;
      }
      sm.duration = cm.access(engine, service) * in_total + compute +
                    cm.access(service, engine) * size_of(cfg, inv->output);
      sm.delivers.emplace_back(inv->engine, inv->output);
    } else {
      const auto& t = std::get<Transfer>(plan.steps[i]);
      sm.duration =
          cm.transfer(location_of_engine(t.from), location_of_engine(t.to)) * size_of(cfg, t.ref);
      if (internal.count(t.ref)) {
        sm.needs.emplace(t.from, t.ref);
      }
      sm.delivers.emplace_back(t.to, t.key);
      sm.delivers.emplace_back(t.from, t.ack);
    }
  }

  std::map<Slot, std::vector<std::size_t>> waiting;
  std::vector<std::size_t> missing(plan.steps.size());
  using Event = std::tuple<Rational, std::size_t>;  // (completion time, step)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

  SimTrace trace;
  trace.ready.assign(plan.steps.size(), Rational(0));
  trace.completion.assign(plan.steps.size(), Rational(0));
  std::vector<bool> fired(plan.steps.size(), false);

  auto fire = [&](std::size_t step, const Rational& now) {
    fired[step] = true;
    trace.ready[step] = now;
    trace.completion[step] = now + model[step].duration;
    events.emplace(trace.completion[step], step);
  };

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    missing[i] = model[i].needs.size();
    for (const Slot& slot : model[i].needs) {
      waiting[slot].push_back(i);
    }
    if (missing[i] == 0) {
      fire(i, Rational(0));
    }
  }

  std::set<Slot> available;
  while (!events.empty()) {
    auto [now, step] = events.top();
    events.pop();
    for (const Slot& slot : model[step].delivers) {
      if (!available.insert(slot).second) {
        continue;
      }
      auto it = waiting.find(slot);
      if (it == waiting.end()) {
        continue;
      }
      for (std::size_t consumer : it->second) {
        if (--missing[consumer] == 0) {
          fire(consumer, now);
        }
      }
    }
    trace.makespan = std::max(trace.makespan, now);
  }

  std::vector<std::size_t> blocked;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (!fired[i]) {
      blocked.push_back(i);
    }
  }
  if (!blocked.empty()) {
    std::string msg = "deadlock: steps never become ready:";
    for (std::size_t b : blocked) {
      msg += " " + std::to_string(b);
    }
    throw DeadlockError(msg, std::move(blocked));
  }
  return trace;
}

std::string format_trace(const SimTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.completion.size(); ++i) {
    out += "step " + std::to_string(i) + " ready " + format_rational(trace.ready[i]) + " done " +
           format_rational(trace.completion[i]) + "\n";
  }
  out += "makespan " + format_rational(trace.makespan) + "\n";
  return out;
}

SimulationInputs plan_from_solution(const Workflow& w, const DeploymentPlan& deployment,
                                    const CostMatrix& matrix,
                                    const std::map<LocationId, HostRecord>& hosts) {
  if (deployment.regions.size() != w.size()) {
    throw ValidationError("deployment plan does not cover the workflow");
  }
  SimulationInputs out;
  out.config.cost_matrix = matrix;

  DeploymentMapping mapping;
  std::map<LocationId, HostRecord> records;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Service& s = w.service(i);
    mapping.add(s.id, deployment.regions[i]);
    auto it = hosts.find(deployment.regions[i]);
    records.emplace(deployment.regions[i], it == hosts.end() ? HostRecord{} : it->second);
    out.config.service_locations.emplace(s.id, s.location);
  }

  for (std::size_t i : w.topological_order()) {
    const Service& s = w.service(i);
    InvocationStep step{s.id, {}, s.id + "_out"};
    Rational supplied = 0;
    std::size_t k = 0;
    for (std::size_t p : w.predecessor_indices(i)) {
      const Service& pred = w.service(p);
      step.inputs.push_back({{"in_" + std::to_string(++k), true}, {pred.id + "_out", false}});
      supplied += pred.out_size;
    }
    Rational residual = s.in_size - supplied;
    if (residual < 0) {
      throw ValidationError("service '" + s.id + "' has in_size " + format_rational(s.in_size) +
                            " but its predecessors produce " + format_rational(supplied));
    }
    if (residual > 0) {
      std::string ext = s.id + "_in";
      step.inputs.push_back({{"in_" + std::to_string(++k), true}, {ext, false}});
      out.config.data_sizes[ext] = residual;
    }
    if (step.inputs.empty()) {
      step.inputs.push_back({{"input", true}, {"0", true}});
    }
    out.config.data_sizes[step.output] = s.out_size;
    out.description.steps.push_back(std::move(step));
  }

  out.plan = generate_execution_plan(out.description, mapping, records);

  out.service_step.assign(w.size(), 0);
  for (std::size_t j = 0; j < out.plan.steps.size(); ++j) {
    if (const auto* inv = std::get_if<Invocation>(&out.plan.steps[j])) {
      out.service_step[*w.index_of(inv->service)] = j;
    }
  }
  return out;
}

}  // namespace wfdeploy
