#include "wfdeploy/plan_io.hpp"

#include "text_util.hpp"
#include "wfdeploy/errors.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace wfdeploy {

namespace {

constexpr std::string_view kSetterSuffix = ".Setter";

bool is_reference_token(std::string_view token) {
  return !token.empty() && token.find('\'') == std::string_view::npos &&
         token.find(':') == std::string_view::npos;
}

Term parse_term(std::size_t line, std::string_view field, std::size_t& pos) {
  if (pos < field.size() && field[pos] == '\'') {
    auto close = field.find('\'', pos + 1);
    if (close == std::string_view::npos) {
      throw ParseError(line, "unterminated quote in '" + std::string(field) + "'");
    }
    Term t{std::string(field.substr(pos + 1, close - pos - 1)), true};
    pos = close + 1;
    return t;
  }
  std::size_t end = pos;
  while (end < field.size() && field[end] != ':') {
    if (field[end] == '\'') {
      throw ParseError(line, "stray quote in '" + std::string(field) + "'");
    }
    ++end;
  }
  if (end == pos) {
    throw ParseError(line, "empty name or value in '" + std::string(field) + "'");
  }
  Term t{std::string(field.substr(pos, end - pos)), false};
  pos = end;
  return t;
}

Input parse_input(std::size_t line, std::string_view field) {
  std::size_t pos = 0;
  Term name = parse_term(line, field, pos);
  if (pos >= field.size() || field[pos] != ':') {
    throw ParseError(line, "input field '" + std::string(field) + "' lacks ':'");
  }
  ++pos;
  if (pos >= field.size()) {
    throw ParseError(line, "input field '" + std::string(field) + "' has no value");
  }
  Term value = parse_term(line, field, pos);
  if (pos != field.size()) {
    throw ParseError(line, "malformed input field '" + std::string(field) + "'");
  }
  return {std::move(name), std::move(value)};
}

std::string format_term(const Term& t) { return t.literal ? "'" + t.text + "'" : t.text; }

std::string format_inputs(const std::vector<Input>& inputs) {
  std::string out;
  for (const Input& in : inputs) {
    out += " " + format_term(in.name) + ":" + format_term(in.value);
  }
  return out;
}

// Parses `SERVICE (PAIR)+ OUTPUT` starting at fields[first].
InvocationStep parse_call(std::size_t line, const std::vector<std::string_view>& f,
                          std::size_t first) {
  if (f.size() < first + 3) {
    throw ParseError(line, "expected a service, at least one input and an output");
  }
  InvocationStep step;
  step.service = std::string(f[first]);
  for (std::size_t i = first + 1; i + 1 < f.size(); ++i) {
    step.inputs.push_back(parse_input(line, f[i]));
  }
  step.output = std::string(f.back());
  if (!is_reference_token(step.output)) {
    throw ParseError(line, "output '" + step.output + "' must be an unquoted reference");
  }
  return step;
}

}  // namespace

std::vector<std::string> consumed_references(const std::vector<Input>& inputs) {
  std::vector<std::string> refs;
  for (const Input& in : inputs) {
    for (const Term* t : {&in.name, &in.value}) {
      if (!t->literal) {
        refs.push_back(t->text);
      }
    }
  }
  return refs;
}

InvocationDescription parse_invocation_description(std::string_view text) {
  InvocationDescription desc;
  std::set<std::string> outputs;
  detail::for_each_record(text, [&](std::size_t line, std::string_view body) {
    InvocationStep step = parse_call(line, detail::split_fields(body), 0);
    if (!outputs.insert(step.output).second) {
      throw ParseError(line, "output '" + step.output + "' is produced twice");
    }
    desc.steps.push_back(std::move(step));
  });
  return desc;
}

std::string serialize_invocation_description(const InvocationDescription& desc) {
  std::string out;
  for (const InvocationStep& s : desc.steps) {
    out += s.service + format_inputs(s.inputs) + " " + s.output + "\n";
  }
  return out;
}

std::vector<std::string> validate_invocation_description(const InvocationDescription& desc) {
  std::vector<std::string> problems;
  std::unordered_map<std::string, std::size_t> producer;
  for (std::size_t i = 0; i < desc.steps.size(); ++i) {
    if (desc.steps[i].inputs.empty()) {
      problems.push_back("step " + std::to_string(i + 1) + " has no inputs");
    }
    if (!producer.emplace(desc.steps[i].output, i).second) {
      problems.push_back("output '" + desc.steps[i].output + "' is produced twice");
    }
  }
  for (std::size_t i = 0; i < desc.steps.size(); ++i) {
    for (const std::string& ref : consumed_references(desc.steps[i].inputs)) {
      auto it = producer.find(ref);
      if (it != producer.end() && it->second >= i) {
        problems.push_back("step " + std::to_string(i + 1) + " (" + desc.steps[i].service +
                           ") consumes '" + ref + "' before it is produced");
      }
    }
  }
  return problems;
}

void DeploymentMapping::add(ServiceId service, LocationId region) {
  if (region_of(service)) {
    throw ValidationError("service '" + service + "' is mapped twice");
  }
  entries_.emplace_back(std::move(service), std::move(region));
}

std::optional<LocationId> DeploymentMapping::region_of(std::string_view service) const {
  for (const auto& [s, r] : entries_) {
    if (s == service) {
      return r;
    }
  }
  return std::nullopt;
}

DeploymentMapping parse_deployment_plan(std::string_view text) {
  DeploymentMapping mapping;
  detail::for_each_record(text, [&](std::size_t line, std::string_view body) {
    auto arrow = body.find("-->");
    if (arrow == std::string_view::npos) {
      throw ParseError(line, "expected 'SERVICE --> REGION'");
    }
    auto lhs = detail::split_fields(body.substr(0, arrow));
    auto rhs = detail::split_fields(body.substr(arrow + 3));
    if (lhs.size() != 1 || rhs.size() != 1) {
      throw ParseError(line, "each side of '-->' must be exactly one name");
    }
    try {
      mapping.add(std::string(lhs[0]), std::string(rhs[0]));
    } catch (const ValidationError& e) {
      throw ParseError(line, e.what());
    }
  });
  return mapping;
}

std::string serialize_deployment_plan(const DeploymentMapping& mapping) {
  std::string out;
  for (const auto& [service, region] : mapping.entries()) {
    out += service + " --> " + region + "\n";
  }
  return out;
}

std::optional<std::string> ExecutionPlan::host_of(std::string_view engine) const {
  for (const Deployment& d : deployments) {
    if (d.engine == engine) {
      return d.host;
    }
  }
  return std::nullopt;
}

ExecutionPlan parse_execution_plan(std::string_view text) {
  ExecutionPlan plan;
  std::set<std::string, std::less<>> hosts;
  std::set<std::string, std::less<>> engines;
  std::set<std::string, std::less<>> deployed;
  std::set<std::string> outputs;
  std::size_t last_step_line = 0;

  auto declare = [](std::set<std::string, std::less<>>& set, std::size_t line,
                    std::string_view alias, std::string_view what) {
    if (!is_reference_token(alias)) {
      throw ParseError(line, "invalid " + std::string(what) + " alias '" + std::string(alias) + "'");
    }
    if (!set.emplace(alias).second) {
      throw ParseError(line, std::string(what) + " '" + std::string(alias) + "' declared twice");
    }
  };

  detail::for_each_record(text, [&](std::size_t line, std::string_view body) {
    auto f = detail::split_fields(body);
    if (f[0] == "host") {
      if (f.size() != 5) {
        throw ParseError(line, "expected 'host ALIAS PROVIDER USER ADDR'");
      }
      declare(hosts, line, f[1], "host");
      HostRecord record{std::string(f[2]), std::string(f[3]), std::nullopt};
      if (f[4] != "_") {
        record.address = std::string(f[4]);
      }
      plan.hosts.push_back({std::string(f[1]), std::move(record)});
    } else if (f[0] == "serv") {
      if (f.size() != 3) {
        throw ParseError(line, "expected 'serv ALIAS APP'");
      }
      declare(engines, line, f[1], "engine");
      plan.engines.push_back({std::string(f[1]), std::string(f[2])});
    } else if (f[0] == "depl") {
      if (f.size() != 3) {
        throw ParseError(line, "expected 'depl ENGINE HOST'");
      }
      if (!engines.count(f[1])) {
        throw ParseError(line, "deployment of undeclared engine '" + std::string(f[1]) + "'");
      }
      if (!hosts.count(f[2])) {
        throw ParseError(line, "deployment on undeclared host '" + std::string(f[2]) + "'");
      }
      if (!deployed.emplace(f[1]).second) {
        throw ParseError(line, "engine '" + std::string(f[1]) + "' deployed twice");
      }
      plan.deployments.push_back({std::string(f[1]), std::string(f[2])});
    } else if (engines.count(f[0])) {
      last_step_line = line;
      InvocationStep call = parse_call(line, f, 1);
      if (!outputs.insert(call.output).second) {
        throw ParseError(line, "output '" + call.output + "' is produced twice");
      }
      std::string_view service = call.service;
      if (service.size() > kSetterSuffix.size() && service.ends_with(kSetterSuffix)) {
        std::string_view target = service.substr(0, service.size() - kSetterSuffix.size());
        if (!engines.count(target)) {
          throw ParseError(line, "Setter target '" + std::string(target) + "' is not an engine");
        }
        if (call.inputs.size() != 1 || !call.inputs[0].name.literal ||
            call.inputs[0].value.literal) {
          throw ParseError(line, "a Setter step takes exactly one 'KEY':REF input");
        }
        plan.steps.emplace_back(Transfer{std::string(f[0]), std::string(target),
                                         call.inputs[0].name.text, call.inputs[0].value.text,
                                         call.output});
      } else {
        plan.steps.emplace_back(Invocation{std::string(f[0]), std::move(call.service),
                                           std::move(call.inputs), std::move(call.output)});
      }
    } else {
      throw ParseError(line, "unknown directive or undeclared engine '" + std::string(f[0]) + "'");
    }
  });

  for (const PlanStep& step : plan.steps) {
    std::vector<std::string_view> used;
    if (const auto* inv = std::get_if<Invocation>(&step)) {
      used = {inv->engine};
    } else {
      const auto& t = std::get<Transfer>(step);
      used = {t.from, t.to};
    }
    for (std::string_view engine : used) {
      if (!deployed.count(engine)) {
        throw ParseError(last_step_line,
                         "engine '" + std::string(engine) + "' runs steps but is never deployed");
      }
    }
  }
  return plan;
}

std::string serialize_execution_plan(const ExecutionPlan& plan) {
  std::string out;
  auto section = [&](const char* title) {
    if (!out.empty()) {
      out += "\n";
    }
    out += std::string("# ") + title + "\n";
  };
  if (!plan.hosts.empty()) {
    section("define hosts");
    for (const Host& h : plan.hosts) {
      out += "host " + h.alias + " " + h.record.provider + " " + h.record.user + " " +
             h.record.address.value_or("_") + "\n";
    }
  }
  if (!plan.engines.empty()) {
    section("define engines");
    for (const EngineDecl& e : plan.engines) {
      out += "serv " + e.alias + " " + e.application + "\n";
    }
  }
  if (!plan.deployments.empty()) {
    section("deploy engines on hosts");
    for (const Deployment& d : plan.deployments) {
      out += "depl " + d.engine + " " + d.host + "\n";
    }
  }
  std::string current;
  for (const PlanStep& step : plan.steps) {
    const std::string& engine = std::visit(
        [](const auto& s) -> const std::string& {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Invocation>) {
            return s.engine;
          } else {
            return s.from;
          }
        },
        step);
    if (engine != current) {
      section(("invocations for " + engine).c_str());
      current = engine;
    }
    if (const auto* inv = std::get_if<Invocation>(&step)) {
      out += inv->engine + " " + inv->service + format_inputs(inv->inputs) + " " + inv->output +
             "\n";
    } else {
      const auto& t = std::get<Transfer>(step);
      out += t.from + " " + t.to + std::string(kSetterSuffix) + " '" + t.key + "':" + t.ref + " " +
             t.ack + "\n";
    }
  }
  return out;
}

ExecutionPlan generate_execution_plan(const InvocationDescription& desc,
                                      const DeploymentMapping& mapping,
                                      const std::map<LocationId, HostRecord>& host_records) {
  if (auto problems = validate_invocation_description(desc); !problems.empty()) {
    throw ValidationError("invalid invocation description", std::move(problems));
  }

  ExecutionPlan plan;
  std::map<LocationId, std::string> engine_of_region;
  std::vector<std::string> step_engine;
  for (const InvocationStep& step : desc.steps) {
    auto region = mapping.region_of(step.service);
    if (!region) {
      throw ValidationError("service '" + step.service + "' has no region in the deployment plan");
    }
    auto [it, inserted] = engine_of_region.try_emplace(*region, "");
    if (inserted) {
      auto record = host_records.find(*region);
      if (record == host_records.end()) {
        throw ValidationError("no host record for region '" + *region + "'");
      }
      it->second = "eng_" + std::to_string(plan.engines.size() + 1);
      plan.hosts.push_back({*region, record->second});
      plan.engines.push_back({it->second, "engine"});
      plan.deployments.push_back({it->second, *region});
    }
    step_engine.push_back(it->second);
  }

  std::unordered_map<std::string, std::size_t> producer;
  for (std::size_t i = 0; i < desc.steps.size(); ++i) {
    producer.emplace(desc.steps[i].output, i);
  }
  // Engines each step's output must be shipped to, in order of first use.
  std::vector<std::vector<std::string>> ship_to(desc.steps.size());
  for (std::size_t i = 0; i < desc.steps.size(); ++i) {
    for (const std::string& ref : consumed_references(desc.steps[i].inputs)) {
      auto it = producer.find(ref);
      if (it == producer.end()) {
        continue;  // external input, present everywhere
      }
      auto& targets = ship_to[it->second];
      if (step_engine[it->second] != step_engine[i] &&
          std::find(targets.begin(), targets.end(), step_engine[i]) == targets.end()) {
        targets.push_back(step_engine[i]);
      }
    }
  }

  std::size_t ack = 0;
  for (std::size_t i = 0; i < desc.steps.size(); ++i) {
    const InvocationStep& s = desc.steps[i];
    plan.steps.emplace_back(Invocation{step_engine[i], s.service, s.inputs, s.output});
    for (const std::string& target : ship_to[i]) {
      plan.steps.emplace_back(
          Transfer{step_engine[i], target, s.output, s.output, "ack_" + std::to_string(++ack)});
    }
  }
  return plan;
}

}  // namespace wfdeploy
