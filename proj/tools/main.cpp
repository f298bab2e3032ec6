// wfdeploy: validate, solve, sweep, simulate and compare workflow deployments.
//
// Exit codes: 0 success, 1 semantic validation failure, 2 I/O, parse or usage
// error, 3 internal consistency failure (oracle or model/simulation mismatch).

#include "wfdeploy/cost.hpp"
#include "wfdeploy/errors.hpp"
#include "wfdeploy/model.hpp"
#include "wfdeploy/model_io.hpp"
#include "wfdeploy/optimizer.hpp"
#include "wfdeploy/plan_io.hpp"
#include "wfdeploy/sim.hpp"
#include "wfdeploy/workgen.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace wfdeploy;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kInputError = 2, kMismatch = 3 };

// Raised when the model and an independent check disagree.
struct Mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw IoError("cannot write '" + path + "'");
  }
}

Rational parse_flag_rational(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

std::vector<Rational> parse_rates(const std::string& text) {
  std::vector<Rational> rates;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      rates.push_back(parse_flag_rational("--rates", item));
    }
  }
  if (rates.empty()) {
    throw CLI::ValidationError("--rates", "at least one rate is required");
  }
  return rates;
}

struct Inputs {
  Workflow workflow;
  CostMatrix matrix;
};

// Parses both files and rejects anything validate would report.
Inputs load_inputs(const std::string& workflow_path, const std::string& matrix_path) {
  Inputs in{parse_workflow(read_text(workflow_path)), parse_cost_matrix(read_text(matrix_path))};
  std::vector<std::string> problems;
  for (const Violation& v : validate_workflow(in.workflow)) {
    problems.push_back(v.message);
  }
  for (const Violation& v : validate_locations(in.workflow, in.matrix)) {
    problems.push_back(v.message);
  }
  if (in.workflow.size() == 0) {
    problems.emplace_back("workflow declares no services");
  }
  if (!problems.empty()) {
    throw ValidationError("invalid input", std::move(problems));
  }
  return in;
}

DeploymentPlan plan_from_mapping(const Workflow& w, const CostMatrix& m,
                                 const DeploymentMapping& mapping, const Rational& rate) {
  std::vector<std::string> problems;
  DeploymentPlan plan;
  plan.overhead_rate = rate;
  for (const Service& s : w.services()) {
    auto region = mapping.region_of(s.id);
    if (!region) {
      problems.push_back("service '" + s.id + "' has no engine region");
      continue;
    }
    if (!m.index_of(*region)) {
      problems.push_back("region '" + *region + "' of service '" + s.id +
                         "' is not in the cost matrix");
    }
    plan.regions.push_back(*region);
  }
  for (const auto& [service, region] : mapping.entries()) {
    if (!w.index_of(service)) {
      problems.push_back("plan maps unknown service '" + service + "'");
    }
  }
  if (!problems.empty()) {
    throw ValidationError("invalid deployment plan", std::move(problems));
  }
  return plan;
}

DeploymentMapping mapping_of(const Workflow& w, const DeploymentPlan& plan) {
  DeploymentMapping mapping;
  for (std::size_t i = 0; i < w.size(); ++i) {
    mapping.add(w.service(i).id, plan.regions[i]);
  }
  return mapping;
}

// Runs the plan through the simulator and checks it against the cost model.
SimTrace simulate_checked(const Workflow& w, const DeploymentPlan& plan, const CostMatrix& m,
                          const std::optional<std::string>& exec_plan_path) {
  SimulationInputs sim = plan_from_solution(w, plan, m);
  if (exec_plan_path) {
    write_text(*exec_plan_path, serialize_execution_plan(sim.plan));
  }
  SimTrace trace = simulate(sim.plan, sim.config);
  CostReport report = evaluate(w, plan, m);
  std::ostringstream diff;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Rational& simulated = trace.completion[sim.service_step[i]];
    if (simulated != report.services[i].up_to) {
      diff << "service " << w.service(i).id << ": simulated " << format_rational(simulated)
           << ", model " << format_rational(report.services[i].up_to) << "\n";
    }
  }
  if (trace.makespan != report.total_movement) {
    diff << "makespan " << format_rational(trace.makespan) << ", model movement "
         << format_rational(report.total_movement) << "\n";
  }
  if (!diff.str().empty()) {
    throw Mismatch("simulation disagrees with the cost model\n" + diff.str());
  }
  return trace;
}

std::string commented(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out += "# " + line + "\n";
  }
  return out;
}

std::optional<std::size_t> engines_limit(std::size_t value) {
  return value == 0 ? std::nullopt : std::optional<std::size_t>(value);
}

struct Common {
  std::string workflow;
  std::string matrix;
};

void add_inputs(CLI::App* cmd, Common& c) {
  cmd->add_option("workflow", c.workflow, "Workflow file")->required();
  cmd->add_option("matrix", c.matrix, "Cost matrix file")->required();
}

int run_validate(const Common& c) {
  Workflow w = parse_workflow(read_text(c.workflow));
  CostMatrix m = parse_cost_matrix(read_text(c.matrix));
  std::vector<Violation> violations = validate_workflow(w);
  for (Violation& v : validate_locations(w, m)) {
    violations.push_back(std::move(v));
  }
  if (w.size() == 0) {
    std::cout << "workflow declares no services\n";
    return kInvalid;
  }
  if (violations.empty()) {
    std::cout << "OK\n";
    return kOk;
  }
  for (const Violation& v : violations) {
    std::cout << v.message << "\n";
  }
  return kInvalid;
}

struct SolveFlags {
  Common in;
  std::string overhead = "0";
  std::size_t max_engines = 0;
  unsigned threads = 1;
  bool oracle = false;
  std::string report_path;
  std::string exec_plan_path;
};

int run_solve(const SolveFlags& f) {
  Inputs in = load_inputs(f.in.workflow, f.in.matrix);
  SolveRequest req = make_request(in.workflow, in.matrix,
                                  parse_flag_rational("--overhead", f.overhead),
                                  engines_limit(f.max_engines));
  Solution best = solve_branch_and_bound(req, {.threads = f.threads});
  if (f.oracle) {
    Solution reference = solve_brute_force(req);
    if (reference.plan != best.plan || reference.report.total_cost != best.report.total_cost) {
      throw Mismatch("branch and bound disagrees with brute force: " +
                     format_rational(best.report.total_cost) + " vs " +
                     format_rational(reference.report.total_cost));
    }
  }
  std::string report = format_report(best.report);
  std::cout << serialize_deployment_plan(mapping_of(in.workflow, best.plan)) << commented(report);
  if (!f.report_path.empty()) {
    write_text(f.report_path, report);
  }
  if (!f.exec_plan_path.empty()) {
    write_text(f.exec_plan_path,
               serialize_execution_plan(plan_from_solution(in.workflow, best.plan, in.matrix).plan));
  }
  return kOk;
}

struct SweepFlags {
  Common in;
  std::string rates;
  std::size_t max_engines = 0;
  unsigned threads = 1;
  std::string format = "tsv";
};

int run_sweep(const SweepFlags& f) {
  std::vector<Rational> rates = parse_rates(f.rates);
  Inputs in = load_inputs(f.in.workflow, f.in.matrix);
  SolveRequest req = make_request(in.workflow, in.matrix, 0, engines_limit(f.max_engines));
  auto points = sweep_overhead(req, rates, {.threads = f.threads});
  const char* sep = f.format == "tsv" ? "\t" : " ";
  std::cout << "rate" << sep << "engines" << sep << "movement" << sep << "total\n";
  for (const SweepPoint& p : points) {
    const CostReport& r = p.solution.report;
    std::cout << format_rational(p.rate) << sep << r.engines_used << sep
              << format_rational(r.total_movement) << sep << format_rational(r.total_cost) << "\n";
  }
  return kOk;
}

struct SimulateFlags {
  Common in;
  std::string plan;
  std::string exec_plan_path;
};

int run_simulate(const SimulateFlags& f) {
  Inputs in = load_inputs(f.in.workflow, f.in.matrix);
  DeploymentMapping mapping = parse_deployment_plan(read_text(f.plan));
  DeploymentPlan plan = plan_from_mapping(in.workflow, in.matrix, mapping, 0);
  std::optional<std::string> exec_path;
  if (!f.exec_plan_path.empty()) {
    exec_path = f.exec_plan_path;
  }
  SimTrace trace = simulate_checked(in.workflow, plan, in.matrix, exec_path);
  SimulationInputs sim = plan_from_solution(in.workflow, plan, in.matrix);
  for (std::size_t i = 0; i < in.workflow.size(); ++i) {
    std::cout << "service " << in.workflow.service(i).id << " done "
              << format_rational(trace.completion[sim.service_step[i]]) << "\n";
  }
  std::cout << "makespan " << format_rational(trace.makespan) << "\n";
  return kOk;
}

struct CompareFlags {
  Common in;
  std::string baseline;
  std::string overhead = "0";
  unsigned threads = 1;
};

int run_compare(const CompareFlags& f) {
  Inputs in = load_inputs(f.in.workflow, f.in.matrix);
  if (!in.matrix.index_of(f.baseline)) {
    throw ValidationError("baseline region '" + f.baseline + "' is not in the cost matrix");
  }
  SolveRequest req =
      make_request(in.workflow, in.matrix, parse_flag_rational("--overhead", f.overhead));
  Solution baseline = solve_centralized(req, f.baseline);
  Solution optimized = solve_branch_and_bound(req, {.threads = f.threads});
  SimTrace base_trace = simulate_checked(in.workflow, baseline.plan, in.matrix, std::nullopt);
  SimTrace opt_trace = simulate_checked(in.workflow, optimized.plan, in.matrix, std::nullopt);
  std::cout << "baseline_movement " << format_rational(base_trace.makespan) << "\n"
            << "optimized_movement " << format_rational(opt_trace.makespan) << "\n"
            << "optimized_engines " << optimized.report.engines_used << "\n";
  if (opt_trace.makespan == 0) {
    std::cout << "speedup undefined (zero movement)\n";
    return kInvalid;
  }
  Rational ratio = base_trace.makespan / opt_trace.makespan;
  std::cout << "speedup " << format_rational(ratio);
  if (format_rational(ratio).find('/') != std::string::npos) {
    std::ostringstream approx;
    approx.precision(4);
    approx << to_double(ratio);
    std::cout << " (~" << approx.str() << ")";
  }
  std::cout << "\n";
  return kOk;
}

struct GenerateFlags {
  std::size_t services = 10;
  std::size_t regions = 8;
  std::uint64_t seed = 1;
  std::string workflow_out;
  std::string matrix_out;
};

int run_generate(const GenerateFlags& f) {
  std::vector<LocationId> regions = numbered_regions(f.regions);
  WorkflowSpec spec;
  spec.n_services = f.services;
  spec.regions = regions;
  write_text(f.workflow_out, serialize_workflow(generate_workflow(f.seed, spec)));
  write_text(f.matrix_out, serialize_cost_matrix(synthetic_cost_matrix(f.seed, regions)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized workflow deployment planner"};
  app.require_subcommand(1);

  Common validate_flags;
  auto* validate = app.add_subcommand("validate", "Check a workflow against a cost matrix");
  add_inputs(validate, validate_flags);

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Find a minimum-cost deployment plan");
  add_inputs(solve, solve_flags.in);
  solve->add_option("--overhead", solve_flags.overhead, "Cost per extra engine")
      ->capture_default_str();
  solve->add_option("--max-engines", solve_flags.max_engines, "Engine cap (0 = none)");
  solve->add_option("--threads", solve_flags.threads, "Solver threads")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--oracle", solve_flags.oracle, "Cross-check against brute force");
  solve->add_option("--report", solve_flags.report_path, "Also write the cost report here");
  solve->add_option("--exec-plan", solve_flags.exec_plan_path, "Write the execution plan here");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Solve once per overhead rate");
  add_inputs(sweep, sweep_flags.in);
  sweep->add_option("--rates", sweep_flags.rates, "Comma-separated overhead rates")->required();
  sweep->add_option("--max-engines", sweep_flags.max_engines, "Engine cap (0 = none)");
  sweep->add_option("--threads", sweep_flags.threads, "Solver threads")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--format", sweep_flags.format, "tsv or text")
      ->check(CLI::IsMember({"tsv", "text"}));

  SimulateFlags simulate_flags;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a deployment plan");
  add_inputs(simulate_cmd, simulate_flags.in);
  simulate_cmd->add_option("plan", simulate_flags.plan, "Deployment plan file")->required();
  simulate_cmd->add_option("--exec-plan", simulate_flags.exec_plan_path,
                           "Write the simulated execution plan here");

  CompareFlags compare_flags;
  auto* compare = app.add_subcommand("compare", "Optimized plan against one region");
  add_inputs(compare, compare_flags.in);
  compare->add_option("--baseline-region", compare_flags.baseline, "Centralized region")
      ->required();
  compare->add_option("--overhead", compare_flags.overhead, "Cost per extra engine")
      ->capture_default_str();
  compare->add_option("--threads", compare_flags.threads, "Solver threads")
      ->check(CLI::PositiveNumber);

  GenerateFlags generate_flags;
  auto* generate = app.add_subcommand("generate", "Write a synthetic workflow and cost matrix");
  generate->add_option("--services", generate_flags.services)->check(CLI::PositiveNumber);
  generate->add_option("--regions", generate_flags.regions)->check(CLI::PositiveNumber);
  generate->add_option("--seed", generate_flags.seed);
  generate->add_option("--workflow-out", generate_flags.workflow_out)->required();
  generate->add_option("--matrix-out", generate_flags.matrix_out)->required();

  try {
    app.parse(argc, argv);
    if (*validate) return run_validate(validate_flags);
    if (*solve) return run_solve(solve_flags);
    if (*sweep) return run_sweep(sweep_flags);
    if (*simulate_cmd) return run_simulate(simulate_flags);
    if (*compare) return run_compare(compare_flags);
    return run_generate(generate_flags);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kInputError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    for (const auto& d : e.details()) {
      std::cerr << "  " << d << "\n";
    }
    return kInvalid;
  } catch (const SearchSpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Mismatch& e) {
    std::cerr << "consistency failure: " << e.what();
    return kMismatch;
  } catch (const std::logic_error& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return kMismatch;
  }
}
