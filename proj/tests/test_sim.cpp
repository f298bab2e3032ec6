#include "doctest.h"
#include "reference_scripts.hpp"
#include "support.hpp"

#include "wfdeploy/errors.hpp"
#include "wfdeploy/sim.hpp"
#include "wfdeploy/workgen.hpp"

#include <random>

using namespace wfdeploy;
using namespace wfdeploy::testing;

namespace {

ExecutionPlan reference_generated() {
  return generate_execution_plan(parse_invocation_description(kRefInvocation),
                                 parse_deployment_plan(kRefDeployment),
                                 {{"region_1", {}}, {"region_2", {}}});
}

SimConfig reference_config() {
  SimConfig cfg;
  cfg.cost_matrix = uniform_matrix({"region_1", "region_2", "home_1", "home_2"}, q(1));
  cfg.data_sizes = {{"value_2", q(1)}, {"value_3", q(1)}};
  cfg.service_locations = {{"ws_1", "home_1"}, {"ws_2", "home_2"}};
  return cfg;
}

Workflow generated(std::uint64_t seed, std::size_t n, const std::vector<LocationId>& regions) {
  WorkflowSpec spec;
  spec.n_services = n;
  spec.regions = regions;
  return generate_workflow(seed, spec);
}

}  // namespace

TEST_CASE("the two-engine example, hand-traced") {
  // ws_1: literal input, 1 unit out          -> done at 0 + 0 + 1 = 1
  // Setter value_2 eng_1 -> eng_2, 1 unit    -> done at 1 + 1 = 2
  // ws_2: 1 unit in, 1 unit out              -> done at 2 + 1 + 1 = 4
  SimTrace t = simulate(reference_generated(), reference_config());
  CHECK(t.ready == std::vector<Rational>{q(0), q(1), q(2)});
  CHECK(t.completion == std::vector<Rational>{q(1), q(2), q(4)});
  CHECK(t.makespan == 4);
  CHECK(format_trace(t) ==
        "step 0 ready 0 done 1\n"
        "step 1 ready 1 done 2\n"
        "step 2 ready 2 done 4\n"
        "makespan 4\n");
}

TEST_CASE("compute time delays the invocation") {
  SimConfig cfg = reference_config();
  cfg.compute_time["ws_1"] = q(5, 2);
  CHECK(simulate(reference_generated(), cfg).makespan == q(13, 2));
}

TEST_CASE("empty plan") {
  CHECK(simulate(ExecutionPlan{}, SimConfig{}).makespan == 0);
}

TEST_CASE("simulation errors") {
  SUBCASE("missing size") {
    SimConfig cfg = reference_config();
    cfg.data_sizes.erase("value_3");
    CHECK_THROWS_WITH_AS(simulate(reference_generated(), cfg), doctest::Contains("value_3"),
                         std::invalid_argument);
  }
  SUBCASE("removing the transfer deadlocks the consumer") {
    ExecutionPlan p = reference_generated();
    p.steps.erase(p.steps.begin() + 1);
    try {
      simulate(p, reference_config());
      FAIL("expected deadlock");
    } catch (const DeadlockError& e) {
      CHECK(e.blocked_steps() == std::vector<std::size_t>{1});
    }
  }
  SUBCASE("engine host outside the matrix") {
    SimConfig cfg = reference_config();
    cfg.cost_matrix = uniform_matrix({"region_1", "home_1", "home_2"}, q(1));
    CHECK_THROWS_AS(simulate(reference_generated(), cfg), std::invalid_argument);
  }
}

TEST_CASE("plan_from_solution threads references through the workflow") {
  SUBCASE("chain") {
    auto in = plan_from_solution(chain_workflow(), {{"r1", "r2"}, 0}, chain_matrix());
    REQUIRE(in.description.steps.size() == 2);
    // s1's input comes from outside; s2 reads s1's output.
    CHECK(in.description.steps[0].inputs[0].value == Term{"s1_in", false});
    CHECK(in.description.steps[1].inputs == std::vector<Input>{{{"in_1", true}, {"s1_out", false}}});
    CHECK(in.config.data_sizes.at("s1_in") == q(11, 2));
    CHECK(in.service_step == std::vector<std::size_t>{0, 2});
  }
  SUBCASE("fan-in") {
    Workflow w({{"a", "r1", q(0), q(1)}, {"b", "r1", q(0), q(2)}, {"c", "r1", q(3), q(1)}},
               {{"a", "c"}, {"b", "c"}});
    auto in = plan_from_solution(w, {{"r1", "r1", "r1"}, 0}, chain_matrix());
    CHECK(in.description.steps[0].inputs == std::vector<Input>{{{"input", true}, {"0", true}}});
    CHECK(consumed_references(in.description.steps[2].inputs) ==
          std::vector<std::string>{"a_out", "b_out"});
  }
  SUBCASE("in_size below the incoming data is rejected") {
    Workflow w({{"a", "r1", q(0), q(5)}, {"b", "r1", q(1), q(1)}}, {{"a", "b"}});
    CHECK_THROWS_AS(plan_from_solution(w, {{"r1", "r1"}, 0}, chain_matrix()), ValidationError);
  }
}

TEST_CASE("simulation reproduces the cost model exactly") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    auto regions = region_names(1 + trial % 5);
    Workflow w = generated(static_cast<std::uint64_t>(trial), 1 + trial % 11, regions);
    CostMatrix m = random_matrix(rng, regions);
    DeploymentPlan plan = random_plan(rng, w, regions);
    CostReport report = evaluate(w, plan, m);
    auto in = plan_from_solution(w, plan, m);
    SimTrace t = simulate(in.plan, in.config);
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(t.completion[in.service_step[i]] == report.services[i].up_to);
    }
    CHECK(t.makespan == report.total_movement);
    CHECK(simulate(in.plan, in.config) == t);
    CHECK(parse_execution_plan(serialize_execution_plan(in.plan)) == in.plan);
  }
}

TEST_CASE("raising a cost never shortens the makespan") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto regions = region_names(3);
    Workflow w = generated(static_cast<std::uint64_t>(trial) + 500, 6, regions);
    CostMatrix m = random_matrix(rng, regions);
    auto in = plan_from_solution(w, random_plan(rng, w, regions), m);
    Rational before = simulate(in.plan, in.config).makespan;
    std::vector<Rational> costs;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        costs.push_back(m.entry(i, j));
      }
    }
    costs[std::uniform_int_distribution<std::size_t>(0, costs.size() - 1)(rng)] += q(3, 2);
    in.config.cost_matrix = CostMatrix(m.locations(), costs);
    CHECK(simulate(in.plan, in.config).makespan >= before);
  }
}

TEST_CASE("every generated transfer is necessary") {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto regions = region_names(3);
    Workflow w = generated(static_cast<std::uint64_t>(trial) + 900, 7, regions);
    CostMatrix m = random_matrix(rng, regions);
    auto in = plan_from_solution(w, random_plan(rng, w, regions), m);
    for (std::size_t s = 0; s < in.plan.steps.size(); ++s) {
      if (!std::holds_alternative<Transfer>(in.plan.steps[s])) {
        continue;
      }
      ExecutionPlan cut = in.plan;
      cut.steps.erase(cut.steps.begin() + static_cast<std::ptrdiff_t>(s));
      CHECK_THROWS_AS(simulate(cut, in.config), DeadlockError);
      ++checked;
    }
  }
  CHECK(checked > 20);
}
