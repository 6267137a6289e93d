#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kmapf/mapd.hpp"
#include "kmapf/scenario.hpp"
#include "support/oracles.hpp"

using namespace kmapf;

namespace {

SimConfig small_config(MechanismKind kind, uint64_t seed) {
  SimConfig config;
  config.interior_width = 6;
  config.interior_height = 6;
  config.agent_count = 4;
  config.mechanism = {kind, 0.5};
  config.episode_length = 40;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("zero rate spawns nothing") {
  GridMap map(5, 5, 1);
  Rng rng(1);
  for (int k = 0; k < 50; ++k)
    CHECK(spawn_tasks(rng, 0.0, k, map, 100, 0).empty());
}

TEST_CASE("spawned cells are distinct interior cells") {
  GridMap map(5, 5, 1);
  Rng rng(77);
  int seen = 0;
  for (int t = 0; seen < 10000; ++t)
    for (const Task& task : spawn_tasks(rng, 2.0, t, map, 1000, seen)) {
      ++seen;
      CHECK(map.interior(task.pickup));
      CHECK(map.interior(task.delivery));
      CHECK_FALSE(task.pickup == task.delivery);
    }
}

TEST_CASE("empirical spawn mean is within three sigma of the rate") {
  GridMap map(5, 5, 1);
  Rng rng(313);
  const double rate = 0.7;
  const int steps = 100000;
  long long total = 0;
  for (int t = 0; t < steps; ++t)
    total += static_cast<long long>(spawn_tasks(rng, rate, t, map, 1 << 20, 0).size());
  double mean = static_cast<double>(total) / steps;
  double sigma = std::sqrt(rate / steps);
  CHECK(std::fabs(mean - rate) < 3.0 * sigma);
}

TEST_CASE("matching: one idle agent takes the one task") {
  auto matches = match_tasks({{0, {{2, 2}, Orientation::East}, 0}}, {{4, 2}},
                             [](Pose p, Cell c) { return manhattan(p.cell, c); });
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].first == 0);
  CHECK(matches[0].second == 0);
}

TEST_CASE("matching: a soon-free busy agent beats a distant idle one") {
  // idle at distance 2 vs busy finishing in 1 step right on the pickup
  std::vector<Availability> agents{{0, {{0, 0}, Orientation::East}, 0},
                                   {1, {{4, 2}, Orientation::East}, 1}};
  auto matches = match_tasks(agents, {{4, 2}}, [](Pose p, Cell c) {
    return manhattan(p.cell, c);
  });
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].first == 1);  // cost 1 + 0 beats 0 + 2
}

TEST_CASE("matching minimizes the sum, not per-agent greed") {
  // agent 0 is closer to task 0 (2 < 4), yet the joint optimum crosses:
  // cost matrix [[2, 4], [1, 5]] -> greedy 2+5=7, optimal 4+1=5
  std::vector<Availability> agents{{0, {{0, 0}, Orientation::East}, 0},
                                   {1, {{0, 1}, Orientation::East}, 0}};
  std::vector<Cell> pickups{{0, 2}, {4, 0}};
  auto matches = match_tasks(agents, pickups, [](Pose p, Cell c) {
    return manhattan(p.cell, c);
  });
  REQUIRE(matches.size() == 2);
  std::map<AgentId, int> by_agent;
  for (auto [agent, task] : matches) by_agent[agent] = task;
  CHECK(by_agent.at(0) == 1);
  CHECK(by_agent.at(1) == 0);
  CHECK(testing::assignment_oracle({{2, 4}, {1, 5}}) == 5.0);
}

TEST_CASE("a step with no tasks leaves the lone agent waiting in place") {
  SimConfig config = small_config(MechanismKind::Karma, 3);
  config.agent_count = 1;
  config.task_rate = 0.0;
  config.fixed_starts = {{{3, 3}, Orientation::East}};
  Simulation sim(config);
  Pose before = sim.fleet().agents[0].pose;
  sim.step();
  CHECK(sim.now() == 1);
  CHECK(sim.fleet().agents[0].pose == before);
  CHECK(sim.tasks().empty());
  CHECK(sim.astar_calls() == 0);
}

TEST_CASE("pickup one step ahead: lifecycle timestamps and karma reset") {
  SimConfig config = small_config(MechanismKind::Karma, 5);
  config.agent_count = 1;
  config.task_rate = 0.0;
  config.fixed_starts = {{{2, 2}, Orientation::East}};
  Simulation sim(config);
  sim.inject_task({3, 2}, {3, 5});
  sim.step();
  const Task& task = sim.tasks()[0];
  CHECK(task.assign_t == 0);
  CHECK(task.pickup_t == 1);  // adjacent and facing it: picked up after one step
  CHECK(task.deliver_t == -1);
  CHECK(sim.fleet().agents[0].karma == 0);
  REQUIRE(sim.trace().pickups.size() == 1);
  CHECK(sim.trace().pickups[0].karma_after == 0);

  // delivery leg: one rotation south plus three forwards after the pickup
  for (int k = 0; k < 10 && sim.tasks()[0].deliver_t < 0; ++k) sim.step();
  CHECK(sim.tasks()[0].deliver_t == 5);
  CHECK(sim.tasks()[0].pickup_t == 1);
}

TEST_CASE("an agent already on the pickup cell collects it next step") {
  SimConfig config = small_config(MechanismKind::Egoistic, 5);
  config.agent_count = 1;
  config.task_rate = 0.0;
  config.fixed_starts = {{{2, 2}, Orientation::East}};
  Simulation sim(config);
  sim.inject_task({2, 2}, {4, 2});
  sim.step();
  CHECK(sim.tasks()[0].assign_t == 0);
  CHECK(sim.tasks()[0].pickup_t == 1);
}

TEST_CASE("head-on assignments stay conflict-free under every mechanism") {
  for (MechanismKind kind : {MechanismKind::TokenPassing, MechanismKind::Egoistic,
                             MechanismKind::Altruistic, MechanismKind::Karma}) {
    SimConfig config = small_config(kind, 11);
    config.agent_count = 2;
    config.task_rate = 0.0;
    config.paranoid_checks = true;
    config.fixed_starts = {{{1, 3}, Orientation::East}, {{6, 3}, Orientation::West}};
    Simulation sim(config);
    sim.inject_task({5, 3}, {5, 5});  // agent 0 heads east along row 3
    sim.inject_task({6, 3}, {1, 3});  // agent 1 delivers westward along row 3
    MetricsSummary summary;
    CHECK_NOTHROW(summary = sim.run());  // execute_phase throws on any conflict
    CHECK(check_trace(sim.trace()).empty());
    CHECK(summary.completed_tasks == 2);
  }
}

TEST_CASE("empty fleet completes nothing and never plans") {
  SimConfig config = small_config(MechanismKind::TokenPassing, 1);
  config.agent_count = 0;
  config.task_rate = 1.0;
  MetricsSummary summary = Simulation(config).run();
  CHECK(summary.completed_tasks == 0);
  CHECK(summary.astar_calls == 0);
  CHECK(summary.plan_events == 0);
}

TEST_CASE("a lone agent always serves tasks at the unconstrained optimum") {
  SimConfig config = small_config(MechanismKind::Karma, 21);
  config.agent_count = 1;
  config.task_rate = 0.4;
  config.episode_length = 80;
  MetricsSummary summary = Simulation(config).run();
  REQUIRE(summary.completed_tasks > 0);
  for (const TaskRecord& task : summary.tasks)
    if (task.deliver_t >= 0) CHECK(task.service_time_increase == 0);
}

TEST_CASE("same config and seed give byte-identical traces") {
  for (MechanismKind kind : {MechanismKind::TokenPassing, MechanismKind::Karma}) {
    SimConfig config = small_config(kind, 99);
    Simulation a(config), b(config);
    a.run();
    b.run();
    CHECK(trace_jsonl(a.trace()) == trace_jsonl(b.trace()));
  }
}

TEST_CASE("token passing: planner calls equal plan events") {
  SimConfig config = small_config(MechanismKind::TokenPassing, 17);
  config.episode_length = 60;
  Simulation sim(config);
  MetricsSummary summary = sim.run();
  CHECK(summary.completed_tasks > 0);
  CHECK(summary.astar_calls == summary.plan_events);
}

TEST_CASE("episode traces pass the post-hoc checker for every mechanism") {
  for (MechanismKind kind : {MechanismKind::TokenPassing, MechanismKind::Egoistic,
                             MechanismKind::Altruistic, MechanismKind::Karma}) {
    SimConfig config = small_config(kind, 31);
    config.paranoid_checks = true;  // pairwise conflict check after every phase
    Simulation sim(config);
    sim.run();
    auto issues = check_trace(sim.trace());
    for (const TraceIssue& issue : issues)
      MESSAGE("t=", issue.t, ": ", issue.what);
    CHECK(issues.empty());
  }
}

TEST_CASE("task timestamps are ordered and tasks count only when delivered") {
  SimConfig config = small_config(MechanismKind::Altruistic, 47);
  Simulation sim(config);
  MetricsSummary summary = sim.run();
  int delivered = 0;
  for (const TaskRecord& task : summary.tasks) {
    if (task.assign_t >= 0) CHECK(task.assign_t >= task.spawn_t);
    if (task.pickup_t >= 0) CHECK(task.pickup_t >= task.assign_t);
    if (task.deliver_t >= 0) {
      CHECK(task.deliver_t >= task.pickup_t);
      ++delivered;
      CHECK(task.service_time_increase >= 0);
    }
  }
  CHECK(delivered == summary.completed_tasks);
}
