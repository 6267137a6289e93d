#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kmapf/scenario.hpp"

using namespace kmapf;

TEST_CASE("defaults: steps 100, tau 0.5, planner-default horizon") {
  Scenario s = parse_scenario(R"({"mechanism": "karma", "agents": 4})");
  CHECK(s.config.episode_length == 100);
  CHECK(s.config.mechanism.tau == 0.5);
  CHECK(s.config.mechanism.kind == MechanismKind::Karma);
  CHECK(s.config.agent_count == 4);
  CHECK(s.config.interior_width == 10);
  CHECK(s.config.interior_height == 10);
  CHECK(s.config.horizon == 0);  // resolved to the planner default at use
  std::string text = serialize_scenario(s);
  CHECK(text.find("\"horizon\": 96") != std::string::npos);  // 4 * (12 + 12)
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"mechanism": "karma", "speed": 2})"),
                       "unknown key: speed", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"grid": {"interior_width": 5, "depth": 2}})"),
                       "unknown key: grid.depth", std::invalid_argument);
}

TEST_CASE("invalid values are rejected naming the key") {
  CHECK_THROWS_AS(parse_scenario(R"({"mechanism": "psychic"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario(R"({"tau": -1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario(R"({"steps": -5})"), std::invalid_argument);
}

TEST_CASE("parse then serialize is idempotent") {
  std::string original = R"({
    "grid": {"interior_width": 5, "interior_height": 7},
    "agents": 3,
    "mechanism": "altruistic",
    "seed": 42,
    "task_rate": 1.25
  })";
  std::string once = serialize_scenario(parse_scenario(original));
  std::string twice = serialize_scenario(parse_scenario(once));
  CHECK(once == twice);
}

TEST_CASE("sweep expansion: cross product with seeds fastest") {
  std::string text = R"({
    "base": {"mechanism": "karma", "agents": 4},
    "sweep": {"tau": [0.0, 0.5], "seed": {"from": 1, "to": 3}}
  })";
  SweepSpec spec = parse_sweep(text);
  CHECK(spec.combinations() == 2);
  CHECK(spec.rows() == 6);
  auto scenarios = expand_sweep(spec);
  REQUIRE(scenarios.size() == 6);
  CHECK(scenarios[0].config.mechanism.tau == 0.0);
  CHECK(scenarios[0].config.seed == 1);
  CHECK(scenarios[1].config.seed == 2);
  CHECK(scenarios[3].config.mechanism.tau == 0.5);
  CHECK(scenarios[3].config.seed == 1);
}

TEST_CASE("sweep rejects unknown keys") {
  CHECK_THROWS_WITH_AS(parse_sweep(R"({"sweep": {"velocity": [1]}})"),
                       "unknown key: sweep.velocity", std::invalid_argument);
}

TEST_CASE("oracle instances parse starts, headings, goals") {
  std::string text = R"({
    "grid": {"interior_width": 4, "interior_height": 4},
    "horizon": 16,
    "agents": [
      {"start": [0, 0], "heading": "E", "goal": [3, 0]},
      {"start": [5, 5], "heading": "N", "goal": [1, 1]}
    ]
  })";
  OneShotInstance instance = parse_instance(text);
  CHECK(instance.map.total_width() == 6);
  CHECK(instance.horizon == 16);
  REQUIRE(instance.starts.size() == 2);
  CHECK(instance.starts[0] == Pose{{0, 0}, Orientation::East});
  CHECK(instance.goals[1] == Cell{1, 1});
  CHECK_THROWS_AS(parse_instance(R"({"agents": []})"), std::invalid_argument);
}

TEST_CASE("tasks csv: exact column order, empty fields for unset times") {
  TaskRecord done;
  done.task_id = 0;
  done.spawn_t = 1;
  done.assign_t = 2;
  done.pickup_t = 4;
  done.deliver_t = 9;
  done.agent_id = 3;
  done.task_time = 7;
  done.service_time = 5;
  done.service_time_increase = 1;
  TaskRecord pending;
  pending.task_id = 1;
  pending.spawn_t = 6;
  std::string csv = tasks_csv({done, pending});
  CHECK(csv ==
        "task_id,spawn_t,assign_t,pickup_t,deliver_t,agent_id,task_time,service_time,"
        "service_time_increase\n"
        "0,1,2,4,9,3,7,5,1\n"
        "1,6,,,,,,,\n");
}

TEST_CASE("summary json echoes the config and the tau default") {
  Scenario s = parse_scenario(R"({"mechanism": "karma"})");
  MetricsSummary metrics;
  metrics.completed_tasks = 3;
  std::string text = summary_json(s, metrics);
  CHECK(text.find("\"tau\": 0.5") != std::string::npos);
  CHECK(text.find("\"completed_tasks\": 3") != std::string::npos);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("trace jsonl round-trips and replays to the same metrics") {
  SimConfig config;
  config.interior_width = 5;
  config.interior_height = 5;
  config.agent_count = 3;
  config.mechanism = {MechanismKind::Karma, 0.5};
  config.episode_length = 30;
  config.seed = 8;
  Simulation sim(config);
  MetricsSummary direct = sim.run();

  std::string text = trace_jsonl(sim.trace());
  EpisodeTrace parsed = parse_trace_jsonl(text);
  CHECK(trace_jsonl(parsed) == text);

  GridMap map(parsed.interior_width, parsed.interior_height, parsed.border_width);
  MetricsSummary replayed = replay_metrics(map, parsed);
  CHECK(replayed.completed_tasks == direct.completed_tasks);
  CHECK(replayed.task_time_mean == doctest::Approx(direct.task_time_mean).epsilon(1e-12));
  CHECK(replayed.service_time_mean ==
        doctest::Approx(direct.service_time_mean).epsilon(1e-12));
  CHECK(replayed.service_time_increase_mean ==
        doctest::Approx(direct.service_time_increase_mean).epsilon(1e-12));
  CHECK(replayed.service_time_std ==
        doctest::Approx(direct.service_time_std).epsilon(1e-12));
  CHECK(replayed.astar_calls == direct.astar_calls);
  CHECK(replayed.plan_events == direct.plan_events);
  for (size_t k = 0; k < replayed.tasks.size(); ++k) {
    CHECK(replayed.tasks[k].service_time_increase ==
          direct.tasks[k].service_time_increase);
  }
}
