#pragma once

#include <string>

#include "kmapf/cbs.hpp"
#include "kmapf/mapd.hpp"

namespace kmapf {

struct Scenario {
  SimConfig config;
  std::string output_dir = "out";
};

// Parses a scenario document; unknown keys are rejected with an error naming
// the key, missing keys take the documented defaults (steps=100, tau=0.5,
// horizon = planner default). Throws std::invalid_argument.
Scenario parse_scenario(const std::string& json_text);

// Canonical form: defaults materialized, keys sorted. parse/serialize is
// idempotent after one round.
std::string serialize_scenario(const Scenario& scenario);

struct SweepSpec {
  Scenario base;
  std::vector<std::string> mechanisms;
  std::vector<double> taus;
  std::vector<int> widths;
  std::vector<int> heights;
  std::vector<int> agent_counts;
  std::vector<int> steps;
  std::vector<double> task_rates;
  std::vector<int> horizons;
  std::vector<uint64_t> seeds;

  size_t combinations() const;  // cross-product size excluding seeds
  size_t rows() const;          // combinations x seeds
};

SweepSpec parse_sweep(const std::string& json_text);

// Cross product in canonical key order (mechanism, tau, grid, agents, steps,
// task_rate, horizon), seeds varying fastest within each combination.
std::vector<Scenario> expand_sweep(const SweepSpec& spec);

struct OneShotInstance {
  GridMap map{1, 1, 1};
  std::vector<Pose> starts;
  std::vector<Cell> goals;
  int horizon = 0;
};

OneShotInstance parse_instance(const std::string& json_text);

// tasks.csv with the fixed column order; unset timestamps as empty fields.
std::string tasks_csv(const std::vector<TaskRecord>& tasks);

// summary.json: metrics plus config echo and schema_version.
std::string summary_json(const Scenario& scenario, const MetricsSummary& metrics);

std::string trace_jsonl(const EpisodeTrace& trace);
EpisodeTrace parse_trace_jsonl(const std::string& text);

}  // namespace kmapf
