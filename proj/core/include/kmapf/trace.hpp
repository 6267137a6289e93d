#pragma once

#include <string>
#include <vector>

#include "kmapf/negotiation.hpp"

namespace kmapf {

enum class Phase : uint8_t { Idle, ToPickup, ToDelivery };

std::string_view phase_name(Phase p);
std::optional<Phase> phase_from_name(std::string_view name);

// One tasks.csv row / per-task record. -1 encodes "unset".
struct TaskRecord {
  int task_id = -1;
  int spawn_t = -1;
  int assign_t = -1;
  int pickup_t = -1;
  int deliver_t = -1;
  AgentId agent_id = -1;
  int task_time = -1;
  int service_time = -1;
  int service_time_increase = -1;
  Cell pickup;
  Cell delivery;
};

struct MetricsSummary {
  int completed_tasks = 0;
  double task_time_mean = 0.0;
  double task_time_std = 0.0;
  double service_time_mean = 0.0;
  double service_time_std = 0.0;
  double service_time_increase_mean = 0.0;
  double service_time_increase_std = 0.0;
  long long astar_calls = 0;
  long long plan_events = 0;
  std::vector<TaskRecord> tasks;
};

struct AgentSnapshot {
  AgentId id = -1;
  Pose pose;
  Phase phase = Phase::Idle;
  int karma = 0;
  int task = -1;  // current task id, -1 when idle
};

struct StepRecord {
  long long order = 0;  // global emission order within the episode
  int t = 0;
  std::vector<AgentSnapshot> agents;
};

struct NegotiationRecord {
  long long order = 0;
  int t = 0;
  AgentId initiator = -1;
  AgentId counterpart = -1;
  AgentId replanner = -1;
  bool delta_finite = false;
  int delta = 0;
  int karma_transfer = 0;
  bool wait_fallback = false;
  int karma_initiator_before = 0;
  int karma_initiator_after = 0;
  int karma_counterpart_before = 0;
  int karma_counterpart_after = 0;
};

struct PickupRecord {
  long long order = 0;
  int t = 0;
  AgentId agent = -1;
  int task = -1;
  int karma_after = 0;
};

struct EpisodeTrace {
  int schema_version = 1;
  MechanismKind mechanism = MechanismKind::Karma;
  double tau = 0.5;
  uint64_t seed = 0;
  int interior_width = 0;
  int interior_height = 0;
  int border_width = 1;
  int agent_count = 0;
  int episode_length = 0;
  double task_rate = 0.0;
  int horizon = 0;

  std::vector<StepRecord> steps;  // steps[t].t == t, 0..episode_length
  std::vector<NegotiationRecord> negotiations;
  std::vector<PickupRecord> pickups;
  std::vector<TaskRecord> tasks;
  long long astar_calls = 0;
  long long plan_events = 0;
};

struct TraceIssue {
  int t = 0;
  std::string what;
};

// Post-hoc checker: executed-trace safety (no vertex or swap conflicts),
// task timestamp legality, and (under Karma) the full karma audit --
// transfer == realized delta, pairwise conservation, reset on pickup.
std::vector<TraceIssue> check_trace(const EpisodeTrace& trace);

// Rebuilds the episode metrics from the trace alone; service-time baselines
// are recomputed from the recorded pose at pickup time.
MetricsSummary replay_metrics(const GridMap& map, const EpisodeTrace& trace);

// Population stats over the completed tasks in `records`.
MetricsSummary summarize_tasks(const std::vector<TaskRecord>& records,
                               long long astar_calls, long long plan_events);

}  // namespace kmapf
