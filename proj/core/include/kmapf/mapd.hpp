#pragma once

#include <functional>
#include <unordered_map>

#include "kmapf/assignment.hpp"
#include "kmapf/trace.hpp"

namespace kmapf {

struct Task {
  int id = -1;
  Cell pickup;
  Cell delivery;
  int spawn_t = -1;
  int assign_t = -1;
  int pickup_t = -1;
  int deliver_t = -1;
  AgentId agent = -1;
  int unconstrained_service = -1;  // baseline fixed at pickup time
};

struct SimConfig {
  int interior_width = 10;
  int interior_height = 10;
  int border_width = 1;
  int agent_count = 8;
  Mechanism mechanism{MechanismKind::Karma, 0.5};
  int episode_length = 100;
  double task_rate = -1.0;  // < 0 -> 0.5 per agent per step
  uint64_t seed = 1;
  int horizon = 0;  // 0 -> planner default
  bool shuffle_token_order = false;
  int queue_cap_factor = 2;  // unassigned queue bound, x agent_count
  std::vector<Pose> fixed_starts;  // overrides random placement when non-empty
  bool paranoid_checks = false;    // verify fleet-wide conflict-freeness per phase

  double effective_task_rate() const {
    return task_rate < 0.0 ? 0.5 * agent_count : task_rate;
  }
};

// Poisson-many tasks (mean = rate) with distinct interior pickup/delivery
// cells, capped at max_new; ids start at first_id.
std::vector<Task> spawn_tasks(Rng& rng, double rate, int t, const GridMap& map,
                              int max_new, int first_id);

struct Availability {
  AgentId id = -1;
  Pose pose;       // where the agent will be when free
  int delay = 0;   // steps until then
};

// cost(agent, task) = availability delay + unconstrained distance from the
// availability pose to the pickup. Returns (agent, queue index) pairs.
std::vector<std::pair<AgentId, int>> match_tasks(
    const std::vector<Availability>& agents, const std::vector<Cell>& pickups,
    const std::function<int(Pose, Cell)>& distance);

// Lifelong synchronous MAPD episode. Deterministic given the config: one
// seeded stream per concern (placement, spawning, negotiation ties, token
// order) so the mechanism choice does not perturb task generation.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  void step();
  MetricsSummary run();  // episode_length steps + final metrics
  MetricsSummary metrics() const;

  // Queues a task at the current step (bypasses the spawn process).
  int inject_task(Cell pickup, Cell delivery);

  int now() const { return fleet_.now; }
  const GridMap& grid() const { return map_; }
  const Fleet& fleet() const { return fleet_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const EpisodeTrace& trace() const { return trace_; }
  long long astar_calls() const { return counter_.count; }
  long long plan_events() const { return plan_events_; }

 private:
  struct AgentExtra {
    Phase phase = Phase::Idle;
    int task = -1;       // current task index
    int next_task = -1;  // reservation picked up after the current delivery
  };

  void spawn_phase();
  void assign_phase();
  void plan_phase();
  void execute_phase();
  void arrivals_phase();
  void verify_fleet(const char* where) const;
  void start_leg(AgentId id, Cell goal);  // retarget + plan (one plan event)
  void plan_agent(AgentId id);
  void record_step();
  int distance(Pose from, Cell to);

  SimConfig config_;
  GridMap map_;
  Fleet fleet_;
  std::vector<AgentExtra> extra_;
  std::vector<Task> tasks_;
  std::vector<int> unassigned_;  // task indices in spawn order
  AstarCallCounter counter_;
  long long plan_events_ = 0;
  long long order_ = 0;
  Rng place_rng_;
  Rng spawn_rng_;
  Rng assign_rng_;
  Rng nego_rng_;
  std::unordered_map<uint64_t, std::vector<int>> dist_cache_;
  EpisodeTrace trace_;
};

}  // namespace kmapf
