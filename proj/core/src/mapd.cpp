#include "kmapf/mapd.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace kmapf {

std::vector<Task> spawn_tasks(Rng& rng, double rate, int t, const GridMap& map,
                              int max_new, int first_id) {
  std::vector<Task> out;
  if (rate <= 0.0) return out;
  int count = std::min(rng.poisson(rate), max_new);
  std::vector<Cell> interior = map.interior_cells();
  if (interior.size() < 2 || count <= 0) return out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    Task task;
    task.id = first_id + k;
    task.spawn_t = t;
    task.pickup = interior[static_cast<size_t>(rng.uniform_int(static_cast<int>(interior.size())))];
    do {
      task.delivery =
          interior[static_cast<size_t>(rng.uniform_int(static_cast<int>(interior.size())))];
    } while (task.delivery == task.pickup);
    out.push_back(task);
  }
  return out;
}

std::vector<std::pair<AgentId, int>> match_tasks(
    const std::vector<Availability>& agents, const std::vector<Cell>& pickups,
    const std::function<int(Pose, Cell)>& distance) {
  std::vector<std::pair<AgentId, int>> matches;
  if (agents.empty() || pickups.empty()) return matches;
  std::vector<std::vector<double>> cost(agents.size(),
                                        std::vector<double>(pickups.size(), 0.0));
  for (size_t a = 0; a < agents.size(); ++a)
    for (size_t p = 0; p < pickups.size(); ++p)
      cost[a][p] = agents[a].delay + distance(agents[a].pose, pickups[p]);
  std::vector<int> rowsol = hungarian(cost);
  for (size_t a = 0; a < agents.size(); ++a)
    if (rowsol[a] >= 0) matches.emplace_back(agents[a].id, rowsol[a]);
  return matches;
}

Simulation::Simulation(const SimConfig& config)
    : config_(config),
      map_(config.interior_width, config.interior_height, config.border_width),
      place_rng_(config.seed, "placement"),
      spawn_rng_(config.seed, "spawning"),
      assign_rng_(config.seed, "assignment"),
      nego_rng_(config.seed, "negotiation") {
  if (config_.agent_count < 0) throw std::invalid_argument("SimConfig: negative agent count");
  if (config_.episode_length < 0)
    throw std::invalid_argument("SimConfig: negative episode length");
  if (config_.mechanism.tau < 0.0) throw std::invalid_argument("SimConfig: tau must be >= 0");

  fleet_.map = &map_;
  fleet_.now = 0;
  fleet_.horizon = config_.horizon;
  fleet_.counter = &counter_;

  // Initial poses: distinct uniform traversable cells, uniform headings.
  std::vector<Cell> cells = map_.traversable_cells();
  if (config_.agent_count > static_cast<int>(cells.size()))
    throw std::invalid_argument("SimConfig: more agents than traversable cells");
  if (!config_.fixed_starts.empty() &&
      static_cast<int>(config_.fixed_starts.size()) != config_.agent_count)
    throw std::invalid_argument("SimConfig: fixed_starts size mismatch");
  fleet_.agents.resize(static_cast<size_t>(config_.agent_count));
  extra_.resize(static_cast<size_t>(config_.agent_count));
  for (int id = 0; id < config_.agent_count; ++id) {
    Pose pose;
    if (!config_.fixed_starts.empty()) {
      pose = config_.fixed_starts[static_cast<size_t>(id)];
      if (!map_.traversable(pose.cell))
        throw std::invalid_argument("SimConfig: fixed start not traversable");
    } else {
      int pick = place_rng_.uniform_int(static_cast<int>(cells.size()));
      Cell cell = cells[static_cast<size_t>(pick)];
      cells.erase(cells.begin() + pick);
      pose = {cell, static_cast<Orientation>(place_rng_.uniform_int(4))};
    }
    FleetAgent& agent = fleet_.agents[static_cast<size_t>(id)];
    agent.id = id;
    agent.pose = pose;
    agent.traj = Trajectory::parked(id, pose, 0);
    agent.committed = false;
  }

  trace_.mechanism = config_.mechanism.kind;
  trace_.tau = config_.mechanism.tau;
  trace_.seed = config_.seed;
  trace_.interior_width = config_.interior_width;
  trace_.interior_height = config_.interior_height;
  trace_.border_width = config_.border_width;
  trace_.agent_count = config_.agent_count;
  trace_.episode_length = config_.episode_length;
  trace_.task_rate = config_.effective_task_rate();
  trace_.horizon = config_.horizon;

  record_step();
}

int Simulation::distance(Pose from, Cell to) {
  uint64_t key = static_cast<uint64_t>((from.cell.y * map_.total_width() + from.cell.x) * 4 +
                                       static_cast<int>(from.heading));
  auto it = dist_cache_.find(key);
  if (it == dist_cache_.end()) {
    // BFS over the kinematic graph to every cell, min over arrival headings.
    const int w = map_.total_width();
    const int h = map_.total_height();
    std::vector<int> pose_dist(static_cast<size_t>(w) * h * 4, -1);
    std::vector<int> cell_dist(static_cast<size_t>(w) * h, -1);
    auto pidx = [w](const Pose& p) {
      return (p.cell.y * w + p.cell.x) * 4 + static_cast<int>(p.heading);
    };
    std::deque<Pose> frontier;
    pose_dist[static_cast<size_t>(pidx(from))] = 0;
    cell_dist[static_cast<size_t>(from.cell.y * w + from.cell.x)] = 0;
    frontier.push_back(from);
    while (!frontier.empty()) {
      Pose cur = frontier.front();
      frontier.pop_front();
      int d = pose_dist[static_cast<size_t>(pidx(cur))];
      for (const auto& [action, next] : successors(map_, cur)) {
        if (action == Action::Wait) continue;
        int& slot = pose_dist[static_cast<size_t>(pidx(next))];
        if (slot >= 0) continue;
        slot = d + 1;
        int& cslot = cell_dist[static_cast<size_t>(next.cell.y * w + next.cell.x)];
        if (cslot < 0) cslot = d + 1;
        frontier.push_back(next);
      }
    }
    it = dist_cache_.emplace(key, std::move(cell_dist)).first;
  }
  int d = it->second[static_cast<size_t>(to.y * map_.total_width() + to.x)];
  if (d < 0) throw std::runtime_error("distance: unreachable cell");
  return d;
}

int Simulation::inject_task(Cell pickup, Cell delivery) {
  if (!map_.interior(pickup) || !map_.interior(delivery) || pickup == delivery)
    throw std::invalid_argument("inject_task: need distinct interior cells");
  Task task;
  task.id = static_cast<int>(tasks_.size());
  task.spawn_t = fleet_.now;
  task.pickup = pickup;
  task.delivery = delivery;
  unassigned_.push_back(task.id);
  tasks_.push_back(task);
  return task.id;
}

void Simulation::spawn_phase() {
  int cap = std::max(1, config_.queue_cap_factor * std::max(1, config_.agent_count));
  int room = cap - static_cast<int>(unassigned_.size());
  auto spawned = spawn_tasks(spawn_rng_, config_.effective_task_rate(), fleet_.now, map_,
                             std::max(0, room), static_cast<int>(tasks_.size()));
  for (Task& task : spawned) {
    unassigned_.push_back(task.id);
    tasks_.push_back(task);
  }
}

void Simulation::assign_phase() {
  if (unassigned_.empty()) return;
  std::vector<Availability> avail;
  for (const FleetAgent& agent : fleet_.agents) {
    const AgentExtra& ex = extra_[static_cast<size_t>(agent.id)];
    if (ex.next_task != -1) continue;  // one reservation at most
    if (ex.phase == Phase::Idle) {
      avail.push_back({agent.id, agent.pose, 0});
    } else if (agent.committed) {
      // busy: free at the end of the current committed leg
      avail.push_back({agent.id, agent.traj.poses.back(),
                       std::max(0, agent.traj.end_time() - fleet_.now)});
    } else {
      // waiting for a replan: optimistic estimate from the current pose
      avail.push_back({agent.id, agent.pose,
                       agent.goal ? distance(agent.pose, *agent.goal) : 0});
    }
  }
  if (avail.empty()) return;

  std::vector<Cell> pickups;
  pickups.reserve(unassigned_.size());
  for (int task_id : unassigned_) pickups.push_back(tasks_[static_cast<size_t>(task_id)].pickup);

  auto matches = match_tasks(avail, pickups,
                             [this](Pose p, Cell c) { return distance(p, c); });

  std::vector<int> taken;
  for (auto [agent_id, queue_pos] : matches) {
    int task_id = unassigned_[static_cast<size_t>(queue_pos)];
    Task& task = tasks_[static_cast<size_t>(task_id)];
    task.agent = agent_id;
    task.assign_t = fleet_.now;
    AgentExtra& ex = extra_[static_cast<size_t>(agent_id)];
    if (ex.phase == Phase::Idle) {
      ex.phase = Phase::ToPickup;
      ex.task = task_id;
      FleetAgent& agent = fleet_.agents[static_cast<size_t>(agent_id)];
      agent.goal = task.pickup;  // planned in plan_phase
    } else {
      ex.next_task = task_id;
    }
    taken.push_back(queue_pos);
  }
  std::sort(taken.begin(), taken.end(), std::greater<int>());
  for (int pos : taken) unassigned_.erase(unassigned_.begin() + pos);
}

void Simulation::plan_agent(AgentId id) {
  ++plan_events_;
  if (config_.mechanism.kind == MechanismKind::TokenPassing) {
    token_passing_plan(fleet_, {id});
    return;
  }
  ResolveResult result = resolve_agent(fleet_, id, config_.mechanism, nego_rng_);
  for (NegotiationOutcome& outcome : result.outcomes) {
    NegotiationRecord record;
    record.order = order_++;
    record.t = outcome.time;
    record.initiator = outcome.initiator;
    record.counterpart = outcome.counterpart;
    record.replanner = outcome.replanner;
    record.delta_finite = outcome.delta_replanner.is_finite();
    record.delta = record.delta_finite ? outcome.delta_replanner.value() : 0;
    record.karma_transfer = outcome.karma_transfer;
    record.wait_fallback = outcome.wait_fallback;
    record.karma_initiator_before = outcome.karma_initiator_before;
    record.karma_initiator_after = outcome.karma_initiator_after;
    record.karma_counterpart_before = outcome.karma_counterpart_before;
    record.karma_counterpart_after = outcome.karma_counterpart_after;
    trace_.negotiations.push_back(record);
  }
}

void Simulation::plan_phase() {
  std::vector<AgentId> needs;
  for (const FleetAgent& agent : fleet_.agents)
    if (agent.goal && !agent.committed) needs.push_back(agent.id);
  if (needs.empty()) return;
  if (config_.mechanism.kind == MechanismKind::TokenPassing && config_.shuffle_token_order) {
    for (size_t k = needs.size(); k > 1; --k)
      std::swap(needs[k - 1], needs[static_cast<size_t>(assign_rng_.uniform_int(static_cast<int>(k)))]);
  }
  for (AgentId id : needs) plan_agent(id);
}

void Simulation::execute_phase() {
  const int next_t = fleet_.now + 1;
  std::vector<Pose> next(fleet_.agents.size());
  for (const FleetAgent& agent : fleet_.agents)
    next[static_cast<size_t>(agent.id)] = agent.traj.pose_at(next_t);

  for (size_t a = 0; a < next.size(); ++a)
    for (size_t b = a + 1; b < next.size(); ++b) {
      if (next[a].cell == next[b].cell)
        throw std::runtime_error(
            "executed vertex conflict: simulation invariant breach (agents " +
            std::to_string(a) + "," + std::to_string(b) + " cell (" +
            std::to_string(next[a].cell.x) + "," + std::to_string(next[a].cell.y) +
            ") t=" + std::to_string(next_t) + ")");
      bool swap = next[a].cell == fleet_.agents[b].pose.cell &&
                  next[b].cell == fleet_.agents[a].pose.cell &&
                  !(next[a].cell == fleet_.agents[a].pose.cell);
      if (swap)
        throw std::runtime_error(
            "executed edge conflict: simulation invariant breach (agents " +
            std::to_string(a) + "," + std::to_string(b) + " t=" + std::to_string(next_t) +
            ")");
    }

  for (FleetAgent& agent : fleet_.agents) agent.pose = next[static_cast<size_t>(agent.id)];
  fleet_.now = next_t;
}

void Simulation::start_leg(AgentId id, Cell goal) {
  FleetAgent& agent = fleet_.agents[static_cast<size_t>(id)];
  agent.goal = goal;
  agent.committed = false;
  agent.traj = Trajectory::parked(id, agent.pose, fleet_.now);
  plan_agent(id);
}

void Simulation::arrivals_phase() {
  for (FleetAgent& agent : fleet_.agents) {
    AgentExtra& ex = extra_[static_cast<size_t>(agent.id)];
    if (ex.phase == Phase::Idle) continue;
    if (!agent.committed) continue;               // waiting for a replan
    if (agent.traj.end_time() > fleet_.now) continue;  // still en route

    Task& task = tasks_[static_cast<size_t>(ex.task)];
    if (ex.phase == Phase::ToPickup) {
      task.pickup_t = fleet_.now;
      task.unconstrained_service = distance(agent.pose, task.delivery);
      if (config_.mechanism.kind == MechanismKind::Karma) reset_karma(agent);
      trace_.pickups.push_back(
          {order_++, fleet_.now, agent.id, task.id, agent.karma});
      ex.phase = Phase::ToDelivery;
      start_leg(agent.id, task.delivery);
    } else {  // ToDelivery
      task.deliver_t = fleet_.now;
      ex.phase = Phase::Idle;
      ex.task = -1;
      agent.goal = std::nullopt;
      agent.committed = false;
      agent.traj = Trajectory::parked(agent.id, agent.pose, fleet_.now);
      if (ex.next_task != -1) {
        int next_task = ex.next_task;
        ex.next_task = -1;
        ex.task = next_task;
        ex.phase = Phase::ToPickup;
        start_leg(agent.id, tasks_[static_cast<size_t>(next_task)].pickup);
      }
    }
  }
}

void Simulation::record_step() {
  StepRecord record;
  record.order = order_++;
  record.t = fleet_.now;
  record.agents.reserve(fleet_.agents.size());
  for (const FleetAgent& agent : fleet_.agents) {
    const AgentExtra& ex = extra_[static_cast<size_t>(agent.id)];
    int task_id = ex.task >= 0 ? tasks_[static_cast<size_t>(ex.task)].id : -1;
    record.agents.push_back({agent.id, agent.pose, ex.phase, agent.karma, task_id});
  }
  trace_.steps.push_back(std::move(record));
}

void Simulation::verify_fleet(const char* where) const {
  if (!config_.paranoid_checks) return;
  for (size_t a = 0; a < fleet_.agents.size(); ++a)
    for (size_t b = a + 1; b < fleet_.agents.size(); ++b) {
      auto conflicts = detect_conflicts(fleet_.agents[a].traj, {fleet_.agents[b].traj},
                                        fleet_.now);
      if (conflicts.empty()) continue;
      const Conflict& c = conflicts.front();
      throw std::runtime_error(
          std::string("fleet invariant broken after ") + where + ": agents " +
          std::to_string(a) + (fleet_.agents[a].committed ? "(c)" : "(p)") + "," +
          std::to_string(b) + (fleet_.agents[b].committed ? "(c)" : "(p)") + " " +
          (c.kind == Conflict::Kind::Vertex ? "vertex" : "edge") + " at (" +
          std::to_string(c.cell.x) + "," + std::to_string(c.cell.y) +
          ") t=" + std::to_string(c.time) + " now=" + std::to_string(fleet_.now));
    }
}

void Simulation::step() {
  spawn_phase();
  assign_phase();
  plan_phase();
  verify_fleet("plan");
  execute_phase();
  arrivals_phase();
  verify_fleet("arrivals");
  record_step();
}

MetricsSummary Simulation::metrics() const {
  std::vector<TaskRecord> records;
  records.reserve(tasks_.size());
  for (const Task& task : tasks_) {
    TaskRecord r;
    r.task_id = task.id;
    r.spawn_t = task.spawn_t;
    r.assign_t = task.assign_t;
    r.pickup_t = task.pickup_t;
    r.deliver_t = task.deliver_t;
    r.agent_id = task.agent;
    r.pickup = task.pickup;
    r.delivery = task.delivery;
    if (task.deliver_t >= 0) {
      r.task_time = task.deliver_t - task.assign_t;
      r.service_time = task.deliver_t - task.pickup_t;
      r.service_time_increase = r.service_time - task.unconstrained_service;
    }
    records.push_back(r);
  }
  return summarize_tasks(records, counter_.count, plan_events_);
}

MetricsSummary Simulation::run() {
  for (int k = 0; k < config_.episode_length; ++k) step();
  MetricsSummary summary = metrics();
  trace_.tasks = summary.tasks;
  trace_.astar_calls = summary.astar_calls;
  trace_.plan_events = summary.plan_events;
  return summary;
}

}  // namespace kmapf
