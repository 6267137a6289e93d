#include "kmapf/trace.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "kmapf/stats.hpp"

namespace kmapf {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Idle: return "idle";
    case Phase::ToPickup: return "to_pickup";
    case Phase::ToDelivery: return "to_delivery";
  }
  return "?";
}

std::optional<Phase> phase_from_name(std::string_view name) {
  if (name == "idle") return Phase::Idle;
  if (name == "to_pickup") return Phase::ToPickup;
  if (name == "to_delivery") return Phase::ToDelivery;
  return std::nullopt;
}

namespace {

std::string describe_cell(Cell c) {
  std::ostringstream os;
  os << "(" << c.x << "," << c.y << ")";
  return os.str();
}

}  // namespace

std::vector<TraceIssue> check_trace(const EpisodeTrace& trace) {
  std::vector<TraceIssue> issues;
  auto issue = [&](int t, std::string what) { issues.push_back({t, std::move(what)}); };

  if (trace.steps.empty()) {
    issue(0, "trace has no step records");
    return issues;
  }
  for (size_t k = 0; k < trace.steps.size(); ++k)
    if (trace.steps[k].t != static_cast<int>(k))
      issue(trace.steps[k].t, "step records out of order");

  // Executed-trace safety: vertex and swap conflicts between steps.
  for (size_t k = 0; k + 1 < trace.steps.size(); ++k) {
    const auto& cur = trace.steps[k].agents;
    const auto& nxt = trace.steps[k + 1].agents;
    if (cur.size() != nxt.size()) {
      issue(static_cast<int>(k), "agent count changed mid-episode");
      continue;
    }
    for (size_t a = 0; a < nxt.size(); ++a)
      for (size_t b = a + 1; b < nxt.size(); ++b) {
        if (nxt[a].pose.cell == nxt[b].pose.cell)
          issue(trace.steps[k + 1].t, "vertex conflict at " + describe_cell(nxt[a].pose.cell) +
                                          " between agents " + std::to_string(nxt[a].id) +
                                          " and " + std::to_string(nxt[b].id));
        bool swap = nxt[a].pose.cell == cur[b].pose.cell &&
                    nxt[b].pose.cell == cur[a].pose.cell &&
                    !(cur[a].pose.cell == nxt[a].pose.cell);
        if (swap)
          issue(trace.steps[k].t, "edge conflict between agents " + std::to_string(nxt[a].id) +
                                      " and " + std::to_string(nxt[b].id));
      }
  }

  // Task timestamp legality.
  for (const TaskRecord& task : trace.tasks) {
    auto ordered = [&](int a, int b) { return a < 0 || b < 0 || a <= b; };
    if (task.assign_t >= 0 && task.spawn_t < 0)
      issue(task.assign_t, "task assigned before spawning");
    if (!ordered(task.spawn_t, task.assign_t) || !ordered(task.assign_t, task.pickup_t) ||
        !ordered(task.pickup_t, task.deliver_t))
      issue(task.spawn_t, "task " + std::to_string(task.task_id) +
                              " timestamps out of order");
    if (task.pickup_t >= 0 && task.assign_t < 0)
      issue(task.pickup_t, "task picked up while unassigned");
    if (task.deliver_t >= 0 && task.pickup_t < 0)
      issue(task.deliver_t, "task delivered before pickup");
  }

  // Karma audit via event replay in emission order.
  const bool karma = trace.mechanism == MechanismKind::Karma;
  std::map<AgentId, int> balance;
  for (const AgentSnapshot& a : trace.steps.front().agents) balance[a.id] = 0;

  struct Event {
    long long order;
    int kind;  // 0 step, 1 negotiation, 2 pickup
    size_t index;
  };
  std::vector<Event> events;
  for (size_t k = 0; k < trace.steps.size(); ++k)
    events.push_back({trace.steps[k].order, 0, k});
  for (size_t k = 0; k < trace.negotiations.size(); ++k)
    events.push_back({trace.negotiations[k].order, 1, k});
  for (size_t k = 0; k < trace.pickups.size(); ++k)
    events.push_back({trace.pickups[k].order, 2, k});
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.order < b.order; });

  for (const Event& e : events) {
    if (e.kind == 1) {
      const NegotiationRecord& n = trace.negotiations[e.index];
      int sum_before = n.karma_initiator_before + n.karma_counterpart_before;
      int sum_after = n.karma_initiator_after + n.karma_counterpart_after;
      if (sum_before != sum_after)
        issue(n.t, "karma not conserved in negotiation between " +
                       std::to_string(n.initiator) + " and " + std::to_string(n.counterpart));
      if (karma && !n.wait_fallback && n.delta_finite && n.karma_transfer != n.delta)
        issue(n.t, "karma transfer differs from replanner delta");
      if ((!karma || n.wait_fallback) && n.karma_transfer != 0)
        issue(n.t, "unexpected karma transfer");
      if (balance.contains(n.initiator) && balance[n.initiator] != n.karma_initiator_before)
        issue(n.t, "initiator balance drifted from event history");
      if (balance.contains(n.counterpart) &&
          balance[n.counterpart] != n.karma_counterpart_before)
        issue(n.t, "counterpart balance drifted from event history");
      balance[n.initiator] = n.karma_initiator_after;
      balance[n.counterpart] = n.karma_counterpart_after;
    } else if (e.kind == 2) {
      const PickupRecord& p = trace.pickups[e.index];
      if (karma) {
        if (p.karma_after != 0) issue(p.t, "karma not reset to zero on pickup");
        balance[p.agent] = 0;
      }
    } else {
      const StepRecord& s = trace.steps[e.index];
      for (const AgentSnapshot& a : s.agents) {
        if (!balance.contains(a.id)) balance[a.id] = 0;
        if (a.karma != balance[a.id])
          issue(s.t, "agent " + std::to_string(a.id) +
                         " karma inconsistent with event history");
      }
    }
  }

  return issues;
}

MetricsSummary summarize_tasks(const std::vector<TaskRecord>& records,
                               long long astar_calls, long long plan_events) {
  MetricsSummary summary;
  summary.tasks = records;
  summary.astar_calls = astar_calls;
  summary.plan_events = plan_events;
  RunningStats task_time, service_time, increase;
  for (const TaskRecord& task : records) {
    if (task.deliver_t < 0) continue;
    ++summary.completed_tasks;
    task_time.add(task.task_time);
    service_time.add(task.service_time);
    increase.add(task.service_time_increase);
  }
  summary.task_time_mean = task_time.mean();
  summary.task_time_std = task_time.stddev();
  summary.service_time_mean = service_time.mean();
  summary.service_time_std = service_time.stddev();
  summary.service_time_increase_mean = increase.mean();
  summary.service_time_increase_std = increase.stddev();
  return summary;
}

MetricsSummary replay_metrics(const GridMap& map, const EpisodeTrace& trace) {
  std::vector<TaskRecord> records = trace.tasks;
  for (TaskRecord& task : records) {
    if (task.deliver_t < 0) continue;
    task.task_time = task.deliver_t - task.assign_t;
    task.service_time = task.deliver_t - task.pickup_t;
    // Baseline from first principles: the agent's recorded pose at pickup.
    if (task.pickup_t >= 0 && task.pickup_t < static_cast<int>(trace.steps.size())) {
      const StepRecord& step = trace.steps[static_cast<size_t>(task.pickup_t)];
      for (const AgentSnapshot& a : step.agents)
        if (a.id == task.agent_id) {
          auto base = unconstrained_cost(map, a.pose, task.delivery);
          if (base) task.service_time_increase = task.service_time - *base;
          break;
        }
    }
  }
  return summarize_tasks(records, trace.astar_calls, trace.plan_events);
}

}  // namespace kmapf
