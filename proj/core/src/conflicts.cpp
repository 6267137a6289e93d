#include "kmapf/conflicts.hpp"

#include <algorithm>
#include <stdexcept>

namespace kmapf {

std::vector<Conflict> detect_conflicts(const Trajectory& candidate,
                                       const std::vector<Trajectory>& others,
                                       int from_time) {
  std::vector<Conflict> out;
  for (const Trajectory& other : others) {
    if (other.agent_id == candidate.agent_id) continue;
    int lo = std::min(candidate.start_time, other.start_time);
    if (from_time != kNoTimeFilter) lo = std::max(lo, from_time);
    int hi = std::max(candidate.end_time(), other.end_time());
    for (int t = lo; t <= hi; ++t) {
      Cell ca = candidate.cell_at(t);
      Cell co = other.cell_at(t);
      if (ca == co)
        out.push_back({candidate.agent_id, other.agent_id, t, Conflict::Kind::Vertex, ca, {}});
      if (t < hi) {
        Cell ca1 = candidate.cell_at(t + 1);
        Cell co1 = other.cell_at(t + 1);
        if (ca != ca1 && ca == co1 && ca1 == co)
          out.push_back({candidate.agent_id, other.agent_id, t, Conflict::Kind::Edge, ca, ca1});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.agent_b != b.agent_b) return a.agent_b < b.agent_b;
    return a.kind < b.kind;
  });
  return out;
}

void ReservationTable::register_trajectory(const Trajectory& traj) {
  if (trajectories_.contains(traj.agent_id))
    throw std::logic_error("ReservationTable: agent already registered");
  if (traj.poses.empty())
    throw std::invalid_argument("ReservationTable: empty trajectory");
  for (int k = 0; k < static_cast<int>(traj.poses.size()); ++k)
    vertex_.insert({{traj.poses[k].cell, traj.start_time + k}, traj.agent_id});
  for (int k = 0; k + 1 < static_cast<int>(traj.poses.size()); ++k) {
    Cell a = traj.poses[k].cell;
    Cell b = traj.poses[k + 1].cell;
    if (!(a == b)) edge_.insert({{a, b, traj.start_time + k}, traj.agent_id});
  }
  terminal_.insert({traj.poses.back().cell, {traj.agent_id, traj.end_time()}});
  prestart_.insert({traj.poses.front().cell, {traj.agent_id, traj.start_time}});
  trajectories_.emplace(traj.agent_id, traj);
}

void ReservationTable::deregister(AgentId agent) {
  auto it = trajectories_.find(agent);
  if (it == trajectories_.end())
    throw std::logic_error("ReservationTable: agent not registered");
  const Trajectory& traj = it->second;
  auto erase_agent = [agent](auto& container, const auto& key) {
    auto [lo, hi] = container.equal_range(key);
    for (auto i = lo; i != hi; ++i)
      if (i->second == agent) {
        container.erase(i);
        return;
      }
  };
  for (int k = 0; k < static_cast<int>(traj.poses.size()); ++k)
    erase_agent(vertex_, std::tuple<Cell, int>{traj.poses[k].cell, traj.start_time + k});
  for (int k = 0; k + 1 < static_cast<int>(traj.poses.size()); ++k) {
    Cell a = traj.poses[k].cell;
    Cell b = traj.poses[k + 1].cell;
    if (!(a == b)) erase_agent(edge_, std::tuple<Cell, Cell, int>{a, b, traj.start_time + k});
  }
  auto erase_parked = [agent](auto& container, Cell key) {
    auto [lo, hi] = container.equal_range(key);
    for (auto i = lo; i != hi; ++i)
      if (i->second.first == agent) {
        container.erase(i);
        return;
      }
  };
  erase_parked(terminal_, traj.poses.back().cell);
  erase_parked(prestart_, traj.poses.front().cell);
  trajectories_.erase(it);
}

AgentId ReservationTable::occupant(Cell c, int t) const {
  if (auto it = vertex_.find({c, t}); it != vertex_.end()) return it->second;
  for (auto [lo, hi] = terminal_.equal_range(c); lo != hi; ++lo)
    if (lo->second.second <= t) return lo->second.first;
  for (auto [lo, hi] = prestart_.equal_range(c); lo != hi; ++lo)
    if (t < lo->second.second) return lo->second.first;
  return -1;
}

bool ReservationTable::move_swap_free(Cell from, Cell to, int t) const {
  return !edge_.contains({to, from, t});
}

bool ReservationTable::cell_free_from(Cell c, int t) const {
  if (terminal_.contains(c)) return false;
  for (auto [lo, hi] = prestart_.equal_range(c); lo != hi; ++lo)
    if (lo->second.second > t) return false;
  auto it = vertex_.lower_bound({c, t});
  return it == vertex_.end() || !(std::get<0>(it->first) == c);
}

}  // namespace kmapf
