#pragma once

#include <vector>

#include "kmapf/world.hpp"

namespace kmapf {

using AgentId = int;

// Timed pose sequence: poses[k] is the agent's pose at start_time + k.
// Outside the active range the agent still occupies a cell: its start cell
// before start_time and its final cell forever after (stay-at-target).
struct Trajectory {
  AgentId agent_id = -1;
  int start_time = 0;
  std::vector<Pose> poses;

  int cost() const { return static_cast<int>(poses.size()) - 1; }
  int end_time() const { return start_time + cost(); }

  const Pose& pose_at(int t) const {
    if (t <= start_time) return poses.front();
    int k = t - start_time;
    if (k >= static_cast<int>(poses.size())) return poses.back();
    return poses[static_cast<size_t>(k)];
  }
  Cell cell_at(int t) const { return pose_at(t).cell; }

  // Steps still ahead of time t (0 once the agent has arrived).
  int remaining_cost(int t) const {
    if (t >= end_time()) return 0;
    if (t <= start_time) return cost();
    return end_time() - t;
  }

  static Trajectory parked(AgentId id, Pose pose, int t) {
    return Trajectory{id, t, {pose}};
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Consecutive poses differ by exactly one legal action on `map`.
bool kinematically_valid(const GridMap& map, const Trajectory& traj);

}  // namespace kmapf
