#pragma once

#include <optional>

#include "kmapf/conflicts.hpp"

namespace kmapf {

// Per-simulation A* invocation counter (the runtime metric).
struct AstarCallCounter {
  long long count = 0;
};

// Search depth bound in time steps from start_time.
int default_horizon(const GridMap& map);

struct SearchQuery {
  Pose start;
  int start_time = 0;
  Cell goal_cell;
  std::vector<Trajectory> avoid;
  int horizon = 0;  // 0 -> default_horizon(map)
};

// Minimum-cost conflict-free trajectory to any pose at goal_cell, or nullopt
// when none exists within the horizon. The goal cell must stay free of the
// avoid set's occupancy at every time after arrival (stay-at-target
// feasibility). Increments `counter` exactly once, NoPath included.
std::optional<Trajectory> plan(const GridMap& map, const SearchQuery& query,
                               AstarCallCounter& counter);

namespace detail {

// Blocking predicate view used by the A* core; implemented over a
// ReservationTable by plan() and over a constraint set by the CBS solver.
struct SpaceTimeConstraints {
  virtual ~SpaceTimeConstraints() = default;
  virtual bool vertex_blocked(Cell c, int t) const = 0;
  // Move from->to during (t, t+1).
  virtual bool move_blocked(Cell from, Cell to, int t) const = 0;
  // Whether an agent may arrive at `c` at time `t` and stay forever.
  virtual bool goal_parkable(Cell c, int t) const = 0;
};

std::optional<Trajectory> spacetime_astar(const GridMap& map, AgentId agent, Pose start,
                                          int start_time, Cell goal_cell, int horizon,
                                          const SpaceTimeConstraints& constraints);

}  // namespace detail
}  // namespace kmapf
