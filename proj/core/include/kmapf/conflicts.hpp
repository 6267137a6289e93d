#pragma once

#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "kmapf/trajectory.hpp"

namespace kmapf {

struct Conflict {
  enum class Kind : uint8_t { Vertex, Edge };

  AgentId agent_a = -1;  // the candidate's agent
  AgentId agent_b = -1;
  int time = 0;          // vertex: shared occupancy time; edge: start of the swap step
  Kind kind = Kind::Vertex;
  Cell cell;             // vertex cell, or agent_a's cell at `time` for edges
  Cell to;               // agent_a's cell at time+1 for edges; unused for vertices

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

inline constexpr int kNoTimeFilter = std::numeric_limits<int>::min();

// Every vertex and edge (swap) conflict between `candidate` and each of
// `others`, over the union of active time ranges, honoring pre-start and
// stay-at-target occupancy. Sorted by (time, other agent id, kind).
// Conflicts strictly before `from_time` are dropped (used by the simulator to
// ignore the already-executed past of replanned trajectories).
std::vector<Conflict> detect_conflicts(const Trajectory& candidate,
                                       const std::vector<Trajectory>& others,
                                       int from_time = kNoTimeFilter);

// Space-time occupancy index over a set of registered trajectories.
class ReservationTable {
 public:
  void register_trajectory(const Trajectory& traj);  // throws on duplicate agent
  void deregister(AgentId agent);                    // throws on unknown agent
  bool registered(AgentId agent) const { return trajectories_.contains(agent); }

  // Occupant of `c` at time `t`, or -1 when free. Covers pre-start and
  // stay-at-target occupancy.
  AgentId occupant(Cell c, int t) const;
  bool vertex_free(Cell c, int t) const { return occupant(c, t) < 0; }
  // True when no registered agent traverses to->from during (t, t+1),
  // i.e. the move from->to at time t is swap-free.
  bool move_swap_free(Cell from, Cell to, int t) const;
  // True when `c` is free of all registered occupancy at every time >= t.
  bool cell_free_from(Cell c, int t) const;

  friend bool operator==(const ReservationTable&, const ReservationTable&) = default;

 private:
  std::multimap<std::tuple<Cell, int>, AgentId> vertex_;      // (cell, t) in active range
  std::multimap<std::tuple<Cell, Cell, int>, AgentId> edge_;  // (from, to, t) forward moves
  std::multimap<Cell, std::pair<AgentId, int>> terminal_;     // cell -> (agent, from_time)
  std::multimap<Cell, std::pair<AgentId, int>> prestart_;     // cell -> (agent, until_time)
  std::map<AgentId, Trajectory> trajectories_;
};

}  // namespace kmapf
