#pragma once

#include <optional>

#include "kmapf/planner.hpp"

namespace kmapf {

// Constraints bind cells, not poses.
struct CbsConstraint {
  enum class Kind : uint8_t { Vertex, Edge };
  AgentId agent = -1;
  Kind kind = Kind::Vertex;
  Cell cell;  // vertex cell, or edge from-cell
  Cell to;    // edge to-cell
  int time = 0;

  friend bool operator==(const CbsConstraint&, const CbsConstraint&) = default;
};

struct CbsStats {
  int ct_expanded = 0;        // constraint-tree nodes popped
  long long lowlevel_calls = 0;
  bool cost_monotone = true;  // every child cost >= its parent's cost
};

struct CbsSolution {
  std::vector<Trajectory> paths;  // index-aligned with starts/goals
  int cost = 0;                   // sum of costs
  CbsStats stats;
};

// Optimal sum-of-costs solver; nullopt when no conflict-free joint solution
// exists within the horizon.
std::optional<CbsSolution> cbs_solve(const GridMap& map, const std::vector<Pose>& starts,
                                     const std::vector<Cell>& goals, int horizon);

inline constexpr int kBruteForceMaxAgents = 3;
inline constexpr int kBruteForceMaxCells = 36;

// Exhaustive uniform-cost search over the joint kinematic state space with
// vertex/edge conflict exclusion; exact optimal sum-of-costs. Tractability
// guard: throws std::invalid_argument beyond kBruteForceMax{Agents,Cells}.
std::optional<int> joint_brute_force(const GridMap& map, const std::vector<Pose>& starts,
                                     const std::vector<Cell>& goals, int horizon);

}  // namespace kmapf
