#pragma once

// Seeded random instance generators shared by property and acceptance tests.

#include <vector>

#include "kmapf/rng.hpp"
#include "kmapf/trajectory.hpp"

namespace kmapf::testing {

inline Pose random_pose(Rng& rng, const GridMap& map) {
  std::vector<Cell> cells = map.traversable_cells();
  Cell cell = cells[static_cast<size_t>(rng.uniform_int(static_cast<int>(cells.size())))];
  return {cell, static_cast<Orientation>(rng.uniform_int(4))};
}

// Random-walk trajectory of `steps` actions starting at a random pose.
inline Trajectory random_trajectory(Rng& rng, const GridMap& map, AgentId id, int start_time,
                                    int steps) {
  Trajectory traj{id, start_time, {random_pose(rng, map)}};
  for (int k = 0; k < steps; ++k) {
    auto options = successors(map, traj.poses.back());
    traj.poses.push_back(
        options[static_cast<size_t>(rng.uniform_int(static_cast<int>(options.size())))].second);
  }
  return traj;
}

struct RandomInstance {
  std::vector<Pose> starts;
  std::vector<Cell> goals;
};

// Distinct start cells and distinct goal cells.
inline RandomInstance random_instance(Rng& rng, const GridMap& map, int agents) {
  RandomInstance instance;
  std::vector<Cell> for_starts = map.traversable_cells();
  std::vector<Cell> for_goals = map.traversable_cells();
  for (int a = 0; a < agents; ++a) {
    int s = rng.uniform_int(static_cast<int>(for_starts.size()));
    int g = rng.uniform_int(static_cast<int>(for_goals.size()));
    instance.starts.push_back(
        {for_starts[static_cast<size_t>(s)], static_cast<Orientation>(rng.uniform_int(4))});
    instance.goals.push_back(for_goals[static_cast<size_t>(g)]);
    for_starts.erase(for_starts.begin() + s);
    for_goals.erase(for_goals.begin() + g);
  }
  return instance;
}

}  // namespace kmapf::testing
