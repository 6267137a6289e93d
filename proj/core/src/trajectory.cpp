#include "kmapf/trajectory.hpp"

namespace kmapf {

bool kinematically_valid(const GridMap& map, const Trajectory& traj) {
  if (traj.poses.empty()) return false;
  for (const Pose& p : traj.poses)
    if (!map.traversable(p.cell)) return false;
  for (size_t k = 0; k + 1 < traj.poses.size(); ++k) {
    bool legal = false;
    for (const auto& [action, next] : successors(map, traj.poses[k]))
      if (next == traj.poses[k + 1]) {
        legal = true;
        break;
      }
    if (!legal) return false;
  }
  return true;
}

}  // namespace kmapf
