#include "kmapf/planner.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace kmapf {

int default_horizon(const GridMap& map) {
  return 4 * (map.total_width() + map.total_height());
}

namespace detail {
namespace {

// Rotations from `heading` to the nearest direction that reduces the
// Manhattan distance to `goal`. Together with Manhattan distance this is an
// admissible and consistent lower bound for the unit-cost action set.
int heading_alignment(Pose p, Cell goal) {
  int dx = goal.x - p.cell.x;
  int dy = goal.y - p.cell.y;
  if (dx == 0 && dy == 0) return 0;
  auto rotations = [&](Orientation target) {
    int d = (static_cast<int>(target) - static_cast<int>(p.heading) + 4) % 4;
    return std::min(d, 4 - d);
  };
  int best = 2;
  if (dx > 0) best = std::min(best, rotations(Orientation::East));
  if (dx < 0) best = std::min(best, rotations(Orientation::West));
  if (dy > 0) best = std::min(best, rotations(Orientation::South));
  if (dy < 0) best = std::min(best, rotations(Orientation::North));
  return best;
}

struct Node {
  int f;
  int g;
  long long seq;  // creation order; encodes action order among equal (f, g)
  int index;      // arena slot
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;  // prefer deeper nodes
    return a.seq > b.seq;
  }
};

struct Arena {
  std::vector<Pose> pose;
  std::vector<int> parent;
  int add(Pose p, int par) {
    pose.push_back(p);
    parent.push_back(par);
    return static_cast<int>(pose.size()) - 1;
  }
};

}  // namespace

std::optional<Trajectory> spacetime_astar(const GridMap& map, AgentId agent, Pose start,
                                          int start_time, Cell goal_cell, int horizon,
                                          const SpaceTimeConstraints& constraints) {
  if (horizon < 1) throw std::invalid_argument("spacetime_astar: horizon must be >= 1");
  const int w = map.total_width();
  const int h = map.total_height();
  const int pose_states = w * h * 4;
  auto state_key = [&](Pose p, int depth) {
    return ((p.cell.y * w + p.cell.x) * 4 + static_cast<int>(p.heading)) +
           pose_states * depth;
  };
  std::vector<char> closed(static_cast<size_t>(pose_states) * (horizon + 1), 0);

  Arena arena;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long long seq = 0;

  auto heuristic = [&](Pose p) { return manhattan(p.cell, goal_cell) + heading_alignment(p, goal_cell); };

  int root = arena.add(start, -1);
  open.push({heuristic(start), 0, seq++, root});

  auto reconstruct = [&](int index, int depth) {
    std::vector<Pose> poses(static_cast<size_t>(depth) + 1);
    for (int i = index, k = depth; i >= 0; i = arena.parent[i], --k)
      poses[static_cast<size_t>(k)] = arena.pose[i];
    return Trajectory{agent, start_time, std::move(poses)};
  };

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    int depth = node.g;
    Pose pose = arena.pose[node.index];
    char& seen = closed[static_cast<size_t>(state_key(pose, depth))];
    if (seen) continue;
    seen = 1;

    if (pose.cell == goal_cell && constraints.goal_parkable(pose.cell, start_time + depth))
      return reconstruct(node.index, depth);

    if (depth == horizon) continue;
    int t = start_time + depth;
    for (const auto& [action, next] : successors(map, pose)) {
      if (constraints.vertex_blocked(next.cell, t + 1)) continue;
      if (!(next.cell == pose.cell) && constraints.move_blocked(pose.cell, next.cell, t))
        continue;
      if (closed[static_cast<size_t>(state_key(next, depth + 1))]) continue;
      int index = arena.add(next, node.index);
      open.push({depth + 1 + heuristic(next), depth + 1, seq++, index});
    }
  }
  return std::nullopt;
}

}  // namespace detail

namespace {

struct ReservationConstraints final : detail::SpaceTimeConstraints {
  const ReservationTable* table;
  bool vertex_blocked(Cell c, int t) const override { return !table->vertex_free(c, t); }
  bool move_blocked(Cell from, Cell to, int t) const override {
    return !table->move_swap_free(from, to, t);
  }
  bool goal_parkable(Cell c, int t) const override { return table->cell_free_from(c, t); }
};

}  // namespace

std::optional<Trajectory> plan(const GridMap& map, const SearchQuery& query,
                               AstarCallCounter& counter) {
  ++counter.count;
  if (!map.traversable(query.start.cell) || !map.traversable(query.goal_cell))
    throw std::invalid_argument("plan: start or goal not traversable");

  ReservationTable table;
  for (const Trajectory& traj : query.avoid) table.register_trajectory(traj);
  int horizon = query.horizon > 0 ? query.horizon : default_horizon(map);

  // Quick reject: the goal must be parkable at some reachable arrival time,
  // otherwise no search can succeed (e.g. someone else is parked there).
  if (!table.cell_free_from(query.goal_cell, query.start_time)) {
    bool ever_parkable = false;
    for (int t = query.start_time; t <= query.start_time + horizon && !ever_parkable; ++t)
      ever_parkable = table.cell_free_from(query.goal_cell, t);
    if (!ever_parkable) return std::nullopt;
  }

  ReservationConstraints constraints;
  constraints.table = &table;
  AgentId agent = -1;
  return detail::spacetime_astar(map, agent, query.start, query.start_time, query.goal_cell,
                                 horizon, constraints);
}

}  // namespace kmapf
