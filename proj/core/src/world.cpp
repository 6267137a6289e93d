#include "kmapf/world.hpp"

#include <deque>
#include <stdexcept>

namespace kmapf {

std::string_view orientation_name(Orientation o) {
  switch (o) {
    case Orientation::North: return "N";
    case Orientation::East: return "E";
    case Orientation::South: return "S";
    case Orientation::West: return "W";
  }
  return "?";
}

std::optional<Orientation> orientation_from_name(std::string_view name) {
  if (name == "N" || name == "north") return Orientation::North;
  if (name == "E" || name == "east") return Orientation::East;
  if (name == "S" || name == "south") return Orientation::South;
  if (name == "W" || name == "west") return Orientation::West;
  return std::nullopt;
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Wait: return "wait";
    case Action::Forward: return "forward";
    case Action::RotateCW: return "cw";
    case Action::RotateCCW: return "ccw";
  }
  return "?";
}

GridMap::GridMap(int interior_width, int interior_height, int border_width,
                 std::set<Cell> blocked)
    : interior_width_(interior_width),
      interior_height_(interior_height),
      border_width_(border_width),
      blocked_(std::move(blocked)) {
  if (interior_width_ < 1 || interior_height_ < 1)
    throw std::invalid_argument("GridMap: interior dimensions must be positive");
  if (border_width_ < 0) throw std::invalid_argument("GridMap: negative border width");
  for (const Cell& c : blocked_)
    if (!in_bounds(c)) throw std::invalid_argument("GridMap: blocked cell out of bounds");
}

std::vector<Cell> GridMap::traversable_cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<size_t>(total_width()) * total_height());
  for (int y = 0; y < total_height(); ++y)
    for (int x = 0; x < total_width(); ++x)
      if (traversable({x, y})) out.push_back({x, y});
  return out;
}

std::vector<Cell> GridMap::interior_cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<size_t>(interior_width_) * interior_height_);
  for (int y = border_width_; y < border_width_ + interior_height_; ++y)
    for (int x = border_width_; x < border_width_ + interior_width_; ++x)
      if (interior({x, y})) out.push_back({x, y});
  return out;
}

int GridMap::traversable_count() const {
  return total_width() * total_height() - static_cast<int>(blocked_.size());
}

std::vector<std::pair<Action, Pose>> successors(const GridMap& map, const Pose& pose) {
  std::vector<std::pair<Action, Pose>> out;
  out.reserve(4);
  out.emplace_back(Action::Wait, pose);
  Cell ahead = step_towards(pose.cell, pose.heading);
  if (map.traversable(ahead)) out.emplace_back(Action::Forward, Pose{ahead, pose.heading});
  out.emplace_back(Action::RotateCW, Pose{pose.cell, rotate_cw(pose.heading)});
  out.emplace_back(Action::RotateCCW, Pose{pose.cell, rotate_ccw(pose.heading)});
  return out;
}

std::optional<int> unconstrained_cost(const GridMap& map, const Pose& start, Cell goal_cell) {
  if (!map.traversable(start.cell) || !map.traversable(goal_cell))
    throw std::invalid_argument("unconstrained_cost: pose or goal not traversable");
  if (start.cell == goal_cell) return 0;

  const int w = map.total_width();
  const int h = map.total_height();
  auto index = [w](const Pose& p) {
    return (p.cell.y * w + p.cell.x) * 4 + static_cast<int>(p.heading);
  };
  std::vector<int> dist(static_cast<size_t>(w) * h * 4, -1);
  std::deque<Pose> frontier;
  dist[index(start)] = 0;
  frontier.push_back(start);
  while (!frontier.empty()) {
    Pose cur = frontier.front();
    frontier.pop_front();
    int d = dist[index(cur)];
    for (const auto& [action, next] : successors(map, cur)) {
      if (action == Action::Wait) continue;  // waiting never helps without other agents
      int& slot = dist[index(next)];
      if (slot >= 0) continue;
      slot = d + 1;
      if (next.cell == goal_cell) return slot;
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

}  // namespace kmapf
