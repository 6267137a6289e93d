#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

namespace kmapf {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

enum class Orientation : uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline Orientation rotate_cw(Orientation o) {
  return static_cast<Orientation>((static_cast<int>(o) + 1) % 4);
}
inline Orientation rotate_ccw(Orientation o) {
  return static_cast<Orientation>((static_cast<int>(o) + 3) % 4);
}

// x grows east, y grows south; origin at the top-left of the bordered area.
inline Cell step_towards(Cell c, Orientation o) {
  switch (o) {
    case Orientation::North: return {c.x, c.y - 1};
    case Orientation::East: return {c.x + 1, c.y};
    case Orientation::South: return {c.x, c.y + 1};
    case Orientation::West: return {c.x - 1, c.y};
  }
  return c;
}

std::string_view orientation_name(Orientation o);
std::optional<Orientation> orientation_from_name(std::string_view name);

struct Pose {
  Cell cell;
  Orientation heading = Orientation::North;
  friend bool operator==(const Pose&, const Pose&) = default;
  friend auto operator<=>(const Pose&, const Pose&) = default;
};

// Every action consumes exactly one time step.
enum class Action : uint8_t { Wait = 0, Forward = 1, RotateCW = 2, RotateCCW = 3 };

std::string_view action_name(Action a);

// Square interior surrounded by a traversable border ring. All coordinates
// live in the bordered frame; interior cells start at (border, border).
class GridMap {
 public:
  GridMap(int interior_width, int interior_height, int border_width = 1,
          std::set<Cell> blocked = {});

  int interior_width() const { return interior_width_; }
  int interior_height() const { return interior_height_; }
  int border_width() const { return border_width_; }
  int total_width() const { return interior_width_ + 2 * border_width_; }
  int total_height() const { return interior_height_ + 2 * border_width_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < total_width() && c.y >= 0 && c.y < total_height();
  }
  bool traversable(Cell c) const { return in_bounds(c) && !blocked_.contains(c); }
  bool interior(Cell c) const {
    return c.x >= border_width_ && c.x < border_width_ + interior_width_ &&
           c.y >= border_width_ && c.y < border_width_ + interior_height_ &&
           !blocked_.contains(c);
  }

  std::vector<Cell> traversable_cells() const;  // row-major
  std::vector<Cell> interior_cells() const;     // row-major
  int traversable_count() const;

  const std::set<Cell>& blocked() const { return blocked_; }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int interior_width_;
  int interior_height_;
  int border_width_;
  std::set<Cell> blocked_;
};

// One-step successors of a pose, in the fixed order
// [Wait, Forward, RotateCW, RotateCCW] with illegal entries omitted.
// Forward is legal iff the cell ahead is traversable.
std::vector<std::pair<Action, Pose>> successors(const GridMap& map, const Pose& pose);

// Minimal number of time steps from `start` to any pose at `goal_cell`,
// ignoring all other agents. nullopt when unreachable.
std::optional<int> unconstrained_cost(const GridMap& map, const Pose& start, Cell goal_cell);

}  // namespace kmapf
