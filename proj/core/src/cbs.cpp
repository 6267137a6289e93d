#include "kmapf/cbs.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace kmapf {

namespace {

struct ConstraintView final : detail::SpaceTimeConstraints {
  std::set<std::pair<Cell, int>> vertices;
  std::set<std::tuple<Cell, Cell, int>> edges;
  int goal_latest = -1;  // latest vertex-constraint time on the goal cell

  bool vertex_blocked(Cell c, int t) const override { return vertices.contains({c, t}); }
  bool move_blocked(Cell from, Cell to, int t) const override {
    return edges.contains({from, to, t});
  }
  bool goal_parkable(Cell /*c*/, int t) const override { return t > goal_latest; }
};

std::optional<Trajectory> low_level(const GridMap& map, AgentId agent, Pose start,
                                    Cell goal, int horizon,
                                    const std::vector<CbsConstraint>& constraints,
                                    CbsStats& stats) {
  ConstraintView view;
  for (const CbsConstraint& c : constraints) {
    if (c.agent != agent) continue;
    if (c.kind == CbsConstraint::Kind::Vertex) {
      view.vertices.insert({c.cell, c.time});
      if (c.cell == goal) view.goal_latest = std::max(view.goal_latest, c.time);
    } else {
      view.edges.insert({c.cell, c.to, c.time});
    }
  }
  ++stats.lowlevel_calls;
  return detail::spacetime_astar(map, agent, start, 0, goal, horizon, view);
}

struct CtNode {
  std::vector<CbsConstraint> constraints;
  std::vector<Trajectory> paths;
  int cost = 0;
  long long seq = 0;
};

struct CtOrder {
  bool operator()(const CtNode& a, const CtNode& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.constraints.size() != b.constraints.size())
      return a.constraints.size() > b.constraints.size();
    return a.seq > b.seq;  // FIFO
  }
};

std::optional<Conflict> first_conflict(const std::vector<Trajectory>& paths) {
  std::optional<Conflict> best;
  for (size_t a = 0; a < paths.size(); ++a)
    for (size_t b = a + 1; b < paths.size(); ++b) {
      auto conflicts = detect_conflicts(paths[a], {paths[b]});
      if (conflicts.empty()) continue;
      const Conflict& c = conflicts.front();  // earliest for this pair
      if (!best || c.time < best->time ||
          (c.time == best->time &&
           std::tie(c.agent_a, c.agent_b) < std::tie(best->agent_a, best->agent_b)))
        best = c;
    }
  return best;
}

}  // namespace

std::optional<CbsSolution> cbs_solve(const GridMap& map, const std::vector<Pose>& starts,
                                     const std::vector<Cell>& goals, int horizon) {
  if (starts.size() != goals.size())
    throw std::invalid_argument("cbs_solve: starts/goals size mismatch");
  for (size_t a = 0; a < starts.size(); ++a)
    for (size_t b = a + 1; b < starts.size(); ++b)
      if (starts[a].cell == starts[b].cell)
        throw std::invalid_argument("cbs_solve: starts must be mutually distinct");

  const int n = static_cast<int>(starts.size());
  CbsStats stats;
  long long seq = 0;

  CtNode root;
  root.paths.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    auto path = low_level(map, a, starts[static_cast<size_t>(a)],
                          goals[static_cast<size_t>(a)], horizon, {}, stats);
    if (!path) return std::nullopt;
    root.paths[static_cast<size_t>(a)] = std::move(*path);
    root.cost += root.paths[static_cast<size_t>(a)].cost();
  }
  root.seq = seq++;

  std::priority_queue<CtNode, std::vector<CtNode>, CtOrder> open;
  open.push(std::move(root));

  while (!open.empty()) {
    CtNode node = open.top();
    open.pop();
    ++stats.ct_expanded;

    std::optional<Conflict> conflict = first_conflict(node.paths);
    if (!conflict) {
      CbsSolution solution{std::move(node.paths), node.cost, stats};
      return solution;
    }

    // Two children, one added constraint for either conflicting agent.
    for (int side = 0; side < 2; ++side) {
      AgentId agent = side == 0 ? conflict->agent_a : conflict->agent_b;
      CbsConstraint constraint;
      constraint.agent = agent;
      constraint.time = conflict->time;
      if (conflict->kind == Conflict::Kind::Vertex) {
        constraint.kind = CbsConstraint::Kind::Vertex;
        constraint.cell = conflict->cell;
      } else {
        constraint.kind = CbsConstraint::Kind::Edge;
        // conflict cells are from agent_a's perspective
        constraint.cell = side == 0 ? conflict->cell : conflict->to;
        constraint.to = side == 0 ? conflict->to : conflict->cell;
      }

      CtNode child;
      child.constraints = node.constraints;
      child.constraints.push_back(constraint);
      child.paths = node.paths;
      auto path = low_level(map, agent, starts[static_cast<size_t>(agent)],
                            goals[static_cast<size_t>(agent)], horizon,
                            child.constraints, stats);
      if (!path) continue;
      child.paths[static_cast<size_t>(agent)] = std::move(*path);
      child.cost = 0;
      for (const Trajectory& p : child.paths) child.cost += p.cost();
      if (child.cost < node.cost) stats.cost_monotone = false;
      child.seq = seq++;
      open.push(std::move(child));
    }
  }
  return std::nullopt;
}

namespace {

// Joint state packed into one word: one pose index per agent (11 bits each,
// enough for an 18x18 bordered map), the settled mask and the time step.
struct JointCodec {
  int w = 0;
  int n = 0;

  uint64_t pose_bits(Pose p) const {
    return static_cast<uint64_t>((p.cell.y * w + p.cell.x) * 4 +
                                 static_cast<int>(p.heading));
  }
  Pose decode_pose(uint64_t bits) const {
    int heading = static_cast<int>(bits % 4);
    int cell = static_cast<int>(bits / 4);
    return {{cell % w, cell / w}, static_cast<Orientation>(heading)};
  }
  uint64_t encode(const Pose* poses, uint32_t settled, int t) const {
    uint64_t key = 0;
    for (int a = 0; a < n; ++a) key |= pose_bits(poses[a]) << (11 * a);
    key |= static_cast<uint64_t>(settled) << 33;
    key |= static_cast<uint64_t>(t) << 36;
    return key;
  }
  void decode(uint64_t key, Pose* poses, uint32_t& settled, int& t) const {
    for (int a = 0; a < n; ++a) poses[a] = decode_pose((key >> (11 * a)) & 0x7ff);
    settled = static_cast<uint32_t>((key >> 33) & 0x7);
    t = static_cast<int>(key >> 36);
  }
};

}  // namespace

std::optional<int> joint_brute_force(const GridMap& map, const std::vector<Pose>& starts,
                                     const std::vector<Cell>& goals, int horizon) {
  const int n = static_cast<int>(starts.size());
  if (n > kBruteForceMaxAgents || map.traversable_count() > kBruteForceMaxCells)
    throw std::invalid_argument("joint_brute_force: tractability guard exceeded");
  if (starts.size() != goals.size())
    throw std::invalid_argument("joint_brute_force: starts/goals size mismatch");
  if (horizon < 1 || horizon > 4000)
    throw std::invalid_argument("joint_brute_force: horizon out of range");
  if (map.total_width() * map.total_height() > 512)
    throw std::invalid_argument("joint_brute_force: tractability guard exceeded");

  const JointCodec codec{map.total_width(), n};
  const uint32_t all_settled = (1u << n) - 1u;

  struct Entry {
    int g;
    long long seq;
    uint64_t key;
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.g != b.g) return a.g > b.g;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Order> open;
  std::unordered_map<uint64_t, int> best;
  best.reserve(1 << 16);
  long long seq = 0;

  auto push = [&](uint64_t key, int g) {
    auto found = best.find(key);
    if (found == best.end() || g < found->second) {
      best[key] = g;
      open.push({g, seq++, key});
    }
  };

  // Agents already standing on their goal may start settled.
  std::vector<int> at_goal;
  for (int a = 0; a < n; ++a)
    if (starts[static_cast<size_t>(a)].cell == goals[static_cast<size_t>(a)])
      at_goal.push_back(a);
  for (uint32_t pick = 0; pick < (1u << at_goal.size()); ++pick) {
    uint32_t settled = 0;
    for (size_t k = 0; k < at_goal.size(); ++k)
      if (pick & (1u << k)) settled |= 1u << at_goal[static_cast<size_t>(k)];
    push(codec.encode(starts.data(), settled, 0), 0);
  }

  Pose poses[kBruteForceMaxAgents];
  Pose next[kBruteForceMaxAgents];
  Pose options[kBruteForceMaxAgents][4];
  int option_count[kBruteForceMaxAgents];
  int pick[kBruteForceMaxAgents];

  while (!open.empty()) {
    Entry entry = open.top();
    open.pop();
    auto it = best.find(entry.key);
    if (it != best.end() && it->second < entry.g) continue;

    uint32_t settled = 0;
    int t = 0;
    codec.decode(entry.key, poses, settled, t);
    if (settled == all_settled) return entry.g;
    if (t >= horizon) continue;

    int step_cost = 0;
    for (int a = 0; a < n; ++a) {
      if (settled & (1u << a)) {
        options[a][0] = poses[a];
        option_count[a] = 1;
      } else {
        ++step_cost;
        option_count[a] = 0;
        for (const auto& [action, successor] : successors(map, poses[a]))
          options[a][option_count[a]++] = successor;
      }
      pick[a] = 0;
    }

    while (true) {
      for (int a = 0; a < n; ++a) next[a] = options[a][pick[a]];

      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        for (int b = a + 1; b < n && ok; ++b) {
          if (next[a].cell == next[b].cell)
            ok = false;  // vertex
          else if (next[a].cell == poses[b].cell && next[b].cell == poses[a].cell &&
                   !(next[a].cell == poses[a].cell))
            ok = false;  // swap
        }

      if (ok) {
        // Any unsettled agent landing on its goal may settle now.
        int arrivals[kBruteForceMaxAgents];
        int arrival_count = 0;
        for (int a = 0; a < n; ++a)
          if (!(settled & (1u << a)) && next[a].cell == goals[static_cast<size_t>(a)])
            arrivals[arrival_count++] = a;
        for (uint32_t subset = 0; subset < (1u << arrival_count); ++subset) {
          uint32_t child_settled = settled;
          for (int k = 0; k < arrival_count; ++k)
            if (subset & (1u << k)) child_settled |= 1u << arrivals[k];
          push(codec.encode(next, child_settled, t + 1), entry.g + step_cost);
        }
      }

      int a = 0;
      for (; a < n; ++a) {
        if (++pick[a] < option_count[a]) break;
        pick[a] = 0;
      }
      if (a == n) break;
    }
  }
  return std::nullopt;
}

}  // namespace kmapf
