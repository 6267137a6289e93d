#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "kmapf/planner.hpp"
#include "kmapf/rng.hpp"

namespace kmapf {

enum class MechanismKind : uint8_t { TokenPassing, Egoistic, Altruistic, Karma };

// Placeholders for karma variants that are not implemented: only pay-to-peer
// transfers exist, balances are unbounded, and no redistribution runs.
enum class KarmaPaymentRule : uint8_t { PayToPeer };
enum class KarmaRedistribution : uint8_t { None };

struct Mechanism {
  MechanismKind kind = MechanismKind::Karma;
  double tau = 0.5;  // karma weight; >= 0, only meaningful for Karma
  KarmaPaymentRule payment_rule = KarmaPaymentRule::PayToPeer;
  KarmaRedistribution redistribution = KarmaRedistribution::None;
  std::optional<int> karma_floor;    // unsupported; must stay unset
  std::optional<int> karma_ceiling;  // unsupported; must stay unset
};

std::string_view mechanism_name(MechanismKind kind);
std::optional<MechanismKind> mechanism_from_name(std::string_view name);

// Replanned cost minus current cost for one agent avoiding one additional
// agent. Infeasible (no alternative within the horizon) sorts above every
// finite value.
class DeltaCost {
 public:
  static DeltaCost finite(int v) { return DeltaCost(true, v); }
  static DeltaCost infeasible() { return DeltaCost(false, 0); }
  DeltaCost() : DeltaCost(false, 0) {}

  bool is_finite() const { return finite_; }
  bool is_infeasible() const { return !finite_; }
  int value() const {
    if (!finite_) throw std::logic_error("DeltaCost: value() on infeasible");
    return value_;
  }

  friend bool operator==(const DeltaCost&, const DeltaCost&) = default;
  friend bool operator<(const DeltaCost& a, const DeltaCost& b) {
    if (a.finite_ && !b.finite_) return true;
    if (!a.finite_) return false;
    return a.value_ < b.value_;
  }
  friend bool operator>(const DeltaCost& a, const DeltaCost& b) { return b < a; }

 private:
  DeltaCost(bool finite, int value) : finite_(finite), value_(value) {}
  bool finite_;
  int value_;
};

struct NegotiationOutcome {
  int time = 0;
  AgentId initiator = -1;
  AgentId counterpart = -1;
  AgentId replanner = -1;
  DeltaCost delta_replanner;
  int karma_transfer = 0;      // = delta when the Karma mechanism transferred
  bool wait_fallback = false;  // the designated replanner had no feasible plan
  std::optional<Trajectory> new_trajectory;  // empty iff wait_fallback
  int karma_initiator_before = 0;
  int karma_initiator_after = 0;
  int karma_counterpart_before = 0;
  int karma_counterpart_after = 0;
};

// Decision rules. Each returns the agent that has to replan.
AgentId negotiate_egoistic(AgentId i, AgentId j, DeltaCost delta_i, DeltaCost delta_j);
// nullopt: both sides infeasible, unresolvable (caller applies wait fallback).
std::optional<AgentId> negotiate_altruistic(AgentId i, AgentId j, DeltaCost delta_i,
                                            DeltaCost delta_j, Rng& tie_rng);
std::optional<AgentId> negotiate_karma(AgentId i, AgentId j, DeltaCost delta_i,
                                       DeltaCost delta_j, int karma_i, int karma_j,
                                       double tau, Rng& tie_rng);

// The replanner gains its realized cost increase, the counterpart pays it.
std::pair<int, int> apply_karma_update(int karma_i, int karma_j, bool replanner_is_i,
                                       int delta_r);

// Conflict whose counterpart maximizes the initiator's deviation cost;
// ties broken by earliest conflict time, then smallest counterpart id.
const Conflict& select_priority_conflict(const std::vector<Conflict>& conflicts,
                                         const std::map<AgentId, DeltaCost>& deltas);

// Fleet view at one decision instant. Agents without a committed leg
// (idle, or waiting after a fallback) are parked: their singleton trajectory
// blocks their cell and they never take part in negotiations.
struct FleetAgent {
  AgentId id = -1;
  Pose pose;                 // pose at Fleet::now
  std::optional<Cell> goal;  // current leg target; nullopt when idle
  Trajectory traj;           // committed trajectory, or parked singleton
  bool committed = false;
  int karma = 0;
};

struct Fleet {
  const GridMap* map = nullptr;
  int now = 0;
  int horizon = 0;  // 0 -> default_horizon(map)
  std::vector<FleetAgent> agents;  // index == agent id
  AstarCallCounter* counter = nullptr;

  int effective_horizon() const { return horizon > 0 ? horizon : default_horizon(*map); }
};

inline void reset_karma(FleetAgent& agent) { agent.karma = 0; }

struct DeltaResult {
  DeltaCost delta;
  std::optional<Trajectory> candidate;
};

// Plans a replacement leg for `agent` that avoids `extra`'s current
// trajectory on top of the parked agents and the committed trajectories of
// `considered`; returns new cost minus current remaining cost.
DeltaResult delta_cost(const Fleet& fleet, AgentId agent, AgentId extra,
                       const std::set<AgentId>& considered = {});

struct ResolveResult {
  bool committed = false;  // false => wait fallback, retry next step
  std::vector<NegotiationOutcome> outcomes;
};

// Iterative bilateral conflict resolution for one agent: plan a candidate,
// pick the highest-priority conflict, negotiate who adapts, repeat until the
// candidate is conflict-free against every committed trajectory. Losing
// counterparts replan in place (their new legs avoid all committed
// trajectories plus the candidate). Karma transfers apply per negotiation.
ResolveResult resolve_agent(Fleet& fleet, AgentId id, const Mechanism& mechanism,
                            Rng& tie_rng);

struct TokenRound {
  std::vector<AgentId> planned;
  std::vector<AgentId> failed;  // wait fallback
};

// Sequential planning: each agent in `order` plans once, treating every other
// agent's current trajectory as fixed.
TokenRound token_passing_plan(Fleet& fleet, const std::vector<AgentId>& order);

}  // namespace kmapf
