#include "kmapf/negotiation.hpp"

#include <algorithm>

namespace kmapf {

std::string_view mechanism_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::TokenPassing: return "token";
    case MechanismKind::Egoistic: return "egoistic";
    case MechanismKind::Altruistic: return "altruistic";
    case MechanismKind::Karma: return "karma";
  }
  return "?";
}

std::optional<MechanismKind> mechanism_from_name(std::string_view name) {
  if (name == "token") return MechanismKind::TokenPassing;
  if (name == "egoistic") return MechanismKind::Egoistic;
  if (name == "altruistic") return MechanismKind::Altruistic;
  if (name == "karma") return MechanismKind::Karma;
  return std::nullopt;
}

AgentId negotiate_egoistic(AgentId i, AgentId j, DeltaCost /*delta_i*/, DeltaCost delta_j) {
  return (delta_j.is_finite() && delta_j.value() <= 0) ? j : i;
}

std::optional<AgentId> negotiate_altruistic(AgentId i, AgentId j, DeltaCost delta_i,
                                            DeltaCost delta_j, Rng& tie_rng) {
  if (delta_i.is_infeasible() && delta_j.is_infeasible()) return std::nullopt;
  if (delta_j < delta_i) return j;
  if (delta_j > delta_i) return i;
  return tie_rng.coin() ? i : j;
}

std::optional<AgentId> negotiate_karma(AgentId i, AgentId j, DeltaCost delta_i,
                                       DeltaCost delta_j, int karma_i, int karma_j,
                                       double tau, Rng& tie_rng) {
  if (delta_i.is_infeasible() && delta_j.is_infeasible()) return std::nullopt;
  if (delta_i.is_infeasible()) return j;
  if (delta_j.is_infeasible()) return i;
  double composite_i = delta_i.value() + tau * karma_i;
  double composite_j = delta_j.value() + tau * karma_j;
  if (composite_j < composite_i) return j;
  if (composite_j > composite_i) return i;
  return tie_rng.coin() ? i : j;
}

std::pair<int, int> apply_karma_update(int karma_i, int karma_j, bool replanner_is_i,
                                       int delta_r) {
  if (replanner_is_i) return {karma_i + delta_r, karma_j - delta_r};
  return {karma_i - delta_r, karma_j + delta_r};
}

const Conflict& select_priority_conflict(const std::vector<Conflict>& conflicts,
                                         const std::map<AgentId, DeltaCost>& deltas) {
  if (conflicts.empty())
    throw std::logic_error("select_priority_conflict: empty conflict list");
  const Conflict* best = nullptr;
  for (const Conflict& c : conflicts) {
    auto it = deltas.find(c.agent_b);
    if (it == deltas.end())
      throw std::logic_error("select_priority_conflict: missing delta for counterpart");
    if (!best) {
      best = &c;
      continue;
    }
    const DeltaCost& candidate = it->second;
    const DeltaCost& incumbent = deltas.at(best->agent_b);
    if (incumbent < candidate) {
      best = &c;
    } else if (!(candidate < incumbent)) {  // equal deltas
      if (c.time < best->time || (c.time == best->time && c.agent_b < best->agent_b))
        best = &c;
    }
  }
  return *best;
}

namespace {

// Current trajectories of every agent except those listed, parked and
// committed alike.
std::vector<Trajectory> trajectories_except(const Fleet& fleet,
                                            std::initializer_list<AgentId> skip,
                                            bool parked_only) {
  std::vector<Trajectory> out;
  for (const FleetAgent& a : fleet.agents) {
    if (std::find(skip.begin(), skip.end(), a.id) != skip.end()) continue;
    if (parked_only && a.committed) continue;
    out.push_back(a.traj);
  }
  return out;
}

std::optional<Trajectory> plan_leg(const Fleet& fleet, AgentId agent, Pose pose, Cell goal,
                                   std::vector<Trajectory> avoid) {
  SearchQuery query{pose, fleet.now, goal, std::move(avoid), fleet.effective_horizon()};
  auto traj = plan(*fleet.map, query, *fleet.counter);
  if (traj) traj->agent_id = agent;
  return traj;
}

DeltaResult delta_from(std::optional<Trajectory> replanned, int current_cost) {
  if (!replanned) return {DeltaCost::infeasible(), std::nullopt};
  DeltaCost delta = DeltaCost::finite(replanned->cost() - current_cost);
  return {delta, std::move(replanned)};
}

// Replacement leg for the committed counterpart `j`: avoids every current
// trajectory of the others plus the initiator's candidate (widened scope, so
// the committed set stays mutually conflict-free).
DeltaResult counterpart_delta(const Fleet& fleet, AgentId j, AgentId initiator,
                              const Trajectory& candidate) {
  const FleetAgent& agent = fleet.agents[static_cast<size_t>(j)];
  std::vector<Trajectory> avoid = trajectories_except(fleet, {j, initiator}, false);
  avoid.push_back(candidate);
  Pose pose = agent.traj.pose_at(fleet.now);
  int current_cost = agent.traj.remaining_cost(fleet.now);
  auto replanned = plan_leg(fleet, j, pose, *agent.goal, std::move(avoid));
  return delta_from(std::move(replanned), current_cost);
}

}  // namespace

DeltaResult delta_cost(const Fleet& fleet, AgentId agent, AgentId extra,
                       const std::set<AgentId>& considered) {
  const FleetAgent& me = fleet.agents[static_cast<size_t>(agent)];
  if (!me.goal) throw std::logic_error("delta_cost: agent has no goal");
  // Parked agents are always avoided; add committed trajectories on top.
  std::vector<Trajectory> avoid = trajectories_except(fleet, {agent}, true);
  for (AgentId c : considered) {
    const FleetAgent& a = fleet.agents[static_cast<size_t>(c)];
    if (c != agent && c != extra && a.committed) avoid.push_back(a.traj);
  }
  if (const FleetAgent& e = fleet.agents[static_cast<size_t>(extra)]; e.committed)
    avoid.push_back(e.traj);
  Pose pose = me.traj.pose_at(fleet.now);
  int current_cost = me.traj.remaining_cost(fleet.now);
  auto replanned = plan_leg(fleet, agent, pose, *me.goal, std::move(avoid));
  return delta_from(std::move(replanned), current_cost);
}

ResolveResult resolve_agent(Fleet& fleet, AgentId id, const Mechanism& mechanism,
                            Rng& tie_rng) {
  if (mechanism.kind == MechanismKind::TokenPassing)
    throw std::logic_error("resolve_agent: token passing uses token_passing_plan");
  if (mechanism.karma_floor || mechanism.karma_ceiling)
    throw std::invalid_argument("karma balance caps are not implemented");
  FleetAgent& me = fleet.agents[static_cast<size_t>(id)];
  if (!me.goal) throw std::logic_error("resolve_agent: agent has no goal");

  const int now = fleet.now;
  ResolveResult result;

  // Entry snapshot: a resolution that ends in a wait fallback must leave the
  // fleet exactly as it found it. Counterpart replans made mid-loop assume
  // the candidate executes; once the initiator parks instead, they would
  // cross its cell, so they are rolled back together with any karma moved.
  struct Saved {
    Trajectory traj;
    bool committed;
    int karma;
  };
  std::vector<Saved> snapshot;
  snapshot.reserve(fleet.agents.size());
  for (const FleetAgent& a : fleet.agents) snapshot.push_back({a.traj, a.committed, a.karma});

  auto park = [&]() {
    for (size_t k = 0; k < fleet.agents.size(); ++k) {
      FleetAgent& a = fleet.agents[k];
      a.traj = snapshot[k].traj;
      a.committed = snapshot[k].committed;
      a.karma = snapshot[k].karma;
    }
    me.traj = Trajectory::parked(id, me.traj.pose_at(now), now);
    me.pose = me.traj.poses.front();
    me.committed = false;
  };

  std::set<AgentId> considered;
  auto plan_candidate = [&]() {
    std::vector<Trajectory> avoid = trajectories_except(fleet, {id}, true);
    for (AgentId c : considered) avoid.push_back(fleet.agents[static_cast<size_t>(c)].traj);
    return plan_leg(fleet, id, me.traj.pose_at(now), *me.goal, std::move(avoid));
  };

  std::optional<Trajectory> candidate = plan_candidate();
  if (!candidate) {
    park();
    return result;
  }

  const int iteration_cap = 10 * static_cast<int>(fleet.agents.size());
  for (int iteration = 0;; ++iteration) {
    std::vector<Trajectory> committed_trajs;
    for (const FleetAgent& a : fleet.agents)
      if (a.id != id && a.committed) committed_trajs.push_back(a.traj);
    std::vector<Conflict> conflicts = detect_conflicts(*candidate, committed_trajs, now);
    if (conflicts.empty()) {
      me.traj = *candidate;
      me.committed = true;
      result.committed = true;
      return result;
    }
    if (iteration >= iteration_cap) {
      park();
      result.outcomes.clear();  // aborted: nothing negotiated here executes
      return result;
    }

    // Deviation cost per conflicting counterpart; one planner call each, the
    // chosen pair reuses these results.
    std::map<AgentId, DeltaResult> mine;
    std::map<AgentId, DeltaCost> mine_delta;
    for (const Conflict& c : conflicts)
      if (!mine.contains(c.agent_b)) {
        // The candidate already avoids the considered set, so include only
        // the counterpart on top of it.
        std::vector<Trajectory> avoid = trajectories_except(fleet, {id}, true);
        for (AgentId cid : considered)
          avoid.push_back(fleet.agents[static_cast<size_t>(cid)].traj);
        avoid.push_back(fleet.agents[static_cast<size_t>(c.agent_b)].traj);
        auto replanned = plan_leg(fleet, id, me.traj.pose_at(now), *me.goal, std::move(avoid));
        DeltaResult dr = delta_from(std::move(replanned), candidate->cost());
        mine_delta.emplace(c.agent_b, dr.delta);
        mine.emplace(c.agent_b, std::move(dr));
      }

    const Conflict& priority = select_priority_conflict(conflicts, mine_delta);
    AgentId j = priority.agent_b;
    FleetAgent& other = fleet.agents[static_cast<size_t>(j)];
    DeltaResult delta_i = mine.at(j);
    DeltaResult delta_j = counterpart_delta(fleet, j, id, *candidate);

    std::optional<AgentId> replanner;
    switch (mechanism.kind) {
      case MechanismKind::Egoistic:
        replanner = negotiate_egoistic(id, j, delta_i.delta, delta_j.delta);
        break;
      case MechanismKind::Altruistic:
        replanner = negotiate_altruistic(id, j, delta_i.delta, delta_j.delta, tie_rng);
        break;
      case MechanismKind::Karma:
        replanner = negotiate_karma(id, j, delta_i.delta, delta_j.delta, me.karma,
                                    other.karma, mechanism.tau, tie_rng);
        break;
      case MechanismKind::TokenPassing:
        break;
    }

    NegotiationOutcome outcome;
    outcome.time = now;
    outcome.initiator = id;
    outcome.counterpart = j;
    outcome.karma_initiator_before = me.karma;
    outcome.karma_counterpart_before = other.karma;

    auto abort_with = [&](DeltaCost delta) {
      park();  // restores trajectories and balances, then parks the initiator
      outcome.replanner = id;
      outcome.delta_replanner = delta;
      outcome.wait_fallback = true;
      outcome.karma_initiator_before = me.karma;
      outcome.karma_initiator_after = me.karma;
      outcome.karma_counterpart_before = other.karma;
      outcome.karma_counterpart_after = other.karma;
      result.outcomes.clear();
      result.outcomes.push_back(outcome);
      return result;
    };

    if (!replanner)  // both infeasible: the initiator waits one step
      return abort_with(delta_i.delta);

    outcome.replanner = *replanner;
    DeltaResult& chosen = (*replanner == id) ? delta_i : delta_j;
    outcome.delta_replanner = chosen.delta;

    if (chosen.delta.is_infeasible()) {
      if (*replanner != id)
        throw std::logic_error("negotiation chose an infeasible counterpart");
      return abort_with(delta_i.delta);
    }

    if (mechanism.kind == MechanismKind::Karma) {
      auto [ki, kj] = apply_karma_update(me.karma, other.karma, *replanner == id,
                                         chosen.delta.value());
      me.karma = ki;
      other.karma = kj;
      outcome.karma_transfer = chosen.delta.value();
    }
    outcome.karma_initiator_after = me.karma;
    outcome.karma_counterpart_after = other.karma;
    outcome.new_trajectory = chosen.candidate;
    result.outcomes.push_back(std::move(outcome));

    if (*replanner == id) {
      considered.insert(j);
      candidate = std::move(chosen.candidate);
    } else {
      other.traj = std::move(*chosen.candidate);
    }
  }
}

TokenRound token_passing_plan(Fleet& fleet, const std::vector<AgentId>& order) {
  TokenRound round;
  for (AgentId id : order) {
    FleetAgent& agent = fleet.agents[static_cast<size_t>(id)];
    if (!agent.goal) throw std::logic_error("token_passing_plan: agent has no goal");
    std::vector<Trajectory> avoid = trajectories_except(fleet, {id}, false);
    auto traj = plan_leg(fleet, id, agent.traj.pose_at(fleet.now), *agent.goal,
                         std::move(avoid));
    if (traj) {
      agent.traj = std::move(*traj);
      agent.committed = true;
      round.planned.push_back(id);
    } else {
      agent.traj = Trajectory::parked(id, agent.traj.pose_at(fleet.now), fleet.now);
      agent.pose = agent.traj.poses.front();
      agent.committed = false;
      round.failed.push_back(id);
    }
  }
  return round;
}

}  // namespace kmapf
