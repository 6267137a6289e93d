#include "kmapf/scenario.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace kmapf {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& key) {
  throw std::invalid_argument("unknown key: " + key);
}

void expect_keys(const json& object, const std::vector<std::string>& allowed,
                 const std::string& prefix) {
  for (const auto& item : object.items()) {
    bool ok = false;
    for (const std::string& key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok) bad_key(prefix.empty() ? item.key() : prefix + "." + item.key());
  }
}

json scenario_to_json(const Scenario& scenario) {
  const SimConfig& c = scenario.config;
  GridMap map(c.interior_width, c.interior_height, c.border_width);
  json doc;
  doc["grid"] = {{"interior_width", c.interior_width}, {"interior_height", c.interior_height}};
  doc["agents"] = c.agent_count;
  doc["mechanism"] = std::string(mechanism_name(c.mechanism.kind));
  doc["tau"] = c.mechanism.tau;
  doc["steps"] = c.episode_length;
  doc["task_rate"] = c.effective_task_rate();
  doc["seed"] = c.seed;
  doc["horizon"] = c.horizon > 0 ? c.horizon : default_horizon(map);
  doc["output_dir"] = scenario.output_dir;
  return doc;
}

Scenario scenario_from_json(const json& doc) {
  expect_keys(doc, {"grid", "agents", "mechanism", "tau", "steps", "task_rate", "seed",
                    "horizon", "output_dir"},
              "");
  Scenario scenario;
  SimConfig& c = scenario.config;
  if (doc.contains("grid")) {
    const json& grid = doc.at("grid");
    expect_keys(grid, {"interior_width", "interior_height"}, "grid");
    if (grid.contains("interior_width")) c.interior_width = grid.at("interior_width").get<int>();
    if (grid.contains("interior_height"))
      c.interior_height = grid.at("interior_height").get<int>();
  }
  if (doc.contains("agents")) c.agent_count = doc.at("agents").get<int>();
  if (doc.contains("mechanism")) {
    std::string name = doc.at("mechanism").get<std::string>();
    auto kind = mechanism_from_name(name);
    if (!kind) throw std::invalid_argument("invalid value for key: mechanism (" + name + ")");
    c.mechanism.kind = *kind;
  }
  if (doc.contains("tau")) {
    c.mechanism.tau = doc.at("tau").get<double>();
    if (c.mechanism.tau < 0) throw std::invalid_argument("invalid value for key: tau");
  }
  if (doc.contains("steps")) {
    c.episode_length = doc.at("steps").get<int>();
    if (c.episode_length < 0) throw std::invalid_argument("invalid value for key: steps");
  }
  if (doc.contains("task_rate")) {
    c.task_rate = doc.at("task_rate").get<double>();
    if (c.task_rate < 0) throw std::invalid_argument("invalid value for key: task_rate");
  }
  if (doc.contains("seed")) c.seed = doc.at("seed").get<uint64_t>();
  if (doc.contains("horizon")) {
    c.horizon = doc.at("horizon").get<int>();
    if (c.horizon < 1) throw std::invalid_argument("invalid value for key: horizon");
  }
  if (doc.contains("output_dir")) scenario.output_dir = doc.at("output_dir").get<std::string>();
  if (c.interior_width < 1 || c.interior_height < 1)
    throw std::invalid_argument("invalid value for key: grid");
  if (c.agent_count < 0) throw std::invalid_argument("invalid value for key: agents");
  return scenario;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc = json::parse(json_text);
  if (!doc.is_object()) throw std::invalid_argument("scenario: top-level object expected");
  return scenario_from_json(doc);
}

std::string serialize_scenario(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

size_t SweepSpec::combinations() const {
  auto dim = [](size_t n) { return n == 0 ? size_t{1} : n; };
  return dim(mechanisms.size()) * dim(taus.size()) * dim(widths.size()) *
         dim(heights.size()) * dim(agent_counts.size()) * dim(steps.size()) *
         dim(task_rates.size()) * dim(horizons.size());
}

size_t SweepSpec::rows() const {
  return combinations() * (seeds.empty() ? 1 : seeds.size());
}

SweepSpec parse_sweep(const std::string& json_text) {
  json doc = json::parse(json_text);
  expect_keys(doc, {"base", "sweep"}, "");
  SweepSpec spec;
  if (doc.contains("base")) spec.base = scenario_from_json(doc.at("base"));
  if (doc.contains("sweep")) {
    const json& sweep = doc.at("sweep");
    expect_keys(sweep,
                {"mechanism", "tau", "interior_width", "interior_height", "agents", "steps",
                 "task_rate", "horizon", "seed"},
                "sweep");
    if (sweep.contains("mechanism")) {
      for (const auto& v : sweep.at("mechanism")) {
        std::string name = v.get<std::string>();
        if (!mechanism_from_name(name))
          throw std::invalid_argument("invalid value for key: sweep.mechanism (" + name + ")");
        spec.mechanisms.push_back(name);
      }
    }
    if (sweep.contains("tau"))
      for (const auto& v : sweep.at("tau")) spec.taus.push_back(v.get<double>());
    if (sweep.contains("interior_width"))
      for (const auto& v : sweep.at("interior_width")) spec.widths.push_back(v.get<int>());
    if (sweep.contains("interior_height"))
      for (const auto& v : sweep.at("interior_height")) spec.heights.push_back(v.get<int>());
    if (sweep.contains("agents"))
      for (const auto& v : sweep.at("agents")) spec.agent_counts.push_back(v.get<int>());
    if (sweep.contains("steps"))
      for (const auto& v : sweep.at("steps")) spec.steps.push_back(v.get<int>());
    if (sweep.contains("task_rate"))
      for (const auto& v : sweep.at("task_rate")) spec.task_rates.push_back(v.get<double>());
    if (sweep.contains("horizon"))
      for (const auto& v : sweep.at("horizon")) spec.horizons.push_back(v.get<int>());
    if (sweep.contains("seed")) {
      const json& seeds = sweep.at("seed");
      if (seeds.is_object()) {
        expect_keys(seeds, {"from", "to"}, "sweep.seed");
        uint64_t from = seeds.at("from").get<uint64_t>();
        uint64_t to = seeds.at("to").get<uint64_t>();
        for (uint64_t s = from; s <= to; ++s) spec.seeds.push_back(s);
      } else {
        for (const auto& v : seeds) spec.seeds.push_back(v.get<uint64_t>());
      }
    }
  }
  return spec;
}

std::vector<Scenario> expand_sweep(const SweepSpec& spec) {
  auto values = [](auto list, auto fallback) {
    if (list.empty()) list.push_back(fallback);
    return list;
  };
  const SimConfig& base = spec.base.config;
  auto mechanisms = values(spec.mechanisms, std::string(mechanism_name(base.mechanism.kind)));
  auto taus = values(spec.taus, base.mechanism.tau);
  auto widths = values(spec.widths, base.interior_width);
  auto heights = values(spec.heights, base.interior_height);
  auto agents = values(spec.agent_counts, base.agent_count);
  auto steps = values(spec.steps, base.episode_length);
  auto rates = values(spec.task_rates, base.effective_task_rate());
  auto horizons = values(spec.horizons, base.horizon);
  auto seeds = values(spec.seeds, base.seed);

  std::vector<Scenario> out;
  for (const std::string& mech : mechanisms)
    for (double tau : taus)
      for (int w : widths)
        for (int h : heights)
          for (int n : agents)
            for (int ep : steps)
              for (double rate : rates)
                for (int horizon : horizons)
                  for (uint64_t seed : seeds) {
                    Scenario s = spec.base;
                    s.config.mechanism.kind = *mechanism_from_name(mech);
                    s.config.mechanism.tau = tau;
                    s.config.interior_width = w;
                    s.config.interior_height = h;
                    s.config.agent_count = n;
                    s.config.episode_length = ep;
                    s.config.task_rate = rate;
                    s.config.horizon = horizon;
                    s.config.seed = seed;
                    out.push_back(std::move(s));
                  }
  return out;
}

OneShotInstance parse_instance(const std::string& json_text) {
  json doc = json::parse(json_text);
  expect_keys(doc, {"grid", "horizon", "agents"}, "");
  int width = 4, height = 4, border = 1;
  if (doc.contains("grid")) {
    const json& grid = doc.at("grid");
    expect_keys(grid, {"interior_width", "interior_height", "border_width"}, "grid");
    if (grid.contains("interior_width")) width = grid.at("interior_width").get<int>();
    if (grid.contains("interior_height")) height = grid.at("interior_height").get<int>();
    if (grid.contains("border_width")) border = grid.at("border_width").get<int>();
  }
  OneShotInstance instance;
  instance.map = GridMap(width, height, border);
  instance.horizon = doc.contains("horizon") ? doc.at("horizon").get<int>()
                                             : default_horizon(instance.map);
  if (!doc.contains("agents") || !doc.at("agents").is_array() || doc.at("agents").empty())
    throw std::invalid_argument("instance: non-empty agents array required");
  for (const auto& entry : doc.at("agents")) {
    expect_keys(entry, {"start", "heading", "goal"}, "agents[]");
    Cell start{entry.at("start").at(0).get<int>(), entry.at("start").at(1).get<int>()};
    Cell goal{entry.at("goal").at(0).get<int>(), entry.at("goal").at(1).get<int>()};
    auto heading = orientation_from_name(entry.at("heading").get<std::string>());
    if (!heading) throw std::invalid_argument("instance: invalid heading");
    if (!instance.map.traversable(start) || !instance.map.traversable(goal))
      throw std::invalid_argument("instance: start or goal out of bounds");
    instance.starts.push_back({start, *heading});
    instance.goals.push_back(goal);
  }
  return instance;
}

namespace {

std::string field(int v) { return v < 0 ? std::string() : std::to_string(v); }

}  // namespace

std::string tasks_csv(const std::vector<TaskRecord>& tasks) {
  std::ostringstream os;
  os << "task_id,spawn_t,assign_t,pickup_t,deliver_t,agent_id,task_time,service_time,"
        "service_time_increase\n";
  for (const TaskRecord& t : tasks) {
    os << t.task_id << ',' << field(t.spawn_t) << ',' << field(t.assign_t) << ','
       << field(t.pickup_t) << ',' << field(t.deliver_t) << ',' << field(t.agent_id) << ','
       << field(t.task_time) << ',' << field(t.service_time) << ','
       << field(t.service_time_increase) << '\n';
  }
  return os.str();
}

std::string summary_json(const Scenario& scenario, const MetricsSummary& metrics) {
  json doc;
  doc["schema_version"] = 1;
  doc["config"] = scenario_to_json(scenario);
  doc["metrics"] = {{"completed_tasks", metrics.completed_tasks},
                    {"task_time_mean", metrics.task_time_mean},
                    {"task_time_std", metrics.task_time_std},
                    {"service_time_mean", metrics.service_time_mean},
                    {"service_time_std", metrics.service_time_std},
                    {"service_time_increase_mean", metrics.service_time_increase_mean},
                    {"service_time_increase_std", metrics.service_time_increase_std},
                    {"astar_calls", metrics.astar_calls},
                    {"plan_events", metrics.plan_events}};
  return doc.dump(2) + "\n";
}

namespace {

json cell_json(Cell c) { return json::array({c.x, c.y}); }

Cell cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json opt_time(int t) { return t < 0 ? json(nullptr) : json(t); }

int time_from(const json& j) { return j.is_null() ? -1 : j.get<int>(); }

}  // namespace

std::string trace_jsonl(const EpisodeTrace& trace) {
  std::ostringstream os;
  json header;
  header["type"] = "header";
  header["schema_version"] = trace.schema_version;
  header["mechanism"] = std::string(mechanism_name(trace.mechanism));
  header["tau"] = trace.tau;
  header["seed"] = trace.seed;
  header["grid"] = {{"interior_width", trace.interior_width},
                    {"interior_height", trace.interior_height},
                    {"border_width", trace.border_width}};
  header["agents"] = trace.agent_count;
  header["steps"] = trace.episode_length;
  header["task_rate"] = trace.task_rate;
  header["horizon"] = trace.horizon;
  os << header.dump() << '\n';

  struct Line {
    long long order;
    json doc;
  };
  std::vector<Line> lines;
  for (const StepRecord& step : trace.steps) {
    json doc;
    doc["type"] = "step";
    doc["order"] = step.order;
    doc["t"] = step.t;
    json agents = json::array();
    for (const AgentSnapshot& a : step.agents)
      agents.push_back({{"id", a.id},
                        {"x", a.pose.cell.x},
                        {"y", a.pose.cell.y},
                        {"heading", std::string(orientation_name(a.pose.heading))},
                        {"phase", std::string(phase_name(a.phase))},
                        {"karma", a.karma},
                        {"task", a.task}});
    doc["agents"] = std::move(agents);
    lines.push_back({step.order, std::move(doc)});
  }
  for (const NegotiationRecord& n : trace.negotiations) {
    json doc;
    doc["type"] = "negotiation";
    doc["order"] = n.order;
    doc["t"] = n.t;
    doc["initiator"] = n.initiator;
    doc["counterpart"] = n.counterpart;
    doc["replanner"] = n.replanner;
    doc["delta"] = n.delta_finite ? json(n.delta) : json(nullptr);
    doc["karma_transfer"] = n.karma_transfer;
    doc["wait_fallback"] = n.wait_fallback;
    doc["karma"] = {{"initiator_before", n.karma_initiator_before},
                    {"initiator_after", n.karma_initiator_after},
                    {"counterpart_before", n.karma_counterpart_before},
                    {"counterpart_after", n.karma_counterpart_after}};
    lines.push_back({n.order, std::move(doc)});
  }
  for (const PickupRecord& p : trace.pickups) {
    json doc;
    doc["type"] = "pickup";
    doc["order"] = p.order;
    doc["t"] = p.t;
    doc["agent"] = p.agent;
    doc["task"] = p.task;
    doc["karma_after"] = p.karma_after;
    lines.push_back({p.order, std::move(doc)});
  }
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.order < b.order; });
  for (const Line& line : lines) os << line.doc.dump() << '\n';

  for (const TaskRecord& t : trace.tasks) {
    json doc;
    doc["type"] = "task";
    doc["id"] = t.task_id;
    doc["spawn_t"] = opt_time(t.spawn_t);
    doc["assign_t"] = opt_time(t.assign_t);
    doc["pickup_t"] = opt_time(t.pickup_t);
    doc["deliver_t"] = opt_time(t.deliver_t);
    doc["agent"] = t.agent_id < 0 ? json(nullptr) : json(t.agent_id);
    doc["task_time"] = opt_time(t.task_time);
    doc["service_time"] = opt_time(t.service_time);
    doc["service_time_increase"] = opt_time(t.service_time_increase);
    doc["pickup"] = cell_json(t.pickup);
    doc["delivery"] = cell_json(t.delivery);
    os << doc.dump() << '\n';
  }

  json tail;
  tail["type"] = "episode_end";
  tail["astar_calls"] = trace.astar_calls;
  tail["plan_events"] = trace.plan_events;
  os << tail.dump() << '\n';
  return os.str();
}

EpisodeTrace parse_trace_jsonl(const std::string& text) {
  EpisodeTrace trace;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc = json::parse(line);
    std::string type = doc.at("type").get<std::string>();
    if (type == "header") {
      trace.schema_version = doc.at("schema_version").get<int>();
      auto kind = mechanism_from_name(doc.at("mechanism").get<std::string>());
      if (!kind) throw std::invalid_argument("trace: invalid mechanism");
      trace.mechanism = *kind;
      trace.tau = doc.at("tau").get<double>();
      trace.seed = doc.at("seed").get<uint64_t>();
      trace.interior_width = doc.at("grid").at("interior_width").get<int>();
      trace.interior_height = doc.at("grid").at("interior_height").get<int>();
      trace.border_width = doc.at("grid").at("border_width").get<int>();
      trace.agent_count = doc.at("agents").get<int>();
      trace.episode_length = doc.at("steps").get<int>();
      trace.task_rate = doc.at("task_rate").get<double>();
      trace.horizon = doc.at("horizon").get<int>();
    } else if (type == "step") {
      StepRecord step;
      step.order = doc.at("order").get<long long>();
      step.t = doc.at("t").get<int>();
      for (const auto& a : doc.at("agents")) {
        AgentSnapshot snap;
        snap.id = a.at("id").get<int>();
        snap.pose.cell = {a.at("x").get<int>(), a.at("y").get<int>()};
        auto heading = orientation_from_name(a.at("heading").get<std::string>());
        auto phase = phase_from_name(a.at("phase").get<std::string>());
        if (!heading || !phase) throw std::invalid_argument("trace: invalid agent snapshot");
        snap.pose.heading = *heading;
        snap.phase = *phase;
        snap.karma = a.at("karma").get<int>();
        snap.task = a.at("task").get<int>();
        step.agents.push_back(snap);
      }
      trace.steps.push_back(std::move(step));
    } else if (type == "negotiation") {
      NegotiationRecord n;
      n.order = doc.at("order").get<long long>();
      n.t = doc.at("t").get<int>();
      n.initiator = doc.at("initiator").get<int>();
      n.counterpart = doc.at("counterpart").get<int>();
      n.replanner = doc.at("replanner").get<int>();
      n.delta_finite = !doc.at("delta").is_null();
      n.delta = n.delta_finite ? doc.at("delta").get<int>() : 0;
      n.karma_transfer = doc.at("karma_transfer").get<int>();
      n.wait_fallback = doc.at("wait_fallback").get<bool>();
      const json& karma = doc.at("karma");
      n.karma_initiator_before = karma.at("initiator_before").get<int>();
      n.karma_initiator_after = karma.at("initiator_after").get<int>();
      n.karma_counterpart_before = karma.at("counterpart_before").get<int>();
      n.karma_counterpart_after = karma.at("counterpart_after").get<int>();
      trace.negotiations.push_back(n);
    } else if (type == "pickup") {
      PickupRecord p;
      p.order = doc.at("order").get<long long>();
      p.t = doc.at("t").get<int>();
      p.agent = doc.at("agent").get<int>();
      p.task = doc.at("task").get<int>();
      p.karma_after = doc.at("karma_after").get<int>();
      trace.pickups.push_back(p);
    } else if (type == "task") {
      TaskRecord t;
      t.task_id = doc.at("id").get<int>();
      t.spawn_t = time_from(doc.at("spawn_t"));
      t.assign_t = time_from(doc.at("assign_t"));
      t.pickup_t = time_from(doc.at("pickup_t"));
      t.deliver_t = time_from(doc.at("deliver_t"));
      t.agent_id = doc.at("agent").is_null() ? -1 : doc.at("agent").get<int>();
      t.task_time = time_from(doc.at("task_time"));
      t.service_time = time_from(doc.at("service_time"));
      t.service_time_increase = time_from(doc.at("service_time_increase"));
      t.pickup = cell_from(doc.at("pickup"));
      t.delivery = cell_from(doc.at("delivery"));
      trace.tasks.push_back(t);
    } else if (type == "episode_end") {
      trace.astar_calls = doc.at("astar_calls").get<long long>();
      trace.plan_events = doc.at("plan_events").get<long long>();
    } else {
      throw std::invalid_argument("trace: unknown record type " + type);
    }
  }
  return trace;
}

}  // namespace kmapf
