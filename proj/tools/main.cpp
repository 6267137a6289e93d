#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "kmapf/scenario.hpp"
#include "kmapf/stats.hpp"

namespace fs = std::filesystem;
using namespace kmapf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoSolution = 3;
constexpr int kExitCheckFailed = 4;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct RunFlags {
  std::string scenario_file;
  std::string output_dir;
  std::string mechanism;
  int interior_width = -1;
  int interior_height = -1;
  int agents = -1;
  double tau = -1.0;
  int steps = -1;
  double task_rate = -1.0;
  int64_t seed = -1;
  int horizon = -1;
};

Scenario build_scenario(const RunFlags& flags) {
  Scenario scenario;
  if (!flags.scenario_file.empty())
    scenario = parse_scenario(read_file(flags.scenario_file));
  if (!flags.mechanism.empty()) {
    auto kind = mechanism_from_name(flags.mechanism);
    if (!kind)
      throw std::invalid_argument("invalid value for key: mechanism (" + flags.mechanism + ")");
    scenario.config.mechanism.kind = *kind;
  }
  if (flags.interior_width > 0) scenario.config.interior_width = flags.interior_width;
  if (flags.interior_height > 0) scenario.config.interior_height = flags.interior_height;
  if (flags.agents >= 0) scenario.config.agent_count = flags.agents;
  if (flags.tau >= 0) scenario.config.mechanism.tau = flags.tau;
  if (flags.steps >= 0) scenario.config.episode_length = flags.steps;
  if (flags.task_rate >= 0) scenario.config.task_rate = flags.task_rate;
  if (flags.seed >= 0) scenario.config.seed = static_cast<uint64_t>(flags.seed);
  if (flags.horizon > 0) scenario.config.horizon = flags.horizon;
  if (!flags.output_dir.empty()) scenario.output_dir = flags.output_dir;
  return scenario;
}

int cmd_run(const RunFlags& flags) {
  Scenario scenario = build_scenario(flags);
  Simulation sim(scenario.config);
  MetricsSummary metrics = sim.run();

  fs::path dir(scenario.output_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "tasks.csv", tasks_csv(metrics.tasks));
  write_file_atomic(dir / "summary.json", summary_json(scenario, metrics));
  write_file_atomic(dir / "trace.jsonl", trace_jsonl(sim.trace()));

  std::cout << "mechanism=" << mechanism_name(scenario.config.mechanism.kind)
            << " tau=" << fmt_double(scenario.config.mechanism.tau) << " grid="
            << scenario.config.interior_width << "x" << scenario.config.interior_height
            << " agents=" << scenario.config.agent_count << " seed=" << scenario.config.seed
            << " completed=" << metrics.completed_tasks
            << " task_time=" << fmt_double(metrics.task_time_mean) << "±"
            << fmt_double(metrics.task_time_std)
            << " service_time=" << fmt_double(metrics.service_time_mean) << "±"
            << fmt_double(metrics.service_time_std) << " astar_calls=" << metrics.astar_calls
            << "\n";
  return kExitOk;
}

struct SweepRow {
  Scenario scenario;
  MetricsSummary metrics;
  bool ok = false;
  std::string error;
};

void append_row_fields(std::ostringstream& os, const SimConfig& c) {
  os << mechanism_name(c.mechanism.kind) << ',' << fmt_double(c.mechanism.tau) << ','
     << c.interior_width << ',' << c.interior_height << ',' << c.agent_count << ','
     << c.episode_length << ',' << fmt_double(c.effective_task_rate()) << ','
     << c.horizon;
}

int cmd_sweep(const std::string& spec_file, const std::string& output_file, int jobs) {
  SweepSpec spec = parse_sweep(read_file(spec_file));
  std::vector<Scenario> scenarios = expand_sweep(spec);
  size_t seeds = scenarios.empty() ? 1 : scenarios.size() / spec.combinations();
  std::cout << "sweep: " << spec.combinations() << " combinations x " << seeds
            << " seeds = " << scenarios.size() << " rows\n";

  std::vector<SweepRow> rows(scenarios.size());
  for (size_t k = 0; k < scenarios.size(); ++k) rows[k].scenario = scenarios[k];

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t k = next.fetch_add(1);
      if (k >= rows.size()) return;
      try {
        Simulation sim(rows[k].scenario.config);
        rows[k].metrics = sim.run();
        rows[k].ok = true;
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  };
  int thread_count = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;
  std::vector<std::thread> pool;
  for (int k = 0; k < thread_count; ++k) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::ostringstream os;
  os << "mechanism,tau,interior_width,interior_height,agents,steps,task_rate,horizon,"
        "seed,kind,completed_tasks,task_time_mean,task_time_std,service_time_mean,"
        "service_time_std,service_time_increase_mean,service_time_increase_std,"
        "astar_calls,plan_events,status\n";
  bool any_failed = false;
  for (size_t base = 0; base < rows.size(); base += seeds) {
    // per-combination data rows followed by mean/std aggregate rows
    std::vector<std::vector<double>> columns(9);
    size_t ok_rows = 0;
    for (size_t k = base; k < base + seeds; ++k) {
      const SweepRow& row = rows[k];
      append_row_fields(os, row.scenario.config);
      os << ',' << row.scenario.config.seed << ",run,";
      if (row.ok) {
        const MetricsSummary& m = row.metrics;
        double values[9] = {static_cast<double>(m.completed_tasks),
                            m.task_time_mean,
                            m.task_time_std,
                            m.service_time_mean,
                            m.service_time_std,
                            m.service_time_increase_mean,
                            m.service_time_increase_std,
                            static_cast<double>(m.astar_calls),
                            static_cast<double>(m.plan_events)};
        for (int c = 0; c < 9; ++c) {
          os << fmt_double(values[c]) << ',';
          columns[static_cast<size_t>(c)].push_back(values[c]);
        }
        os << "ok\n";
        ++ok_rows;
      } else {
        any_failed = true;
        std::string reason = rows[k].error;
        for (char& ch : reason)
          if (ch == ',' || ch == '\n') ch = ';';
        os << ",,,,,,,,," << "failed:" << reason << '\n';
      }
    }
    for (const char* kind : {"mean", "std"}) {
      append_row_fields(os, rows[base].scenario.config);
      os << ",,"  << kind << ',';
      for (int c = 0; c < 9; ++c) {
        if (ok_rows == 0) {
          os << ',';
          continue;
        }
        RunningStats stats;
        for (double v : columns[static_cast<size_t>(c)]) stats.add(v);
        os << fmt_double(std::string(kind) == "mean" ? stats.mean() : stats.stddev()) << ',';
      }
      os << (ok_rows == seeds ? "ok" : "partial") << '\n';
    }
  }
  write_file_atomic(output_file, os.str());
  std::cout << "wrote " << output_file << "\n";
  return any_failed ? kExitError : kExitOk;
}

int cmd_oracle(const std::string& instance_file, bool check_brute) {
  OneShotInstance instance = parse_instance(read_file(instance_file));
  auto solution = cbs_solve(instance.map, instance.starts, instance.goals, instance.horizon);
  if (!solution) {
    std::cout << "no solution within horizon " << instance.horizon << "\n";
    return kExitNoSolution;
  }
  std::cout << "sum_of_costs=" << solution->cost
            << " ct_expanded=" << solution->stats.ct_expanded
            << " lowlevel_calls=" << solution->stats.lowlevel_calls << "\n";
  for (size_t a = 0; a < solution->paths.size(); ++a) {
    std::cout << "agent " << a << " cost=" << solution->paths[a].cost() << ":";
    for (const Pose& p : solution->paths[a].poses)
      std::cout << " (" << p.cell.x << "," << p.cell.y << ","
                << orientation_name(p.heading) << ")";
    std::cout << "\n";
  }
  if (check_brute) {
    auto brute = joint_brute_force(instance.map, instance.starts, instance.goals,
                                   instance.horizon);
    if (!brute) {
      std::cout << "brute_force=none (disagrees with CBS)\n";
      return kExitCheckFailed;
    }
    std::cout << "brute_force=" << *brute
              << (*brute == solution->cost ? " (match)" : " (MISMATCH)") << "\n";
    if (*brute != solution->cost) return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_check_trace(const std::string& trace_file, const std::string& summary_file) {
  EpisodeTrace trace = parse_trace_jsonl(read_file(trace_file));
  auto issues = check_trace(trace);
  for (const TraceIssue& issue : issues)
    std::cout << "issue t=" << issue.t << ": " << issue.what << "\n";

  if (!summary_file.empty()) {
    GridMap map(trace.interior_width, trace.interior_height, trace.border_width);
    MetricsSummary replayed = replay_metrics(map, trace);
    std::string summary_text = read_file(summary_file);
    auto expect = [&](const std::string& key, const std::string& value) {
      std::string needle = "\"" + key + "\": " + value;
      if (summary_text.find(needle) == std::string::npos) {
        issues.push_back({0, "summary mismatch for " + key + " (replay: " + value + ")"});
        std::cout << "issue: summary mismatch for " << key << " (replay: " << value << ")\n";
      }
    };
    expect("completed_tasks", std::to_string(replayed.completed_tasks));
    expect("astar_calls", std::to_string(replayed.astar_calls));
    expect("plan_events", std::to_string(replayed.plan_events));
  }

  if (issues.empty()) {
    std::cout << "trace ok: " << trace.steps.size() << " steps, "
              << trace.negotiations.size() << " negotiations, " << trace.tasks.size()
              << " tasks\n";
    return kExitOk;
  }
  std::cout << issues.size() << " issue(s) found\n";
  return kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized MAPF with karma-based bilateral negotiation"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run one lifelong MAPD episode");
  run->add_option("--scenario", run_flags.scenario_file, "scenario JSON file");
  run->add_option("--output-dir", run_flags.output_dir, "output directory");
  run->add_option("--mechanism", run_flags.mechanism, "token|egoistic|altruistic|karma");
  run->add_option("--interior-width", run_flags.interior_width, "interior grid width");
  run->add_option("--interior-height", run_flags.interior_height, "interior grid height");
  run->add_option("--agents", run_flags.agents, "agent count");
  run->add_option("--tau", run_flags.tau, "karma influence parameter");
  run->add_option("--steps", run_flags.steps, "episode length");
  run->add_option("--task-rate", run_flags.task_rate, "expected tasks per step");
  run->add_option("--seed", run_flags.seed, "random seed");
  run->add_option("--horizon", run_flags.horizon, "planner horizon");

  std::string sweep_spec, sweep_output = "aggregate.csv";
  int sweep_jobs = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--spec", sweep_spec, "sweep spec JSON file")->required();
  sweep->add_option("--output", sweep_output, "aggregate CSV path");
  sweep->add_option("--jobs", sweep_jobs, "worker threads (default: hardware)");

  std::string instance_file;
  bool check_brute = false;
  CLI::App* oracle = app.add_subcommand("oracle", "optimal CBS solve of a one-shot instance");
  oracle->add_option("--instance", instance_file, "instance JSON file")->required();
  oracle->add_flag("--check-brute", check_brute,
                   "cross-check against the joint brute force (guarded)");

  std::string trace_file, summary_file;
  CLI::App* check = app.add_subcommand("check-trace", "post-hoc safety and karma audit");
  check->add_option("--trace", trace_file, "trace.jsonl path")->required();
  check->add_option("--summary", summary_file, "optional summary.json to replay against");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_spec, sweep_output, sweep_jobs);
    if (oracle->parsed()) return cmd_oracle(instance_file, check_brute);
    if (check->parsed()) return cmd_check_trace(trace_file, summary_file);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitConfig;
}
