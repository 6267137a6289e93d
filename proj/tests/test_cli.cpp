#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kmapf/scenario.hpp"

namespace fs = std::filesystem;
using namespace kmapf;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  fs::path log = fs::temp_directory_path() / "kmapf_cli_out.txt";
  std::string command = std::string(KMAPF_CLI_PATH) + " " + args + " > " +
                        log.string() + " 2>&1";
  int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::ostringstream os;
  os << in.rdbuf();
  result.output = os.str();
  return result;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("run: writes the three outputs and echoes the tau default") {
  fs::path dir = fresh_dir("kmapf_run_min");
  write(dir / "scenario.json",
        R"({"mechanism": "karma", "agents": 3, "grid": {"interior_width": 5, "interior_height": 5}, "steps": 25, "seed": 4})");
  auto result = run_cli("run --scenario " + (dir / "scenario.json").string() +
                        " --output-dir " + (dir / "out").string());
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "tasks.csv"));
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(fs::exists(dir / "out" / "trace.jsonl"));
  CHECK(slurp(dir / "out" / "summary.json").find("\"tau\": 0.5") != std::string::npos);
}

TEST_CASE("run: zero steps produce a header-only tasks.csv") {
  fs::path dir = fresh_dir("kmapf_run_zero");
  auto result = run_cli("run --mechanism token --agents 2 --steps 0 --output-dir " +
                        (dir / "out").string());
  CHECK(result.exit_code == 0);
  CHECK(slurp(dir / "out" / "tasks.csv") ==
        "task_id,spawn_t,assign_t,pickup_t,deliver_t,agent_id,task_time,service_time,"
        "service_time_increase\n");
}

TEST_CASE("run: invalid config exits nonzero and names the key") {
  fs::path dir = fresh_dir("kmapf_run_bad");
  write(dir / "scenario.json", R"({"mechanism": "karma", "warp": 9})");
  auto result = run_cli("run --scenario " + (dir / "scenario.json").string());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("unknown key: warp") != std::string::npos);
}

TEST_CASE("sweep: row counting, ordering, determinism across reruns") {
  fs::path dir = fresh_dir("kmapf_sweep");
  write(dir / "sweep.json", R"({
    "base": {"mechanism": "karma", "agents": 3,
             "grid": {"interior_width": 5, "interior_height": 5}, "steps": 15},
    "sweep": {"mechanism": ["token", "karma"], "seed": [1, 2]}
  })");
  auto first = run_cli("sweep --spec " + (dir / "sweep.json").string() + " --output " +
                       (dir / "agg.csv").string() + " --jobs 2");
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("2 combinations x 2 seeds = 4 rows") != std::string::npos);

  std::string csv = slurp(dir / "agg.csv");
  size_t data_rows = 0, mean_rows = 0, std_rows = 0;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::string> kinds;
  while (std::getline(lines, line)) {
    if (line.find(",run,") != std::string::npos) ++data_rows, kinds.push_back("run");
    if (line.find(",mean,") != std::string::npos) ++mean_rows, kinds.push_back("mean");
    if (line.find(",std,") != std::string::npos) ++std_rows, kinds.push_back("std");
  }
  CHECK(data_rows == 4);
  CHECK(mean_rows == 2);
  CHECK(std_rows == 2);
  // per combination: run, run, mean, std
  REQUIRE(kinds.size() == 8);
  CHECK(kinds[0] == "run");
  CHECK(kinds[2] == "mean");
  CHECK(kinds[3] == "std");

  auto again = run_cli("sweep --spec " + (dir / "sweep.json").string() + " --output " +
                       (dir / "agg2.csv").string() + " --jobs 1");
  CHECK(again.exit_code == 0);
  CHECK(slurp(dir / "agg2.csv") == csv);  // byte-identical rerun
}

TEST_CASE("sweep: aggregate rows match recomputation from data rows") {
  fs::path dir = fresh_dir("kmapf_sweep_agg");
  write(dir / "sweep.json", R"({
    "base": {"mechanism": "altruistic", "agents": 3,
             "grid": {"interior_width": 5, "interior_height": 5}, "steps": 20},
    "sweep": {"seed": [1, 2, 3]}
  })");
  auto result = run_cli("sweep --spec " + (dir / "sweep.json").string() + " --output " +
                        (dir / "agg.csv").string());
  CHECK(result.exit_code == 0);

  std::istringstream lines(slurp(dir / "agg.csv"));
  std::string line;
  std::getline(lines, line);
  std::vector<double> completed;
  double mean_field = -1;
  while (std::getline(lines, line)) {
    std::vector<std::string> cols;
    std::istringstream row(line);
    std::string col;
    while (std::getline(row, col, ',')) cols.push_back(col);
    if (cols[9] == "run") completed.push_back(std::stod(cols[10]));
    if (cols[9] == "mean") mean_field = std::stod(cols[10]);
  }
  REQUIRE(completed.size() == 3);
  double expect = (completed[0] + completed[1] + completed[2]) / 3.0;
  CHECK(std::fabs(mean_field - expect) < 1e-9);
}

TEST_CASE("oracle: single agent equals the unconstrained cost") {
  fs::path dir = fresh_dir("kmapf_oracle1");
  write(dir / "inst.json", R"({
    "grid": {"interior_width": 4, "interior_height": 4},
    "horizon": 16,
    "agents": [{"start": [0, 0], "heading": "E", "goal": [3, 0]}]
  })");
  auto result = run_cli("oracle --instance " + (dir / "inst.json").string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("sum_of_costs=3") != std::string::npos);
}

TEST_CASE("oracle: corridor swap cross-checks against the brute force") {
  fs::path dir = fresh_dir("kmapf_oracle2");
  write(dir / "inst.json", R"({
    "grid": {"interior_width": 4, "interior_height": 4},
    "horizon": 16,
    "agents": [
      {"start": [1, 2], "heading": "E", "goal": [4, 2]},
      {"start": [4, 2], "heading": "W", "goal": [1, 2]}
    ]
  })");
  auto result = run_cli("oracle --instance " + (dir / "inst.json").string() +
                        " --check-brute");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("(match)") != std::string::npos);
}

TEST_CASE("oracle: the brute-force guard refuses oversized instances") {
  fs::path dir = fresh_dir("kmapf_oracle3");
  write(dir / "inst.json", R"({
    "grid": {"interior_width": 10, "interior_height": 10},
    "horizon": 16,
    "agents": [{"start": [0, 0], "heading": "E", "goal": [3, 0]}]
  })");
  auto result = run_cli("oracle --instance " + (dir / "inst.json").string() +
                        " --check-brute");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("guard") != std::string::npos);
}

TEST_CASE("oracle: unsolvable instances exit with the no-solution code") {
  fs::path dir = fresh_dir("kmapf_oracle4");
  // two agents swapped in a 2x1 interior with no border: no way to pass
  write(dir / "inst.json", R"({
    "grid": {"interior_width": 2, "interior_height": 1, "border_width": 0},
    "horizon": 10,
    "agents": [
      {"start": [0, 0], "heading": "E", "goal": [1, 0]},
      {"start": [1, 0], "heading": "W", "goal": [0, 0]}
    ]
  })");
  auto result = run_cli("oracle --instance " + (dir / "inst.json").string());
  CHECK(result.exit_code == 3);
}

TEST_CASE("check-trace: accepts generated traces, rejects tampered ones") {
  fs::path dir = fresh_dir("kmapf_check");
  auto result = run_cli("run --mechanism karma --agents 4 --steps 30 --seed 6"
                        " --interior-width 6 --interior-height 6 --output-dir " +
                        (dir / "out").string());
  REQUIRE(result.exit_code == 0);
  auto check = run_cli("check-trace --trace " + (dir / "out" / "trace.jsonl").string() +
                       " --summary " + (dir / "out" / "summary.json").string());
  CHECK(check.exit_code == 0);
  CHECK(check.output.find("trace ok") != std::string::npos);

  // teleport an agent onto another's cell in one step record
  EpisodeTrace trace = parse_trace_jsonl(slurp(dir / "out" / "trace.jsonl"));
  REQUIRE(trace.steps.size() > 5);
  REQUIRE(trace.steps[3].agents.size() >= 2);
  trace.steps[3].agents[1].pose = trace.steps[3].agents[0].pose;
  write(dir / "tampered.jsonl", trace_jsonl(trace));
  auto bad = run_cli("check-trace --trace " + (dir / "tampered.jsonl").string());
  CHECK(bad.exit_code == 4);
  CHECK(bad.output.find("vertex conflict") != std::string::npos);
}
