#include <benchmark/benchmark.h>

#include "kmapf/planner.hpp"
#include "kmapf/rng.hpp"

using namespace kmapf;

namespace {

std::vector<Trajectory> random_avoid(const GridMap& map, int count, uint64_t seed) {
  Rng rng(seed);
  std::vector<Cell> cells = map.traversable_cells();
  std::vector<Trajectory> avoid;
  for (int a = 0; a < count; ++a) {
    Pose pose{cells[static_cast<size_t>(rng.uniform_int(static_cast<int>(cells.size())))],
              static_cast<Orientation>(rng.uniform_int(4))};
    Trajectory traj{100 + a, 0, {pose}};
    for (int k = 0; k < 20; ++k) {
      auto options = successors(map, traj.poses.back());
      traj.poses.push_back(
          options[static_cast<size_t>(rng.uniform_int(static_cast<int>(options.size())))]
              .second);
    }
    avoid.push_back(std::move(traj));
  }
  return avoid;
}

void BM_PlanAcrossWarehouse(benchmark::State& state) {
  GridMap map(15, 15, 1);
  auto avoid = random_avoid(map, static_cast<int>(state.range(0)), 7);
  SearchQuery query{{{0, 8}, Orientation::East}, 0, {16, 8}, avoid, 0};
  AstarCallCounter counter;
  for (auto _ : state) {
    auto traj = plan(map, query, counter);
    benchmark::DoNotOptimize(traj);
  }
}
BENCHMARK(BM_PlanAcrossWarehouse)->Arg(0)->Arg(4)->Arg(8)->Arg(16);

void BM_UnconstrainedCost(benchmark::State& state) {
  GridMap map(15, 15, 1);
  for (auto _ : state) {
    auto cost = unconstrained_cost(map, {{0, 0}, Orientation::South}, {16, 16});
    benchmark::DoNotOptimize(cost);
  }
}
BENCHMARK(BM_UnconstrainedCost);

}  // namespace
