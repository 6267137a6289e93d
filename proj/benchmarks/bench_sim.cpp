#include <benchmark/benchmark.h>

#include "kmapf/mapd.hpp"

using namespace kmapf;

namespace {

SimConfig episode_config(MechanismKind kind, int grid, int agents) {
  SimConfig config;
  config.interior_width = config.interior_height = grid;
  config.agent_count = agents;
  config.mechanism = {kind, 0.5};
  config.episode_length = 100;
  config.seed = 1;
  return config;
}

void BM_EpisodeTokenPassing(benchmark::State& state) {
  for (auto _ : state) {
    Simulation sim(episode_config(MechanismKind::TokenPassing,
                                  static_cast<int>(state.range(0)), 8));
    benchmark::DoNotOptimize(sim.run());
  }
}
BENCHMARK(BM_EpisodeTokenPassing)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_EpisodeKarma(benchmark::State& state) {
  for (auto _ : state) {
    Simulation sim(
        episode_config(MechanismKind::Karma, static_cast<int>(state.range(0)), 8));
    benchmark::DoNotOptimize(sim.run());
  }
}
BENCHMARK(BM_EpisodeKarma)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_KarmaStepUnderLoad(benchmark::State& state) {
  Simulation sim(episode_config(MechanismKind::Karma, 10, static_cast<int>(state.range(0))));
  for (auto _ : state) sim.step();
}
BENCHMARK(BM_KarmaStepUnderLoad)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
