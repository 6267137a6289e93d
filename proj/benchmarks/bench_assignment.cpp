#include <benchmark/benchmark.h>

#include "kmapf/assignment.hpp"
#include "kmapf/rng.hpp"

using namespace kmapf;

namespace {

void BM_Hungarian(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(17);
  std::vector<std::vector<double>> cost(static_cast<size_t>(n),
                                        std::vector<double>(static_cast<size_t>(n)));
  for (auto& row : cost)
    for (double& v : row) v = rng.uniform_int(1000);
  for (auto _ : state) {
    double total = 0.0;
    auto sol = hungarian(cost, &total);
    benchmark::DoNotOptimize(sol);
    benchmark::DoNotOptimize(total);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 64)->Complexity();

}  // namespace
