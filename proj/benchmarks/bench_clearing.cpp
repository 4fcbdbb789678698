#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "salesmix/clearing.hpp"
#include "salesmix/model.hpp"
#include "salesmix/scenario.hpp"

namespace {

using namespace salesmix;

void BM_DispatchBenchmarkSystem(benchmark::State& state) {
  const SystemConfig cfg = benchmark_config();
  const Scenario sc = mean_value_scenario(cfg);
  const DispatchProblem problem = spot_problem(cfg.units, sc);
  for (auto _ : state) {
    ClearingOutcome out = merit_order_dispatch(problem);
    benchmark::DoNotOptimize(out.price);
  }
}
BENCHMARK(BM_DispatchBenchmarkSystem);

void BM_DispatchSyntheticSystem(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> cost(0.0, 80.0);
  std::uniform_real_distribution<double> cap(50.0, 500.0);
  DispatchProblem problem;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    problem.cost.push_back(cost(rng));
    problem.capacity.push_back(cap(rng));
    total += problem.capacity.back();
  }
  problem.demand = 0.6 * total;
  for (auto _ : state) {
    ClearingOutcome out = merit_order_dispatch(problem);
    benchmark::DoNotOptimize(out.price);
  }
}
BENCHMARK(BM_DispatchSyntheticSystem)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
