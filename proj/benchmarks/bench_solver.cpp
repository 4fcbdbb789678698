#include <benchmark/benchmark.h>

#include "salesmix/model.hpp"
#include "salesmix/mpec.hpp"
#include "salesmix/scenario.hpp"
#include "salesmix/sweep.hpp"

namespace {

using namespace salesmix;

void BM_OptimizeAllocation(benchmark::State& state) {
  const SystemConfig cfg = benchmark_config();
  const Scenario sc = mean_value_scenario(cfg);
  const double qft = 2250.0;
  const double pf = 40.0;
  for (auto _ : state) {
    AllocationSolution sol = optimize_allocation(cfg.units, sc, qft, pf);
    benchmark::DoNotOptimize(sol.profit);
  }
}
BENCHMARK(BM_OptimizeAllocation);

void BM_BranchVerify(benchmark::State& state) {
  const SystemConfig cfg = benchmark_config();
  const Scenario sc = mean_value_scenario(cfg);
  for (auto _ : state) {
    AllocationSolution sol = branch_verify(cfg.units, sc, 2250.0, 40.0);
    benchmark::DoNotOptimize(sol.profit);
  }
}
BENCHMARK(BM_BranchVerify);

void BM_FullScenarioSweepPoint(benchmark::State& state) {
  SystemConfig cfg = benchmark_config();
  cfg.n_scenarios = 64;
  cfg.qft_grid = {2250.0};
  const ScenarioSet set = generate_scenarios(cfg);
  SweepSettings settings;
  settings.threads = 1;
  for (auto _ : state) {
    Frontier f = run_sweep(cfg, set, settings);
    benchmark::DoNotOptimize(f.points.front().expected_profit);
  }
}
BENCHMARK(BM_FullScenarioSweepPoint);

}  // namespace

BENCHMARK_MAIN();
