#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "salesmix/mpec.hpp"
#include "salesmix/model.hpp"
#include "salesmix/scenario.hpp"

namespace salesmix {

// Expected strategic production split by technology group, spot vs futures.
struct TechnologyMix {
  double nuclear_spot = 0.0;
  double nuclear_futures = 0.0;
  double renewable_spot = 0.0;
  double renewable_futures = 0.0;
  double conventional_spot = 0.0;
  double conventional_futures = 0.0;
};

struct SweepPoint {
  double qft = 0.0;
  bool feasible = true;
  std::string diagnostic;  // why the point is infeasible, when it is

  double futures_price = 0.0;        // probability-weighted naive spot price
  std::vector<double> naive_prices;  // per scenario
  std::vector<AllocationSolution> solutions;  // per scenario

  double expected_profit = 0.0;
  double cvar_profit = 0.0;
  double expected_spot_price = 0.0;
  TechnologyMix mix;
};

struct Frontier {
  std::vector<SweepPoint> points;
  double cvar_level = 0.0;
  ScenarioProvenance provenance;
};

struct QftRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Commitments outside [0, min over scenarios of total strategic capacity]
// cannot be honored in every scenario.
QftRange feasible_qft_range(const std::vector<UnitSpec>& units,
                            const ScenarioSet& set);

// Futures price at a commitment level: the probability-weighted mean of the
// per-scenario naive clearing prices.  Returns the price and the prices.
std::pair<double, std::vector<double>> futures_price(
    const std::vector<UnitSpec>& units, const ScenarioSet& set, double qft,
    double alpha);

struct SweepSettings {
  unsigned threads = 0;  // 0 = hardware concurrency; never affects results
};

// Full frontier over cfg.qft_grid: price the futures leg, solve every
// scenario's allocation problem, aggregate expected profit, CVaR, expected
// spot price and the technology mix.  Scenario solves run on a parallel map
// keyed by scenario index; every reduction is a compensated sum in fixed
// scenario order, so output is bit-identical for any thread count.
// Grid points outside the feasible range, or whose solve fails in some
// scenario, are recorded as infeasible with a diagnostic; other points are
// unaffected.
Frontier run_sweep(const SystemConfig& cfg, const ScenarioSet& set,
                   const SweepSettings& settings = {});

TechnologyMix technology_mix(const std::vector<UnitSpec>& units,
                             const std::vector<AllocationSolution>& solutions,
                             const std::vector<double>& probabilities);

// frontier.csv: header
//   qft,pf,exp_spot_price,exp_profit,cvar_profit,nuc_spot,nuc_fut,
//   ren_spot,ren_fut,conv_spot,conv_fut,infeasible
// one row per grid point, shortest round-trip number formatting, infeasible
// rows carry empty value fields and infeasible=1.
std::string frontier_csv(const Frontier& f);
void write_frontier_csv(const Frontier& f, const std::string& path);

// Per-scenario rows behind the --detail flag.
std::string sweep_detail_csv(const Frontier& f,
                             const std::vector<UnitSpec>& units);

// (x, y) = (cvar_profit, exp_profit) pairs of feasible points, for plotting
// the expected-vs-CVaR frontier.
std::string frontier_plot_csv(const Frontier& f);

struct FrontierRow {
  double qft = 0.0;
  double pf = 0.0;
  double exp_spot_price = 0.0;
  double exp_profit = 0.0;
  double cvar_profit = 0.0;
  double nuc_spot = 0.0, nuc_fut = 0.0;
  double ren_spot = 0.0, ren_fut = 0.0;
  double conv_spot = 0.0, conv_fut = 0.0;
  bool infeasible = false;
};

std::vector<FrontierRow> read_frontier_csv(const std::string& path);

}  // namespace salesmix
