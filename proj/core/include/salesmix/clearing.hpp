#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "salesmix/model.hpp"
#include "salesmix/scenario.hpp"

namespace salesmix {

// One single-period dispatch problem: serve `demand` from capacity-bounded
// units at minimum cost.  Arrays are parallel and in config unit order.
struct DispatchProblem {
  std::vector<std::string> ids;
  std::vector<Owner> owners;
  std::vector<double> cost;      // EUR/MWh
  std::vector<double> capacity;  // MWh offered to the spot market
  double demand = 0.0;           // MWh
};

struct ClearingOutcome {
  std::vector<double> dispatch;  // MWh per unit
  // Cost of the last dispatched unit in merit order; 0 when demand is 0.
  // At a degenerate breakpoint (demand exactly exhausting a tier) the price
  // stays at the exhausted tier's cost rather than jumping to the next one.
  double price = 0.0;
  std::vector<double> dual_min;  // multiplier on dispatch >= 0
  std::vector<double> dual_max;  // multiplier on dispatch <= capacity
  std::optional<std::size_t> marginal_unit;  // index of the price setter
  double residual_demand = 0.0;  // demand actually served
};

// Dispatch order: ascending (cost, strategic before rival, id).
std::vector<std::size_t> merit_order(const DispatchProblem& p);

// Greedy merit-order solve of the dispatch LP with exact dual recovery:
// fully dispatched units get dual_max = max(0, price - cost), undispatched
// units get dual_min = max(0, cost - price), the marginal unit gets zeros.
// Throws InfeasibleError carrying the shortfall if demand exceeds capacity.
ClearingOutcome merit_order_dispatch(const DispatchProblem& p);

// Spot problem with the scenario's raw capacities and demand.
DispatchProblem spot_problem(const std::vector<UnitSpec>& units,
                             const Scenario& sc);

// Pre-commitment clearing used for futures pricing: residual demand
// max(0, D - alpha*qft), every strategic unit's capacity reduced
// pro-rata by its share of total strategic capacity.
DispatchProblem naive_problem(const std::vector<UnitSpec>& units,
                              const Scenario& sc, double qft, double alpha);
ClearingOutcome naive_clearing(const std::vector<UnitSpec>& units,
                               const Scenario& sc, double qft, double alpha);

// Post-commitment clearing: residual demand max(0, D - qft) with each
// strategic unit's capacity reduced by its own committed quantity.
// `futures` is in config unit order with zero entries for rival units.
DispatchProblem strategic_problem(const std::vector<UnitSpec>& units,
                                  const Scenario& sc,
                                  const std::vector<double>& futures,
                                  double qft);
ClearingOutcome strategic_clearing(const std::vector<UnitSpec>& units,
                                   const Scenario& sc,
                                   const std::vector<double>& futures);

// Worst-case optimality residuals of an outcome against its problem.
struct KktReport {
  double stationarity = 0.0;    // max |cost - price + dual_max - dual_min|
  double complementarity = 0.0; // max |dual * slack| product
  double balance = 0.0;         // |sum(dispatch) - demand|

  double max_residual() const;
};

KktReport kkt_residuals(const DispatchProblem& p, const ClearingOutcome& out);

}  // namespace salesmix
