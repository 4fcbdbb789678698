#pragma once

#include <vector>

#include "salesmix/clearing.hpp"
#include "salesmix/model.hpp"
#include "salesmix/scenario.hpp"

namespace salesmix {

// One scenario's optimal futures split for the strategic producer, together
// with the spot clearing it induces.
struct AllocationSolution {
  std::vector<double> futures;  // MWh per unit, rival entries zero
  ClearingOutcome outcome;      // induced spot clearing
  double profit = 0.0;          // == profit_futures + profit_spot
  double profit_futures = 0.0;  // pf*qft - sum(cost * futures)
  double profit_spot = 0.0;     // price*dispatch - cost*dispatch, own units
};

// Big-M constants for the complementarity linearization: `primal` bounds
// every dispatch quantity and slack (max unit capacity in the scenario),
// `dual` bounds every bound multiplier (max cost spread + 1).
struct BigMBounds {
  double primal = 0.0;
  double dual = 0.0;
};

BigMBounds big_m_bounds(const Scenario& sc);

// Price both legs of a concrete futures split: clear the spot market with
// the committed capacity removed and account the futures leg at pf.
AllocationSolution evaluate_allocation(const std::vector<UnitSpec>& units,
                                       const Scenario& sc,
                                       const std::vector<double>& futures,
                                       double qft, double pf);

// Exact per-scenario profit maximization over futures splits.
//
// Under merit-order clearing the spot price takes one of at most n+1 values
// (a unit's cost, or zero when the commitment absorbs all demand).  For a
// candidate price-setting unit m the profit of any split that keeps m
// marginal is
//
//   pf*qft - c_m*qft + sum_{own units before m} (c_m - c_i)*Q_i
//                    - sum_{own units after m} (c_i - c_m)*qf_i,
//
// so the best such split manipulates only the consistency constraints:
// commit as much as possible to units at or before m (cheapest first; this
// both minimizes commitment cost and withholds cheap capacity so demand
// still reaches m), and the unavoidable overflow to the cheapest units
// after m.  Maximizing the closed form per candidate and evaluating each
// constructed split through the real clearing yields the global optimum.
// Exact profit ties between candidates resolve to the lexicographically
// smallest futures vector in unit order.
AllocationSolution optimize_allocation(const std::vector<UnitSpec>& units,
                                       const Scenario& sc, double qft,
                                       double pf);

// Exhaustive lattice search over the commitment simplex
// {sum qf = qft, 0 <= qf_i <= Q_i} with `grid_steps` subdivisions per axis.
// Oracle for tests; refuses systems with more than 3 strategic units.
AllocationSolution brute_force_allocation(const std::vector<UnitSpec>& units,
                                          const Scenario& sc, double qft,
                                          double pf, int grid_steps);

// Independent verifier: depth-first search over the binary complementarity
// patterns of the spot market's optimality system (each unit undispatched,
// interior, or at capacity; cost ties branch both ways), solving each
// consistent pattern's residual allocation problem in closed form and
// validating it against the big-M bounds and the optimality residuals.
// Must agree with optimize_allocation wherever both are defined.
AllocationSolution branch_verify(const std::vector<UnitSpec>& units,
                                 const Scenario& sc, double qft, double pf);

// Residual of the exact linearization that replaces the bilinear revenue
// term price*dispatch with rival-side terms:
//   price*sum(own dispatch) =
//     -sum(rival cost*dispatch) - sum(rival dual_max*capacity)
//     + price*residual_demand.
// Zero (to rounding) for any optimal spot outcome.
double linear_identity_residual(const std::vector<UnitSpec>& units,
                                const Scenario& sc,
                                const AllocationSolution& sol);

}  // namespace salesmix
