#include "salesmix/mpec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"

namespace salesmix {

namespace {

constexpr double kMassTol = 1e-7;   // unplaced commitment mass
constexpr double kCheckTol = 1e-6;  // optimality / bound validation

void require_scenario_shape(const std::vector<UnitSpec>& units,
                            const Scenario& sc) {
  if (sc.capacity.size() != units.size() || sc.cost.size() != units.size())
    throw ConfigError("scenario arrays do not match the unit list");
}

std::vector<std::size_t> own_units_by_cost(const std::vector<UnitSpec>& units,
                                           const Scenario& sc) {
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].owner == Owner::strategic) own.push_back(i);
  std::sort(own.begin(), own.end(), [&](std::size_t a, std::size_t b) {
    if (sc.cost[a] != sc.cost[b]) return sc.cost[a] < sc.cost[b];
    return units[a].id < units[b].id;
  });
  return own;
}

double own_capacity(const std::vector<UnitSpec>& units, const Scenario& sc) {
  KahanSum total;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].owner == Owner::strategic) total += sc.capacity[i];
  return total.value();
}

// Commit `qft` to the cheapest own capacity first.  Optimal whenever the
// residual spot market is untouched by how the commitment is split.
std::vector<double> cheapest_fill(const std::vector<UnitSpec>& units,
                                  const Scenario& sc, double qft) {
  std::vector<double> futures(units.size(), 0.0);
  double rem = qft;
  for (const std::size_t i : own_units_by_cost(units, sc)) {
    if (rem <= 0.0) break;
    const double take = std::min(sc.capacity[i], rem);
    futures[i] = take;
    rem -= take;
  }
  return futures;
}

bool better(const AllocationSolution& a, const AllocationSolution& b) {
  if (a.profit != b.profit) return a.profit > b.profit;
  return a.futures < b.futures;
}

}  // namespace

BigMBounds big_m_bounds(const Scenario& sc) {
  BigMBounds m;
  double cmin = 0.0, cmax = 0.0;
  if (!sc.cost.empty()) {
    cmin = *std::min_element(sc.cost.begin(), sc.cost.end());
    cmax = *std::max_element(sc.cost.begin(), sc.cost.end());
  }
  for (const double q : sc.capacity) m.primal = std::max(m.primal, q);
  m.dual = (cmax - cmin) + 1.0;
  return m;
}

AllocationSolution evaluate_allocation(const std::vector<UnitSpec>& units,
                                       const Scenario& sc,
                                       const std::vector<double>& futures,
                                       double qft, double pf) {
  require_scenario_shape(units, sc);
  if (futures.size() != units.size())
    throw ConfigError("futures vector does not match the unit list");
  if (!(qft >= 0.0)) throw ConfigError("contract quantity must be non-negative");

  KahanSum total;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!(futures[i] >= -1e-9))
      throw ConfigError("negative futures commitment on unit " + units[i].id);
    if (units[i].owner == Owner::rival && futures[i] != 0.0)
      throw ConfigError("futures commitment on rival unit " + units[i].id);
    if (futures[i] > sc.capacity[i] + kCheckTol)
      throw ConfigError("futures commitment exceeds capacity of unit " +
                        units[i].id);
    total += futures[i];
  }
  if (std::abs(total.value() - qft) > kCheckTol)
    throw ConfigError("futures commitments do not sum to the contract quantity");

  AllocationSolution sol;
  sol.futures = futures;
  sol.outcome = merit_order_dispatch(strategic_problem(units, sc, futures, qft));

  KahanSum commit_cost;
  for (std::size_t i = 0; i < units.size(); ++i)
    commit_cost += sc.cost[i] * futures[i];
  sol.profit_futures = pf * qft - commit_cost.value();

  KahanSum spot;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].owner == Owner::strategic)
      spot += (sol.outcome.price - sc.cost[i]) * sol.outcome.dispatch[i];
  sol.profit_spot = spot.value();
  sol.profit = sol.profit_futures + sol.profit_spot;
  return sol;
}

AllocationSolution optimize_allocation(const std::vector<UnitSpec>& units,
                                       const Scenario& sc, double qft,
                                       double pf) {
  require_scenario_shape(units, sc);
  if (!(qft >= 0.0)) throw ConfigError("contract quantity must be non-negative");
  const double sellable = own_capacity(units, sc);
  if (qft > sellable + 1e-9)
    throw InfeasibleError("contract quantity exceeds own capacity by " +
                              format_double(qft - sellable) + " MWh",
                          qft - sellable);

  const double dr = std::max(0.0, sc.demand - qft);
  std::vector<std::vector<double>> candidates;
  candidates.push_back(cheapest_fill(units, sc, qft));

  if (dr > 0.0) {
    const std::vector<std::size_t> order = merit_order(spot_problem(units, sc));
    KahanSum cum_cap;   // capacity ordered strictly before the candidate
    KahanSum cum_own;   // its own-unit part, the commitment headroom
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t m = order[k];
      const double cap_m = sc.capacity[m];
      const double cb = cum_cap.value();
      const double fmax = cum_own.value();
      const double ym =
          units[m].owner == Owner::strategic ? cap_m : 0.0;
      // Largest zero-premium commitment mass that keeps m marginal.
      const double g = std::min({qft, fmax + ym, cb + cap_m - dr});
      const double f = std::min(fmax, g);
      if (g >= 0.0 && f > cb - dr) {
        std::vector<double> fut(units.size(), 0.0);
        double rem = f;
        for (std::size_t j = 0; j < k && rem > 0.0; ++j) {
          const std::size_t i = order[j];
          if (units[i].owner != Owner::strategic) continue;
          const double take = std::min(sc.capacity[i], rem);
          fut[i] = take;
          rem -= take;
        }
        if (ym > 0.0) fut[m] = std::min(ym, g - f);
        KahanSum placed;
        for (const double v : fut) placed += v;
        double overflow = qft - placed.value();
        for (std::size_t j = k + 1; j < order.size() && overflow > 0.0; ++j) {
          const std::size_t i = order[j];
          if (units[i].owner != Owner::strategic) continue;
          const double take = std::min(sc.capacity[i], overflow);
          fut[i] = take;
          overflow -= take;
        }
        if (overflow <= kMassTol) candidates.push_back(std::move(fut));
      }
      cum_cap += cap_m;
      if (units[m].owner == Owner::strategic) cum_own += cap_m;
    }
  }

  AllocationSolution best;
  bool have = false;
  for (const auto& fut : candidates) {
    AllocationSolution sol;
    try {
      sol = evaluate_allocation(units, sc, fut, qft, pf);
    } catch (const InfeasibleError&) {
      continue;
    }
    if (!have || better(sol, best)) {
      best = std::move(sol);
      have = true;
    }
  }
  if (!have)  // no spot clearing is feasible at all; surface the shortfall
    return evaluate_allocation(units, sc, candidates.front(), qft, pf);
  return best;
}

AllocationSolution brute_force_allocation(const std::vector<UnitSpec>& units,
                                          const Scenario& sc, double qft,
                                          double pf, int grid_steps) {
  require_scenario_shape(units, sc);
  if (grid_steps < 1) throw ConfigError("grid_steps must be at least 1");
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].owner == Owner::strategic) own.push_back(i);
  if (own.size() > 3)
    throw ConfigError("exhaustive search supports at most 3 strategic units");
  const double sellable = own_capacity(units, sc);
  if (qft > sellable + 1e-9)
    throw InfeasibleError("contract quantity exceeds own capacity by " +
                              format_double(qft - sellable) + " MWh",
                          qft - sellable);

  AllocationSolution best;
  bool have = false;
  const auto consider = [&](std::vector<double>& fut) {
    AllocationSolution sol;
    try {
      sol = evaluate_allocation(units, sc, fut, qft, pf);
    } catch (const InfeasibleError&) {
      return;
    }
    if (!have || better(sol, best)) {
      best = std::move(sol);
      have = true;
    }
  };

  std::vector<double> fut(units.size(), 0.0);
  const auto close = [&](double remainder) {
    const std::size_t last = own.back();
    if (remainder < -1e-9 || remainder > sc.capacity[last] + 1e-9) return;
    fut[last] = std::clamp(remainder, 0.0, sc.capacity[last]);
    consider(fut);
    fut[last] = 0.0;
  };
  if (own.size() == 1) {
    close(qft);
  } else {
    const double step0 = sc.capacity[own[0]] / grid_steps;
    for (int a = 0; a <= grid_steps; ++a) {
      const double qa = std::min(sc.capacity[own[0]], a * step0);
      if (qa > qft + 1e-9) break;
      fut[own[0]] = qa;
      if (own.size() == 2) {
        close(qft - qa);
      } else {
        const double step1 = sc.capacity[own[1]] / grid_steps;
        for (int b = 0; b <= grid_steps; ++b) {
          const double qb = std::min(sc.capacity[own[1]], b * step1);
          if (qa + qb > qft + 1e-9) break;
          fut[own[1]] = qb;
          close(qft - qa - qb);
        }
        fut[own[1]] = 0.0;
      }
      fut[own[0]] = 0.0;
    }
  }
  if (!have)
    return evaluate_allocation(units, sc, cheapest_fill(units, sc, qft), qft, pf);
  return best;
}

namespace {

// Fill `mass` over `targets` in order, bounded by remaining capacity after
// the commitments already in `fut`.  Returns the unplaced remainder.
double fill_in_order(const std::vector<std::size_t>& targets,
                     const Scenario& sc, double mass,
                     std::vector<double>& fut) {
  for (const std::size_t i : targets) {
    if (mass <= 0.0) break;
    const double take = std::min(sc.capacity[i] - fut[i], mass);
    if (take <= 0.0) continue;
    fut[i] += take;
    mass -= take;
  }
  return mass;
}

}  // namespace

AllocationSolution branch_verify(const std::vector<UnitSpec>& units,
                                 const Scenario& sc, double qft, double pf) {
  require_scenario_shape(units, sc);
  if (!(qft >= 0.0)) throw ConfigError("contract quantity must be non-negative");
  const double sellable = own_capacity(units, sc);
  if (qft > sellable + 1e-9)
    throw InfeasibleError("contract quantity exceeds own capacity by " +
                              format_double(qft - sellable) + " MWh",
                          qft - sellable);

  const std::size_t n = units.size();
  const double dr = std::max(0.0, sc.demand - qft);
  const BigMBounds bounds = big_m_bounds(sc);

  const auto finish = [&](std::vector<double> fut, ClearingOutcome out) {
    AllocationSolution sol;
    KahanSum commit_cost;
    for (std::size_t i = 0; i < n; ++i) commit_cost += sc.cost[i] * fut[i];
    sol.profit_futures = pf * qft - commit_cost.value();
    KahanSum spot;
    for (std::size_t i = 0; i < n; ++i)
      if (units[i].owner == Owner::strategic)
        spot += (out.price - sc.cost[i]) * out.dispatch[i];
    sol.profit_spot = spot.value();
    sol.profit = sol.profit_futures + sol.profit_spot;
    sol.futures = std::move(fut);
    sol.outcome = std::move(out);
    return sol;
  };

  if (dr == 0.0) {
    // The commitment absorbs all demand: no dispatch, and the commitment is
    // cheapest-first since the spot side cannot react.
    std::vector<double> fut = cheapest_fill(units, sc, qft);
    ClearingOutcome out;
    out.dispatch.assign(n, 0.0);
    out.dual_min.assign(n, 0.0);
    out.dual_max.assign(n, 0.0);
    out.residual_demand = 0.0;
    double floor = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (sc.capacity[i] - fut[i] > 0.0) floor = std::min(floor, sc.cost[i]);
    out.price = floor;
    for (std::size_t i = 0; i < n; ++i) {
      out.dual_min[i] = std::max(0.0, sc.cost[i] - out.price);
      if (sc.capacity[i] - fut[i] <= 0.0)
        out.dual_max[i] = std::max(0.0, out.price - sc.cost[i]);
    }
    AllocationSolution sol = finish(std::move(fut), std::move(out));
    const KktReport kkt = kkt_residuals(
        strategic_problem(units, sc, sol.futures, qft), sol.outcome);
    if (kkt.max_residual() > kCheckTol)
      throw std::logic_error("degenerate pattern failed optimality validation");
    return sol;
  }

  AllocationSolution best;
  bool have = false;

  for (std::size_t m = 0; m < n; ++m) {
    const double cm = sc.cost[m];
    std::vector<std::size_t> forced_full, forced_zero, tied;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == m) continue;
      if (sc.cost[j] < cm) forced_full.push_back(j);
      else if (sc.cost[j] > cm) forced_zero.push_back(j);
      else tied.push_back(j);
    }
    if (tied.size() > 20)
      throw ConfigError("too many exact cost ties for pattern enumeration");

    for (std::uint64_t mask = 0; mask < (1ull << tied.size()); ++mask) {
      std::vector<std::size_t> full = forced_full, zero = forced_zero;
      for (std::size_t t = 0; t < tied.size(); ++t)
        (mask >> t & 1 ? full : zero).push_back(tied[t]);

      KahanSum full_cap_sum, full_own_sum, zero_own_sum;
      for (const std::size_t j : full) {
        full_cap_sum += sc.capacity[j];
        if (units[j].owner == Owner::strategic) full_own_sum += sc.capacity[j];
      }
      for (const std::size_t j : zero)
        if (units[j].owner == Owner::strategic) zero_own_sum += sc.capacity[j];
      const double cbf = full_cap_sum.value();
      const double xmax = full_own_sum.value();
      const double ym =
          units[m].owner == Owner::strategic ? sc.capacity[m] : 0.0;

      const double g = std::min({qft, xmax + ym, cbf + sc.capacity[m] - dr});
      if (g < 0.0) continue;
      const double x = std::min(xmax, g);
      if (!(x > cbf - dr)) continue;  // the marginal unit must be reached
      const double overflow = qft - g;
      if (overflow > zero_own_sum.value() + kMassTol) continue;

      // Commitment split: zero-premium mass on the dispatched side and the
      // marginal unit, the overflow on the cheapest undispatched own units.
      std::vector<std::size_t> full_own, zero_own;
      for (const std::size_t j : full)
        if (units[j].owner == Owner::strategic) full_own.push_back(j);
      for (const std::size_t j : zero)
        if (units[j].owner == Owner::strategic) zero_own.push_back(j);
      const auto by_cost_id = [&](std::size_t a, std::size_t b) {
        if (sc.cost[a] != sc.cost[b]) return sc.cost[a] < sc.cost[b];
        return units[a].id < units[b].id;
      };
      std::sort(full_own.begin(), full_own.end(), by_cost_id);
      std::sort(zero_own.begin(), zero_own.end(), by_cost_id);

      std::vector<double> fut(n, 0.0);
      fill_in_order(full_own, sc, x, fut);
      if (ym > 0.0) fut[m] = std::min(ym, g - x);
      KahanSum placed;
      for (const double v : fut) placed += v;
      if (fill_in_order(zero_own, sc, qft - placed.value(), fut) > kMassTol)
        continue;

      // Dispatch and multipliers follow from the pattern alone.
      ClearingOutcome out;
      out.dispatch.assign(n, 0.0);
      out.dual_min.assign(n, 0.0);
      out.dual_max.assign(n, 0.0);
      out.price = cm;
      out.residual_demand = dr;
      out.marginal_unit = m;
      KahanSum served;
      for (const std::size_t j : full) {
        out.dispatch[j] = std::max(0.0, sc.capacity[j] - fut[j]);
        out.dual_max[j] = std::max(0.0, cm - sc.cost[j]);
        served += out.dispatch[j];
      }
      for (const std::size_t j : zero)
        out.dual_min[j] = std::max(0.0, sc.cost[j] - cm);
      const double cap_m_eff = std::max(0.0, sc.capacity[m] - fut[m]);
      const double qm = dr - served.value();
      if (!(qm > 0.0) || qm > cap_m_eff + kCheckTol) continue;
      out.dispatch[m] = std::min(qm, cap_m_eff);

      for (std::size_t j = 0; j < n; ++j) {
        const double avail = std::max(0.0, sc.capacity[j] - fut[j]);
        if (out.dispatch[j] > bounds.primal + kCheckTol ||
            avail - out.dispatch[j] > bounds.primal + kCheckTol ||
            out.dual_min[j] > bounds.dual + kCheckTol ||
            out.dual_max[j] > bounds.dual + kCheckTol)
          throw std::logic_error("pattern violates linearization bounds");
      }
      const KktReport kkt =
          kkt_residuals(strategic_problem(units, sc, fut, qft), out);
      if (kkt.max_residual() > kCheckTol)
        throw std::logic_error("pattern leaf failed optimality validation");

      AllocationSolution sol = finish(std::move(fut), std::move(out));
      if (!have || better(sol, best)) {
        best = std::move(sol);
        have = true;
      }
    }
  }

  if (!have)
    throw InfeasibleError("no dispatch pattern clears the residual demand",
                          dr);
  return best;
}

double linear_identity_residual(const std::vector<UnitSpec>& units,
                                const Scenario& sc,
                                const AllocationSolution& sol) {
  require_scenario_shape(units, sc);
  const ClearingOutcome& out = sol.outcome;
  KahanSum own_dispatch, rival_cost, rival_bound;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].owner == Owner::strategic) {
      own_dispatch += out.dispatch[i];
    } else {
      rival_cost += sc.cost[i] * out.dispatch[i];
      rival_bound += out.dual_max[i] * sc.capacity[i];
    }
  }
  const double lhs = out.price * own_dispatch.value();
  const double rhs = -rival_cost.value() - rival_bound.value() +
                     out.price * out.residual_demand;
  return std::abs(lhs - rhs);
}

}  // namespace salesmix
