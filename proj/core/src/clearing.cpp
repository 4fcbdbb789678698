#include "salesmix/clearing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"

namespace salesmix {

namespace {

constexpr double kFeasTol = 1e-6;

}  // namespace

std::vector<std::size_t> merit_order(const DispatchProblem& p) {
  std::vector<std::size_t> order(p.cost.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ra = p.owners[a] == Owner::strategic ? 0 : 1;
    const int rb = p.owners[b] == Owner::strategic ? 0 : 1;
    return std::tie(p.cost[a], ra, p.ids[a]) <
           std::tie(p.cost[b], rb, p.ids[b]);
  });
  return order;
}

ClearingOutcome merit_order_dispatch(const DispatchProblem& p) {
  const std::size_t n = p.cost.size();
  ClearingOutcome out;
  out.dispatch.assign(n, 0.0);
  out.dual_min.assign(n, 0.0);
  out.dual_max.assign(n, 0.0);
  out.residual_demand = std::max(0.0, p.demand);

  double remaining = out.residual_demand;
  std::optional<std::size_t> last;
  for (const std::size_t i : merit_order(p)) {
    if (remaining <= 0.0) break;
    if (p.capacity[i] <= 0.0) continue;
    const double take = std::min(p.capacity[i], remaining);
    out.dispatch[i] = take;
    remaining -= take;
    last = i;
  }
  if (remaining > kFeasTol)
    throw InfeasibleError("demand exceeds offered capacity by " +
                              format_double(remaining) + " MWh",
                          remaining);

  if (last) {
    out.price = p.cost[*last];
    out.marginal_unit = last;
  } else {
    // Nothing dispatched: any price at or below every offered cost is an
    // exact dual; take the least negative such value, capped at zero.
    double floor = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (p.capacity[i] > 0.0) floor = std::min(floor, p.cost[i]);
    out.price = floor;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (p.capacity[i] <= 0.0) {
      out.dual_max[i] = std::max(0.0, out.price - p.cost[i]);
      out.dual_min[i] = std::max(0.0, p.cost[i] - out.price);
    } else if (out.dispatch[i] == p.capacity[i]) {
      out.dual_max[i] = std::max(0.0, out.price - p.cost[i]);
    } else if (out.dispatch[i] == 0.0) {
      out.dual_min[i] = std::max(0.0, p.cost[i] - out.price);
    }
  }
  return out;
}

DispatchProblem spot_problem(const std::vector<UnitSpec>& units,
                             const Scenario& sc) {
  DispatchProblem p;
  for (const UnitSpec& u : units) {
    p.ids.push_back(u.id);
    p.owners.push_back(u.owner);
  }
  p.cost = sc.cost;
  p.capacity = sc.capacity;
  p.demand = sc.demand;
  return p;
}

DispatchProblem naive_problem(const std::vector<UnitSpec>& units,
                              const Scenario& sc, double qft, double alpha) {
  DispatchProblem p = spot_problem(units, sc);
  p.demand = std::max(0.0, sc.demand - alpha * qft);
  const double committed = alpha * qft;
  if (committed > 0.0) {
    KahanSum total;
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i].owner == Owner::strategic) total += sc.capacity[i];
    const double scale =
        total.value() > 0.0 ? std::max(0.0, 1.0 - committed / total.value())
                            : 0.0;
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i].owner == Owner::strategic) p.capacity[i] *= scale;
  }
  return p;
}

ClearingOutcome naive_clearing(const std::vector<UnitSpec>& units,
                               const Scenario& sc, double qft, double alpha) {
  return merit_order_dispatch(naive_problem(units, sc, qft, alpha));
}

DispatchProblem strategic_problem(const std::vector<UnitSpec>& units,
                                  const Scenario& sc,
                                  const std::vector<double>& futures,
                                  double qft) {
  DispatchProblem p = spot_problem(units, sc);
  p.demand = std::max(0.0, sc.demand - qft);
  for (std::size_t i = 0; i < units.size(); ++i)
    p.capacity[i] = std::max(0.0, p.capacity[i] - futures[i]);
  return p;
}

ClearingOutcome strategic_clearing(const std::vector<UnitSpec>& units,
                                   const Scenario& sc,
                                   const std::vector<double>& futures) {
  KahanSum qft;
  for (const double q : futures) qft += q;
  return merit_order_dispatch(strategic_problem(units, sc, futures, qft.value()));
}

double KktReport::max_residual() const {
  return std::max({stationarity, complementarity, balance});
}

KktReport kkt_residuals(const DispatchProblem& p, const ClearingOutcome& out) {
  KktReport r;
  KahanSum served;
  for (std::size_t i = 0; i < p.cost.size(); ++i) {
    served += out.dispatch[i];
    const double stat =
        p.cost[i] - out.price + out.dual_max[i] - out.dual_min[i];
    r.stationarity = std::max(r.stationarity, std::abs(stat));
    const double slack_min = out.dual_min[i] * out.dispatch[i];
    const double slack_max = out.dual_max[i] * (p.capacity[i] - out.dispatch[i]);
    r.complementarity =
        std::max({r.complementarity, std::abs(slack_min), std::abs(slack_max)});
  }
  r.balance = std::abs(served.value() - std::max(0.0, p.demand));
  return r;
}

}  // namespace salesmix
