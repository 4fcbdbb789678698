// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "salesmix/cli.hpp"
#include "salesmix/clearing.hpp"
#include "salesmix/errors.hpp"
#include "salesmix/model.hpp"
#include "salesmix/mpec.hpp"
#include "salesmix/numeric.hpp"
#include "salesmix/risk.hpp"
#include "salesmix/scenario.hpp"
#include "salesmix/sweep.hpp"
#include "test_support.hpp"

using namespace salesmix;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name
            << " (" << detail << ")" << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const SweepPoint* point_at(const Frontier& f, double qft) {
  for (const SweepPoint& pt : f.points)
    if (pt.qft == qft && pt.feasible) return &pt;
  return nullptr;
}

double reldiff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

bool within(double value, double target, double tol_frac) {
  return std::abs(value - target) <= tol_frac * std::abs(target);
}

ProfitDistribution random_distribution(std::mt19937& rng) {
  std::uniform_real_distribution<double> value(-1e4, 1e4);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  std::uniform_int_distribution<int> size(1, 40);
  ProfitDistribution d;
  const int n = size(rng);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    d.value.push_back(value(rng));
    d.probability.push_back(weight(rng));
    total += d.probability.back();
  }
  for (double& p : d.probability) p /= total;
  return d;
}

}  // namespace

int main() {
  SystemConfig cfg = benchmark_config();
  cfg.qft_grid.clear();
  for (double q = 0.0; q <= 3000.0; q += 250.0) cfg.qft_grid.push_back(q);
  const std::size_t n_points = cfg.qft_grid.size();

  SweepSettings settings;
  settings.threads = 4;

  // ---- criterion 1: end-to-end benchmark sweep under 60 s on 4 threads ----
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioSet set = generate_scenarios(cfg);
  const Frontier frontier = run_sweep(cfg, set, settings);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "%.2f s for %zu grid points x %zu scenarios on 4 threads, "
                  "limit 60 s",
                  secs, n_points, set.scenarios.size());
    report(1, "benchmark sweep runtime", secs < 60.0, buf);
  }

  bool all_feasible = true;
  for (const SweepPoint& pt : frontier.points) all_feasible &= pt.feasible;

  // ---- criterion 2: anchor point statistics at qft = 0 ----
  {
    const SweepPoint* p0 = point_at(frontier, 0.0);
    const bool ok_profit =
        p0 != nullptr && within(p0->expected_profit, 121783.0, 0.05);
    const bool ok_spot =
        p0 != nullptr && within(p0->expected_spot_price, 39.49, 0.03);
    std::string detail = "grid point 0 infeasible";
    if (p0 != nullptr)
      detail = "E[profit](0)=" + fmt(p0->expected_profit) +
               " vs 121783 +/-5%, E[spot](0)=" +
               fmt(p0->expected_spot_price) + " vs 39.49 +/-3%";
    report(2, "expected profit and spot price at zero commitment",
           ok_profit && ok_spot, detail);
  }

  // ---- criterion 3: expected spot price constant over [0, 2250] ----
  {
    double lo = 0.0, hi = 0.0, base = 0.0;
    bool have = false, ok = true;
    for (const SweepPoint& pt : frontier.points) {
      if (pt.qft > 2250.0) break;
      if (!pt.feasible) {
        ok = false;
        break;
      }
      if (!have) {
        lo = hi = base = pt.expected_spot_price;
        have = true;
      }
      lo = std::min(lo, pt.expected_spot_price);
      hi = std::max(hi, pt.expected_spot_price);
    }
    const double spread = have && base > 0.0 ? (hi - lo) / base : 1.0;
    ok = ok && have && spread <= 0.01;
    report(3, "expected spot price constancy over [0, 2250]", ok,
           "max relative spread " + fmt(spread) + ", limit 0.01");
  }

  // ---- criterion 4: futures price shape and negative risk premium ----
  {
    bool monotone = all_feasible;
    for (std::size_t i = 1; i + 0 < frontier.points.size() && monotone; ++i)
      monotone = frontier.points[i].futures_price <=
                 frontier.points[i - 1].futures_price + 1e-9;
    const SweepPoint* p2250 = point_at(frontier, 2250.0);
    const bool band =
        p2250 != nullptr && within(p2250->futures_price, 36.46, 0.04);
    bool premium_neg = true;
    for (const SweepPoint& pt : frontier.points) {
      if (pt.qft < 250.0 || !pt.feasible) continue;
      premium_neg = premium_neg &&
                    risk_premium(pt.futures_price, pt.expected_spot_price) <
                        0.0;
    }
    std::string detail =
        std::string("monotone=") + (monotone ? "yes" : "no") +
        ", pf(2250)=" + (p2250 ? fmt(p2250->futures_price) : "n/a") +
        " vs 36.46 +/-4%, premium<0 for qft>=250: " +
        (premium_neg ? "yes" : "no");
    report(4, "futures price declines and risk premium is negative",
           monotone && band && premium_neg, detail);
  }

  // ---- criterion 5: CVaR rises to a unique interior peak, then declines ---
  {
    bool ok = all_feasible;
    std::string detail = "infeasible grid point";
    if (ok) {
      const std::vector<SweepPoint>& pts = frontier.points;
      std::size_t k = 0;
      std::size_t max_count = 0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].cvar_profit > pts[k].cvar_profit) k = i;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].cvar_profit == pts[k].cvar_profit) ++max_count;
      const double peak = pts[k].cvar_profit;
      const double slack = 1e-9 * std::max(1.0, std::abs(peak));
      const bool start_low =
          pts.front().cvar_profit <= 0.05 * pts.front().expected_profit;
      const bool unique = max_count == 1;
      const bool interior = k > 0 && k + 1 < pts.size() &&
                            pts[k].qft >= 1750.0 && pts[k].qft <= 2750.0;
      bool shape = true;
      for (std::size_t i = 1; i <= k; ++i)
        shape = shape && pts[i].cvar_profit >= pts[i - 1].cvar_profit - slack;
      for (std::size_t i = k + 1; i < pts.size(); ++i)
        shape = shape && pts[i].cvar_profit <= pts[i - 1].cvar_profit + slack;
      const bool band = within(peak, 77351.0, 0.10);
      ok = start_low && unique && interior && shape && band;
      detail = "CVaR(0)=" + fmt(pts.front().cvar_profit) + " vs cap " +
               fmt(0.05 * pts.front().expected_profit) + ", peak " +
               fmt(peak) + " at qft=" + fmt(pts[k].qft) +
               " vs 77351 +/-10% in [1750, 2750], unimodal=" +
               (shape && unique ? "yes" : "no");
    }
    report(5, "CVaR profile rises to a unique interior peak", ok, detail);
  }

  // ---- criterion 6: expected profit monotone nonincreasing ----
  {
    bool ok = all_feasible;
    double worst = 0.0;
    for (std::size_t i = 1; i < frontier.points.size(); ++i) {
      const double rise = frontier.points[i].expected_profit -
                          frontier.points[i - 1].expected_profit;
      worst = std::max(worst, rise);
      ok = ok && rise <= 1e-9 * std::max(1.0, std::abs(
                                                  frontier.points[i - 1]
                                                      .expected_profit));
    }
    report(6, "expected profit monotone nonincreasing", ok,
           "largest step increase " + fmt(worst));
  }

  // ---- criterion 7: exact solver vs exhaustive lattice oracle ----
  //
  // Two-sided agreement: the lattice search must never beat the exact
  // solver (beyond 1e-6 relative), and the solver's advantage over the
  // lattice must be explained by discretization alone -- bounded by 0.5%
  // of the instance's gross tradeable value |pf|*qft + cmax*(D+qft), an
  // upper bound on the absolute profit of any allocation.  Normalizing by
  // the realized profit itself is ill-posed: optimal profits can sit
  // arbitrarily close to zero while the lattice gap stays O(step).
  {
    std::mt19937 rng(20260818);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
      const testsupport::RandomSystem sys =
          testsupport::random_system(rng, 2 + trial % 2);
      const AllocationSolution opt =
          optimize_allocation(sys.units, sys.scenario, sys.qft, sys.pf);
      const AllocationSolution brute = brute_force_allocation(
          sys.units, sys.scenario, sys.qft, sys.pf, 200);
      double cmax = 0.0;
      for (const double c : sys.scenario.cost) cmax = std::max(cmax, c);
      const double scale = std::abs(sys.pf) * sys.qft +
                           cmax * (sys.scenario.demand + sys.qft);
      const double eps = 1e-6 * std::max(1.0, std::abs(brute.profit));
      const double gap = opt.profit - brute.profit;
      worst = std::max(worst, gap / std::max(1.0, scale));
      ok = ok && gap >= -eps && gap <= 0.005 * std::max(1.0, scale);
    }
    const auto toy_units = testsupport::two_unit_toy();
    const Scenario toy_sc = testsupport::scenario_for(toy_units, 150.0);
    const double opt_toy =
        optimize_allocation(toy_units, toy_sc, 50.0, 15.0).profit;
    const double brute_toy =
        brute_force_allocation(toy_units, toy_sc, 50.0, 15.0, 200).profit;
    const bool toy_ok = opt_toy == 1250.0 && brute_toy == 1250.0;
    report(7, "solver matches the exhaustive oracle",
           ok && toy_ok,
           "50 random systems, worst lattice shortfall " + fmt(worst) +
               " of gross value (limit 0.005), lattice never above solver; "
               "toy profits " + fmt(opt_toy) + "/" + fmt(brute_toy) +
               " (expect 1250/1250)");
  }

  // ---- criterion 8: optimality residuals and independent verifier ----
  {
    double worst_kkt = 0.0, worst_identity = 0.0;
    bool ok = all_feasible;
    for (const SweepPoint& pt : frontier.points) {
      if (!pt.feasible) continue;
      for (std::size_t w = 0; w < pt.solutions.size(); ++w) {
        const AllocationSolution& sol = pt.solutions[w];
        const KktReport kkt = kkt_residuals(
            strategic_problem(cfg.units, set.scenarios[w], sol.futures,
                              pt.qft),
            sol.outcome);
        worst_kkt = std::max(worst_kkt, kkt.max_residual());

        KahanSum ownq;
        for (std::size_t i = 0; i < cfg.units.size(); ++i)
          if (cfg.units[i].owner == Owner::strategic)
            ownq += sol.outcome.dispatch[i];
        const double scale =
            std::max(1.0, std::abs(sol.outcome.price * ownq.value()));
        const double res =
            linear_identity_residual(cfg.units, set.scenarios[w], sol) /
            scale;
        worst_identity = std::max(worst_identity, res);
      }
    }
    ok = ok && worst_kkt <= 1e-6 && worst_identity <= 1e-6;

    // Independent pattern verifier on 20 scenarios at 3 grid points.
    std::vector<std::size_t> idx(set.scenarios.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937 rng(7);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<std::size_t>(20, idx.size()));
    std::size_t mismatches = 0;
    const std::size_t picks[3] = {0, frontier.points.size() / 2,
                                  frontier.points.size() - 1};
    for (const std::size_t p : picks) {
      const SweepPoint& pt = frontier.points[p];
      if (!pt.feasible) {
        ++mismatches;
        continue;
      }
      for (const std::size_t w : idx) {
        const AllocationSolution ref = branch_verify(
            cfg.units, set.scenarios[w], pt.qft, pt.futures_price);
        const AllocationSolution& got = pt.solutions[w];
        const double tol = 1e-6 * std::max(1.0, std::abs(ref.profit));
        if (std::abs(ref.profit - got.profit) > tol ||
            std::abs(ref.outcome.price - got.outcome.price) > 1e-6)
          ++mismatches;
      }
    }
    ok = ok && mismatches == 0;
    report(8, "optimality residuals and independent verification", ok,
           "worst KKT " + fmt(worst_kkt) + ", worst relative identity " +
               fmt(worst_identity) + " (limits 1e-6), verifier mismatches " +
               std::to_string(mismatches) + "/60");
  }

  // ---- criterion 9: thread-count invariance and manifest reproduction ----
  {
    bool ok = true;
    std::string detail;
    try {
      testsupport::TempDir dir("salesmix_acceptance");
      const std::string cfg_path = dir.file("config.json");
      save_config(cfg, cfg_path);
      std::ostringstream log;

      SweepArgs serial;
      serial.config_path = cfg_path;
      serial.out_dir = dir.file("t1");
      serial.threads = 1;
      SweepArgs parallel = serial;
      parallel.out_dir = dir.file("t8");
      parallel.threads = 8;
      ok = cmd_sweep(serial, log) == kExitOk &&
           cmd_sweep(parallel, log) == kExitOk;
      const std::string f1 =
          testsupport::read_file(dir.file("t1") + "/frontier.csv");
      const std::string f8 =
          testsupport::read_file(dir.file("t8") + "/frontier.csv");
      const bool threads_equal = ok && !f1.empty() && f1 == f8;

      // Re-run from the recorded manifest alone.
      const RunManifest m = manifest_from_json(
          testsupport::read_file(dir.file("t1") + "/manifest.json"));
      SweepArgs redo;
      redo.config_path = m.config_path;
      redo.seed = m.seed;
      redo.alpha = m.alpha;
      redo.beta = m.beta;
      redo.threads = m.threads;
      redo.detail = m.detail;
      redo.out_dir = dir.file("redo");
      const bool redo_ok = cmd_sweep(redo, log) == kExitOk;
      const bool manifest_equal =
          redo_ok &&
          f1 == testsupport::read_file(dir.file("redo") + "/frontier.csv");

      ok = threads_equal && manifest_equal;
      detail = std::string("threads 1 vs 8 byte-identical: ") +
               (threads_equal ? "yes" : "no") +
               ", manifest re-run byte-identical: " +
               (manifest_equal ? "yes" : "no");
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    report(9, "determinism across threads and manifest re-runs", ok, detail);
  }

  // ---- criterion 10: sensitivity orderings with common random numbers ----
  {
    bool ok = true;
    std::string detail;
    try {
      const auto run_with = [&](const VariabilityFactors& f) {
        return run_sweep(cfg, generate_scenarios(cfg, f), settings);
      };
      const Frontier d08 = run_with({0.8, 1.0, 1.0});
      const Frontier d12 = run_with({1.2, 1.0, 1.0});
      const SweepPoint* a = point_at(d08, 2250.0);
      const SweepPoint* b = point_at(frontier, 2250.0);
      const SweepPoint* c = point_at(d12, 2250.0);
      const bool demand_ok = a && b && c &&
                             a->cvar_profit >= b->cvar_profit - 1e-9 &&
                             b->cvar_profit >= c->cvar_profit - 1e-9;

      const Frontier c08 = run_with({1.0, 1.0, 0.8});
      const Frontier c12 = run_with({1.0, 1.0, 1.2});
      bool cost_ok = c08.points.size() == frontier.points.size() &&
                     c12.points.size() == frontier.points.size();
      double worst = 0.0;
      for (std::size_t i = 0; cost_ok && i < frontier.points.size(); ++i) {
        const SweepPoint& base = frontier.points[i];
        const SweepPoint& lo = c08.points[i];
        const SweepPoint& hi = c12.points[i];
        cost_ok = base.feasible && lo.feasible && hi.feasible;
        if (!cost_ok) break;
        worst = std::max({worst,
                          reldiff(lo.expected_profit, base.expected_profit),
                          reldiff(hi.expected_profit, base.expected_profit),
                          reldiff(lo.expected_profit, hi.expected_profit)});
      }
      cost_ok = cost_ok && worst < 0.02;

      ok = demand_ok && cost_ok;
      detail = std::string("demand CVaR(2250) ordering 0.8>=1.0>=1.2: ") +
               (demand_ok ? "yes" : "no") +
               ", cost-run expected-profit worst gap " + fmt(worst) +
               " (limit 0.02)";
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    report(10, "sensitivity orderings under common random numbers", ok,
           detail);
  }

  // ---- criterion 11: risk layer property tests ----
  {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      const ProfitDistribution d = random_distribution(rng);
      const double mean = expected(d);
      const double b1 = 0.05 + 0.90 * unit01(rng);
      const double b2 = b1 + (1.0 - b1) * unit01(rng);
      const double c1 = cvar(d, b1);
      const double c2 = cvar(d, b2);
      ok = ok && c1 <= mean + 1e-9;                      // tail below mean
      ok = ok && c1 <= c2 + 1e-9;                       // nondecreasing in beta
      ok = ok && std::abs(cvar(d, 1.0) - mean) <= 1e-9 * std::max(1.0, std::abs(mean));

      const double v = -1e4 + 2e4 * unit01(rng);        // point mass identity
      ok = ok && cvar({{v}, {1.0}}, b1) == v;

      ProfitDistribution shuffled = d;                  // permutation invariance
      std::vector<std::size_t> idx(d.value.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        shuffled.value[i] = d.value[idx[i]];
        shuffled.probability[i] = d.probability[idx[i]];
      }
      ok = ok && std::abs(cvar(shuffled, b1) - c1) <=
                     1e-9 * std::max(1.0, std::abs(c1));
    }
    report(11, "risk measure property tests", ok,
           ok ? "1000 randomized distributions passed"
              : "property violated; see code for the failing class");
  }

  if (failures != 0)
    std::cout << failures << " criterion(s) failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
