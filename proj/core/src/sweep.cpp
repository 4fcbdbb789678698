#include "salesmix/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "salesmix/clearing.hpp"
#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"
#include "salesmix/risk.hpp"

namespace salesmix {

namespace {

void require_matching(const SystemConfig& cfg, const ScenarioSet& set) {
  if (set.scenarios.empty()) throw ConfigError("scenario set is empty");
  if (set.unit_ids.size() != cfg.units.size())
    throw ConfigError("scenario set does not match the configuration unit list");
  for (std::size_t i = 0; i < cfg.units.size(); ++i)
    if (set.unit_ids[i] != cfg.units[i].id)
      throw ConfigError("scenario set unit order differs from configuration (" +
                        set.unit_ids[i] + " vs " + cfg.units[i].id + ")");
  for (const Scenario& sc : set.scenarios)
    if (sc.capacity.size() != cfg.units.size() ||
        sc.cost.size() != cfg.units.size())
      throw ConfigError("scenario arrays do not match the unit list");
}

// Index-keyed parallel map: every call writes only to its own slot, so the
// result is independent of scheduling; all reductions happen afterwards in
// index order.
void parallel_for_index(std::size_t count, unsigned threads,
                        const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(drain);
  drain();
  for (std::thread& t : pool) t.join();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

constexpr const char* kFrontierHeader =
    "qft,pf,exp_spot_price,exp_profit,cvar_profit,nuc_spot,nuc_fut,"
    "ren_spot,ren_fut,conv_spot,conv_fut,infeasible";

}  // namespace

QftRange feasible_qft_range(const std::vector<UnitSpec>& units,
                            const ScenarioSet& set) {
  if (set.scenarios.empty()) throw ConfigError("scenario set is empty");
  QftRange range;
  range.hi = std::numeric_limits<double>::infinity();
  for (const Scenario& sc : set.scenarios) {
    KahanSum own;
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i].owner == Owner::strategic) own += sc.capacity[i];
    range.hi = std::min(range.hi, own.value());
  }
  return range;
}

std::pair<double, std::vector<double>> futures_price(
    const std::vector<UnitSpec>& units, const ScenarioSet& set, double qft,
    double alpha) {
  std::vector<double> prices(set.scenarios.size());
  for (std::size_t i = 0; i < set.scenarios.size(); ++i)
    prices[i] = naive_clearing(units, set.scenarios[i], qft, alpha).price;
  KahanSum pf;
  for (std::size_t i = 0; i < set.scenarios.size(); ++i)
    pf += set.scenarios[i].probability * prices[i];
  return {pf.value(), std::move(prices)};
}

TechnologyMix technology_mix(const std::vector<UnitSpec>& units,
                             const std::vector<AllocationSolution>& solutions,
                             const std::vector<double>& probabilities) {
  if (solutions.size() != probabilities.size())
    throw ConfigError("solutions and probabilities must be parallel");
  KahanSum spot[3], fut[3];  // nuclear, renewable, conventional
  for (std::size_t w = 0; w < solutions.size(); ++w) {
    const double p = probabilities[w];
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].owner != Owner::strategic) continue;
      const int g = units[i].tech == Technology::nuclear ? 0
                    : is_renewable(units[i].tech)        ? 1
                                                         : 2;
      spot[g] += p * solutions[w].outcome.dispatch[i];
      fut[g] += p * solutions[w].futures[i];
    }
  }
  TechnologyMix mix;
  mix.nuclear_spot = spot[0].value();
  mix.nuclear_futures = fut[0].value();
  mix.renewable_spot = spot[1].value();
  mix.renewable_futures = fut[1].value();
  mix.conventional_spot = spot[2].value();
  mix.conventional_futures = fut[2].value();
  return mix;
}

Frontier run_sweep(const SystemConfig& cfg, const ScenarioSet& set,
                   const SweepSettings& settings) {
  require_valid(cfg);
  require_matching(cfg, set);

  Frontier frontier;
  frontier.cvar_level = cfg.cvar_level;
  frontier.provenance = set.provenance;

  const QftRange range = feasible_qft_range(cfg.units, set);
  const std::size_t m = set.scenarios.size();
  std::vector<double> probabilities(m);
  for (std::size_t i = 0; i < m; ++i)
    probabilities[i] = set.scenarios[i].probability;

  for (const double qft : cfg.qft_grid) {
    SweepPoint pt;
    pt.qft = qft;

    if (qft < range.lo - 1e-9 || qft > range.hi + 1e-9) {
      pt.feasible = false;
      pt.diagnostic = "commitment of " + format_double(qft) +
                      " MWh exceeds the strategic capacity available in every "
                      "scenario (" +
                      format_double(range.hi) + " MWh)";
      frontier.points.push_back(std::move(pt));
      continue;
    }

    auto [pf, prices] = futures_price(cfg.units, set, qft, cfg.alpha);
    pt.futures_price = pf;
    pt.naive_prices = std::move(prices);

    std::vector<AllocationSolution> sols(m);
    std::vector<std::exception_ptr> errs(m);
    parallel_for_index(m, settings.threads, [&](std::size_t i) {
      try {
        sols[i] = optimize_allocation(cfg.units, set.scenarios[i], qft, pf);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    });

    for (std::size_t i = 0; i < m && pt.feasible; ++i) {
      if (!errs[i]) continue;
      try {
        std::rethrow_exception(errs[i]);
      } catch (const InfeasibleError& e) {
        pt.feasible = false;
        pt.diagnostic = "scenario " + std::to_string(i) + ": " + e.what();
      }
      // anything else propagates: it is a defect, not an infeasible point
    }
    if (!pt.feasible) {
      pt.naive_prices.clear();
      pt.futures_price = 0.0;
      frontier.points.push_back(std::move(pt));
      continue;
    }

    ProfitDistribution dist;
    dist.value.resize(m);
    dist.probability = probabilities;
    for (std::size_t i = 0; i < m; ++i) dist.value[i] = sols[i].profit;
    pt.expected_profit = expected(dist);
    pt.cvar_profit = cvar(dist, cfg.cvar_level);

    KahanSum esp;
    for (std::size_t i = 0; i < m; ++i)
      esp += probabilities[i] * sols[i].outcome.price;
    pt.expected_spot_price = esp.value();

    pt.mix = technology_mix(cfg.units, sols, probabilities);
    pt.solutions = std::move(sols);
    frontier.points.push_back(std::move(pt));
  }
  return frontier;
}

std::string frontier_csv(const Frontier& f) {
  std::ostringstream out;
  out << kFrontierHeader << '\n';
  for (const SweepPoint& pt : f.points) {
    out << format_double(pt.qft) << ',';
    if (!pt.feasible) {
      out << ",,,,,,,,,,1\n";
      continue;
    }
    out << format_double(pt.futures_price) << ','
        << format_double(pt.expected_spot_price) << ','
        << format_double(pt.expected_profit) << ','
        << format_double(pt.cvar_profit) << ','
        << format_double(pt.mix.nuclear_spot) << ','
        << format_double(pt.mix.nuclear_futures) << ','
        << format_double(pt.mix.renewable_spot) << ','
        << format_double(pt.mix.renewable_futures) << ','
        << format_double(pt.mix.conventional_spot) << ','
        << format_double(pt.mix.conventional_futures) << ",0\n";
  }
  return out.str();
}

void write_frontier_csv(const Frontier& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << frontier_csv(f);
  if (!out.flush()) throw IoError("cannot write: " + path);
}

std::string sweep_detail_csv(const Frontier& f,
                             const std::vector<UnitSpec>& units) {
  std::ostringstream out;
  out << "qft,omega,naive_price,residual_demand,spot_price,marginal,"
         "profit,profit_futures,profit_spot";
  for (const UnitSpec& u : units)
    if (u.owner == Owner::strategic) out << ",qf_" << u.id;
  for (const UnitSpec& u : units) out << ",q_" << u.id;
  out << '\n';
  for (const SweepPoint& pt : f.points) {
    if (!pt.feasible) continue;
    for (std::size_t w = 0; w < pt.solutions.size(); ++w) {
      const AllocationSolution& sol = pt.solutions[w];
      out << format_double(pt.qft) << ',' << w << ','
          << format_double(pt.naive_prices[w]) << ','
          << format_double(sol.outcome.residual_demand) << ','
          << format_double(sol.outcome.price) << ',';
      if (sol.outcome.marginal_unit) out << units[*sol.outcome.marginal_unit].id;
      out << ',' << format_double(sol.profit) << ','
          << format_double(sol.profit_futures) << ','
          << format_double(sol.profit_spot);
      for (std::size_t i = 0; i < units.size(); ++i)
        if (units[i].owner == Owner::strategic)
          out << ',' << format_double(sol.futures[i]);
      for (std::size_t i = 0; i < units.size(); ++i)
        out << ',' << format_double(sol.outcome.dispatch[i]);
      out << '\n';
    }
  }
  return out.str();
}

std::string frontier_plot_csv(const Frontier& f) {
  std::ostringstream out;
  out << "cvar_profit,exp_profit\n";
  for (const SweepPoint& pt : f.points) {
    if (!pt.feasible) continue;
    out << format_double(pt.cvar_profit) << ','
        << format_double(pt.expected_profit) << '\n';
  }
  return out.str();
}

std::vector<FrontierRow> read_frontier_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open frontier file: " + path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": row 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFrontierHeader)
    throw ParseError(path + ": row 1: unexpected header");

  std::vector<FrontierRow> rows;
  std::size_t rowno = 1;
  while (std::getline(f, line)) {
    ++rowno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where_row = path + ": row " + std::to_string(rowno);
    if (fields.size() != 12)
      throw ParseError(where_row + ": expected 12 fields, got " +
                       std::to_string(fields.size()));
    auto where = [&](std::size_t col) {
      return where_row + ", column " + std::to_string(col + 1);
    };
    FrontierRow row;
    row.qft = parse_double(fields[0], where(0));
    if (fields[11] == "1") {
      row.infeasible = true;
      for (std::size_t c = 1; c <= 10; ++c)
        if (!fields[c].empty())
          throw ParseError(where(c) + ": infeasible row must have empty fields");
    } else if (fields[11] == "0") {
      double* slots[10] = {&row.pf,        &row.exp_spot_price,
                           &row.exp_profit, &row.cvar_profit,
                           &row.nuc_spot,   &row.nuc_fut,
                           &row.ren_spot,   &row.ren_fut,
                           &row.conv_spot,  &row.conv_fut};
      for (std::size_t c = 1; c <= 10; ++c)
        *slots[c - 1] = parse_double(fields[c], where(c));
    } else {
      throw ParseError(where(11) + ": infeasible flag must be 0 or 1");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  return rows;
}

}  // namespace salesmix
