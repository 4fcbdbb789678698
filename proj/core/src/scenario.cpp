#include "salesmix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"

namespace salesmix {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Standard-normal stream derived from (seed, label).  Streams with distinct
// labels never share generator state, so draws for one quantity are stable
// under changes to any other quantity.  The Box-Muller transform is applied
// to uniforms built directly from mt19937_64 words, keeping the sequence
// independent of the standard library's distribution implementations.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::string_view label)
      : rng_(splitmix64(seed ^ splitmix64(fnv1a64(label)))) {}

  double next() {
    const double u1 = ((rng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (rng_() >> 11) * 0x1.0p-53;        // [0, 1)
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 rng_;
};

void require_factors(const VariabilityFactors& f) {
  if (!(f.demand > 0) || !(f.renewable > 0) || !(f.fuel_cost > 0))
    throw ConfigError("variability factors must be strictly positive");
}

}  // namespace

ScenarioSet generate_scenarios(const SystemConfig& cfg,
                               const VariabilityFactors& factors) {
  require_valid(cfg);
  require_factors(factors);

  const std::size_t n = cfg.units.size();
  const std::size_t count = static_cast<std::size_t>(cfg.n_scenarios);

  ScenarioSet set;
  set.provenance = {cfg.seed, config_digest(cfg), factors};
  for (const UnitSpec& u : cfg.units) set.unit_ids.push_back(u.id);

  set.scenarios.resize(count);
  const double prob = 1.0 / static_cast<double>(count);
  for (std::size_t w = 0; w < count; ++w) {
    Scenario& sc = set.scenarios[w];
    sc.index = w;
    sc.probability = prob;
    sc.capacity.assign(n, 0.0);
    sc.cost.assign(n, 0.0);
  }

  {
    NormalStream demand(cfg.seed, "demand");
    for (std::size_t w = 0; w < count; ++w)
      set.scenarios[w].demand = std::max(
          0.0, cfg.demand_mean + cfg.demand_sd * factors.demand * demand.next());
  }

  // One shared deviate per scenario for all wind units.
  std::vector<double> wind_z(count);
  {
    NormalStream wind(cfg.seed, "wind");
    for (std::size_t w = 0; w < count; ++w) wind_z[w] = wind.next();
  }

  for (std::size_t u = 0; u < n; ++u) {
    const UnitSpec& spec = cfg.units[u];

    if (spec.tech == Technology::wind) {
      for (std::size_t w = 0; w < count; ++w)
        set.scenarios[w].capacity[u] = std::max(
            0.0, spec.cap_mean + spec.cap_sd * factors.renewable * wind_z[w]);
    } else if (spec.tech == Technology::solar) {
      NormalStream cap(cfg.seed, "capacity:" + spec.id);
      for (std::size_t w = 0; w < count; ++w)
        set.scenarios[w].capacity[u] = std::max(
            0.0, spec.cap_mean + spec.cap_sd * factors.renewable * cap.next());
    } else {
      for (std::size_t w = 0; w < count; ++w)
        set.scenarios[w].capacity[u] = spec.cap_mean;
    }

    const double cost_scale =
        has_fuel_cost_uncertainty(spec.tech) ? factors.fuel_cost : 1.0;
    NormalStream cost(cfg.seed, "cost:" + spec.id);
    for (std::size_t w = 0; w < count; ++w)
      set.scenarios[w].cost[u] =
          spec.cost_mean + spec.cost_sd * cost_scale * cost.next();
  }

  return set;
}

Scenario mean_value_scenario(const SystemConfig& cfg) {
  require_valid(cfg);
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.demand = cfg.demand_mean;
  for (const UnitSpec& u : cfg.units) {
    sc.capacity.push_back(u.cap_mean);
    sc.cost.push_back(u.cost_mean);
  }
  return sc;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string sidecar_path(const std::string& csv_path) {
  return csv_path + ".meta.json";
}

}  // namespace

void save_scenarios(const ScenarioSet& set, const std::string& csv_path) {
  std::ostringstream out;
  out << "omega,prob,demand";
  for (const auto& id : set.unit_ids) out << ",Q_" << id;
  for (const auto& id : set.unit_ids) out << ",c_" << id;
  out << '\n';
  for (const Scenario& sc : set.scenarios) {
    out << sc.index << ',' << format_double(sc.probability) << ','
        << format_double(sc.demand);
    for (const double q : sc.capacity) out << ',' << format_double(q);
    for (const double c : sc.cost) out << ',' << format_double(c);
    out << '\n';
  }

  std::ofstream f(csv_path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + csv_path);
  f << out.str();
  if (!f.flush()) throw IoError("cannot write: " + csv_path);

  json meta;
  meta["seed"] = set.provenance.seed;
  meta["config_digest"] = set.provenance.config_digest;
  meta["factors"]["demand"] = set.provenance.factors.demand;
  meta["factors"]["renewable"] = set.provenance.factors.renewable;
  meta["factors"]["fuel_cost"] = set.provenance.factors.fuel_cost;
  std::ofstream mf(sidecar_path(csv_path), std::ios::binary);
  if (!mf) throw IoError("cannot open for writing: " + sidecar_path(csv_path));
  mf << meta.dump(2) << '\n';
  if (!mf.flush()) throw IoError("cannot write: " + sidecar_path(csv_path));
}

ScenarioSet load_scenarios(const std::string& csv_path) {
  std::ifstream f(csv_path, std::ios::binary);
  if (!f) throw IoError("cannot open scenario file: " + csv_path);

  ScenarioSet set;

  std::string line;
  if (!std::getline(f, line))
    throw ParseError(csv_path + ": row 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "omega" || header[1] != "prob" ||
      header[2] != "demand")
    throw ParseError(csv_path + ": row 1: header must start with omega,prob,demand");
  const std::size_t rest = header.size() - 3;
  if (rest % 2 != 0)
    throw ParseError(csv_path + ": row 1: capacity/cost column count mismatch");
  const std::size_t n = rest / 2;
  for (std::size_t u = 0; u < n; ++u) {
    const std::string& qcol = header[3 + u];
    const std::string& ccol = header[3 + n + u];
    if (qcol.rfind("Q_", 0) != 0)
      throw ParseError(csv_path + ": row 1, column " + std::to_string(4 + u) +
                       ": expected Q_<id>, got '" + qcol + "'");
    const std::string id = qcol.substr(2);
    if (ccol != "c_" + id)
      throw ParseError(csv_path + ": row 1, column " +
                       std::to_string(4 + n + u) + ": expected c_" + id +
                       ", got '" + ccol + "'");
    set.unit_ids.push_back(id);
  }

  std::size_t row = 1;
  KahanSum prob_sum;
  while (std::getline(f, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where_row = csv_path + ": row " + std::to_string(row);
    if (fields.size() != 3 + 2 * n)
      throw ParseError(where_row + ": expected " + std::to_string(3 + 2 * n) +
                       " fields, got " + std::to_string(fields.size()));
    auto where = [&](std::size_t col) {
      return where_row + ", column " + std::to_string(col + 1);
    };
    Scenario sc;
    const double omega = parse_double(fields[0], where(0));
    sc.index = static_cast<std::size_t>(omega);
    if (static_cast<double>(sc.index) != omega ||
        sc.index != set.scenarios.size())
      throw ParseError(where(0) + ": omega must count up from 0");
    sc.probability = parse_double(fields[1], where(1));
    if (!(sc.probability > 0))
      throw ParseError(where(1) + ": probability must be > 0");
    sc.demand = parse_double(fields[2], where(2));
    if (sc.demand < 0) throw ParseError(where(2) + ": negative demand");
    for (std::size_t u = 0; u < n; ++u) {
      const double q = parse_double(fields[3 + u], where(3 + u));
      if (q < 0) throw ParseError(where(3 + u) + ": negative capacity");
      sc.capacity.push_back(q);
    }
    for (std::size_t u = 0; u < n; ++u)
      sc.cost.push_back(parse_double(fields[3 + n + u], where(3 + n + u)));
    prob_sum += sc.probability;
    set.scenarios.push_back(std::move(sc));
  }
  if (set.scenarios.empty())
    throw ParseError(csv_path + ": no scenario rows");
  if (std::abs(prob_sum.value() - 1.0) > 1e-9)
    throw ParseError(csv_path + ": probabilities sum to " +
                     format_double(prob_sum.value()) + ", expected 1");

  const std::string mpath = sidecar_path(csv_path);
  std::ifstream mf(mpath, std::ios::binary);
  if (!mf) throw IoError("cannot open provenance sidecar: " + mpath);
  json meta;
  try {
    meta = json::parse(mf);
    set.provenance.seed = meta.at("seed").get<std::uint64_t>();
    set.provenance.config_digest = meta.at("config_digest").get<std::string>();
    set.provenance.factors.demand = meta.at("factors").at("demand").get<double>();
    set.provenance.factors.renewable =
        meta.at("factors").at("renewable").get<double>();
    set.provenance.factors.fuel_cost =
        meta.at("factors").at("fuel_cost").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(mpath + ": bad provenance sidecar: " + e.what());
  }
  return set;
}

}  // namespace salesmix
