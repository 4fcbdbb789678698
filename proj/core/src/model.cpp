#include "salesmix/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"

namespace salesmix {

using nlohmann::json;

bool is_renewable(Technology t) {
  return t == Technology::wind || t == Technology::solar;
}

bool has_fuel_cost_uncertainty(Technology t) {
  return t == Technology::coal || t == Technology::gas;
}

std::string_view to_string(Owner o) {
  return o == Owner::strategic ? "strategic" : "rival";
}

std::string_view to_string(Technology t) {
  switch (t) {
    case Technology::nuclear: return "nuclear";
    case Technology::wind: return "wind";
    case Technology::solar: return "solar";
    case Technology::coal: return "coal";
    case Technology::gas: return "gas";
  }
  return "?";
}

Owner owner_from_string(std::string_view s) {
  if (s == "strategic") return Owner::strategic;
  if (s == "rival") return Owner::rival;
  throw ConfigError("unknown owner: '" + std::string(s) + "'");
}

Technology technology_from_string(std::string_view s) {
  if (s == "nuclear") return Technology::nuclear;
  if (s == "wind") return Technology::wind;
  if (s == "solar") return Technology::solar;
  if (s == "coal") return Technology::coal;
  if (s == "gas") return Technology::gas;
  throw ConfigError("unknown technology: '" + std::string(s) + "'");
}

namespace {

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (const char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

}  // namespace

std::vector<std::string> validate_system(const SystemConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.units.empty()) v.push_back("unit list is empty");

  std::set<std::string> seen;
  int strategic = 0, rival = 0;
  for (const UnitSpec& u : cfg.units) {
    const std::string tag = "unit '" + u.id + "': ";
    if (!valid_id(u.id))
      v.push_back("unit id '" + u.id + "' is empty or not [A-Za-z0-9_-]");
    if (!seen.insert(u.id).second)
      v.push_back("duplicate unit id '" + u.id + "'");
    (u.owner == Owner::strategic ? strategic : rival)++;
    if (u.cost_mean < 0) v.push_back(tag + "cost_mean < 0");
    if (u.cost_sd < 0) v.push_back(tag + "cost_sd < 0");
    if (u.cap_mean <= 0) v.push_back(tag + "cap_mean must be > 0");
    if (u.cap_sd < 0) v.push_back(tag + "cap_sd < 0");
    if (u.cap_sd > 0 && !is_renewable(u.tech))
      v.push_back(tag + "cap_sd > 0 is only meaningful for wind/solar");
    if (u.cost_sd > 1e-3 && !has_fuel_cost_uncertainty(u.tech))
      v.push_back(tag + "cost_sd above placeholder scale on a technology "
                        "without fuel cost uncertainty");
  }
  if (!cfg.units.empty()) {
    if (strategic == 0) v.push_back("no strategic unit");
    if (rival == 0) v.push_back("no rival unit");
  }

  if (!(cfg.demand_mean > 0)) v.push_back("demand_mean must be > 0");
  if (cfg.demand_sd < 0) v.push_back("demand_sd < 0");
  if (!(cfg.alpha > 0) || cfg.alpha > 1)
    v.push_back("alpha must be in (0, 1]");
  if (cfg.n_scenarios < 1) v.push_back("n_scenarios must be >= 1");
  if (cfg.qft_grid.empty()) v.push_back("qft_grid is empty");
  for (std::size_t i = 0; i < cfg.qft_grid.size(); ++i) {
    if (cfg.qft_grid[i] < 0) {
      v.push_back("qft_grid has a negative entry");
      break;
    }
    if (i > 0 && cfg.qft_grid[i] <= cfg.qft_grid[i - 1]) {
      v.push_back("qft_grid is not strictly increasing");
      break;
    }
  }
  if (!(cfg.cvar_level > 0) || cfg.cvar_level > 1)
    v.push_back("cvar_level must be in (0, 1]");
  if (cfg.lambda_risk < 0 || cfg.lambda_risk > 1)
    v.push_back("lambda_risk must be in [0, 1]");
  return v;
}

void require_valid(const SystemConfig& cfg) {
  const auto v = validate_system(cfg);
  if (v.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

SystemConfig benchmark_config() {
  SystemConfig cfg;
  cfg.demand_mean = 19000.0;
  cfg.demand_sd = 3800.0;
  cfg.alpha = 1.0;
  cfg.n_scenarios = 300;
  cfg.seed = 7;
  for (double q = 0.0; q <= 3000.0; q += 125.0) cfg.qft_grid.push_back(q);
  cfg.cvar_level = 0.05;
  cfg.lambda_risk = 0.5;

  const auto S = Owner::strategic;
  const auto R = Owner::rival;
  using T = Technology;
  // id, owner, tech, cost_mean, cost_sd, cap_mean, cap_sd
  cfg.units = {
      {"i1", S, T::nuclear, 1e-3, 1e-6, 1250.0, 0.0},
      {"j1", R, T::nuclear, 1e-3, 1e-6, 3750.0, 0.0},
      {"i2", S, T::wind, 1e-3, 1e-6, 692.64, 207.792},
      {"i3", S, T::wind, 1e-3, 1e-6, 692.64, 207.792},
      {"j2", R, T::wind, 1e-3, 1e-6, 2077.92, 623.376},
      {"j3", R, T::wind, 1e-3, 1e-6, 2077.92, 623.376},
      {"i4", S, T::solar, 1e-3, 1e-6, 353.07, 105.921},
      {"j4", R, T::solar, 1e-3, 1e-6, 1059.22, 317.766},
      {"j5", R, T::coal, 32.99, 1.649, 1500.0, 0.0},
      {"i5", S, T::coal, 36.64, 1.832, 500.0, 0.0},
      {"j6", R, T::coal, 39.78, 1.989, 1500.0, 0.0},
      {"i6", S, T::coal, 41.67, 2.083, 500.0, 0.0},
      {"j7", R, T::gas, 43.43, 2.171, 9000.0, 0.0},
      {"i7", S, T::gas, 45.44, 2.272, 3000.0, 0.0},
      {"j8", R, T::gas, 48.83, 2.441, 9000.0, 0.0},
      {"i8", S, T::gas, 56.68, 2.834, 3000.0, 0.0},
  };
  return cfg;
}

namespace {

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config: missing field '" + key + "'");
  if (!j.at(key).is_number())
    throw ConfigError("config: field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config: missing field '" + key + "'");
  if (!j.at(key).is_string())
    throw ConfigError("config: field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
}

}  // namespace

SystemConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(j,
                      {"units", "demand_mean", "demand_sd", "alpha",
                       "n_scenarios", "seed", "qft_grid", "cvar_level",
                       "lambda_risk"},
                      "top level");

  SystemConfig cfg;
  cfg.demand_mean = require_number(j, "demand_mean");
  cfg.demand_sd = require_number(j, "demand_sd");
  cfg.alpha = require_number(j, "alpha");
  cfg.n_scenarios = static_cast<int>(require_number(j, "n_scenarios"));
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned())
    throw ConfigError("config: field 'seed' must be an unsigned integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.cvar_level = require_number(j, "cvar_level");
  cfg.lambda_risk = require_number(j, "lambda_risk");

  if (!j.contains("qft_grid") || !j.at("qft_grid").is_array())
    throw ConfigError("config: field 'qft_grid' must be an array");
  for (const auto& x : j.at("qft_grid")) {
    if (!x.is_number())
      throw ConfigError("config: qft_grid entries must be numbers");
    cfg.qft_grid.push_back(x.get<double>());
  }

  if (!j.contains("units") || !j.at("units").is_array())
    throw ConfigError("config: field 'units' must be an array");
  for (const auto& ju : j.at("units")) {
    if (!ju.is_object()) throw ConfigError("config: units entries must be objects");
    reject_unknown_keys(ju,
                        {"id", "owner", "tech", "cost_mean", "cost_sd",
                         "cap_mean", "cap_sd"},
                        "unit");
    UnitSpec u;
    u.id = require_string(ju, "id");
    u.owner = owner_from_string(require_string(ju, "owner"));
    u.tech = technology_from_string(require_string(ju, "tech"));
    u.cost_mean = require_number(ju, "cost_mean");
    u.cost_sd = require_number(ju, "cost_sd");
    u.cap_mean = require_number(ju, "cap_mean");
    u.cap_sd = require_number(ju, "cap_sd");
    cfg.units.push_back(std::move(u));
  }
  return cfg;
}

std::string config_to_json(const SystemConfig& cfg) {
  json j;
  j["demand_mean"] = cfg.demand_mean;
  j["demand_sd"] = cfg.demand_sd;
  j["alpha"] = cfg.alpha;
  j["n_scenarios"] = cfg.n_scenarios;
  j["seed"] = cfg.seed;
  j["qft_grid"] = cfg.qft_grid;
  j["cvar_level"] = cfg.cvar_level;
  j["lambda_risk"] = cfg.lambda_risk;
  j["units"] = json::array();
  for (const UnitSpec& u : cfg.units) {
    json ju;
    ju["id"] = u.id;
    ju["owner"] = std::string(to_string(u.owner));
    ju["tech"] = std::string(to_string(u.tech));
    ju["cost_mean"] = u.cost_mean;
    ju["cost_sd"] = u.cost_sd;
    ju["cap_mean"] = u.cap_mean;
    ju["cap_sd"] = u.cap_sd;
    j["units"].push_back(ju);
  }
  return j.dump(2) + "\n";
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file: " + path);
  return config_from_json(ss.str());
}

void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << config_to_json(cfg);
  if (!out.flush()) throw IoError("cannot write: " + path);
}

std::string config_digest(const SystemConfig& cfg) {
  const std::string canon = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (const unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace salesmix
