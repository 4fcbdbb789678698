#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace salesmix {

enum class Owner { strategic, rival };

enum class Technology { nuclear, wind, solar, coal, gas };

// Wind and solar have uncertain capacity and (near-)zero marginal cost.
bool is_renewable(Technology t);

// Coal and gas carry fuel-price uncertainty on their marginal cost.
bool has_fuel_cost_uncertainty(Technology t);

std::string_view to_string(Owner o);
std::string_view to_string(Technology t);
Owner owner_from_string(std::string_view s);            // throws ConfigError
Technology technology_from_string(std::string_view s);  // throws ConfigError

struct UnitSpec {
  std::string id;
  Owner owner = Owner::rival;
  Technology tech = Technology::gas;
  double cost_mean = 0.0;  // EUR/MWh
  double cost_sd = 0.0;    // EUR/MWh
  double cap_mean = 0.0;   // MWh per scenario period
  double cap_sd = 0.0;     // MWh per scenario period

  bool operator==(const UnitSpec&) const = default;
};

struct SystemConfig {
  std::vector<UnitSpec> units;
  double demand_mean = 0.0;  // MWh per scenario period
  double demand_sd = 0.0;
  // Share of the futures commitment subtracted from demand in the naive
  // (pre-commitment) clearing used to price the futures contract.
  double alpha = 1.0;
  int n_scenarios = 0;
  std::uint64_t seed = 0;
  std::vector<double> qft_grid;  // futures commitments to sweep, MWh
  double cvar_level = 0.05;      // lower-tail mass for CVaR
  double lambda_risk = 0.5;      // weight on expected profit in selection

  bool operator==(const SystemConfig&) const = default;
};

// Every violated rule as one human-readable string; empty means valid.
std::vector<std::string> validate_system(const SystemConfig& cfg);

// Throws ConfigError listing all violations if the config is invalid.
void require_valid(const SystemConfig& cfg);

// The 16-unit reference system bundled with the tool (also shipped as
// data/benchmark.json).  One dominant producer owning units i1..i8 faces a
// competitive fringe j1..j8; demand is Normal(19000, 3800) MWh.
SystemConfig benchmark_config();

SystemConfig config_from_json(const std::string& text);
std::string config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& cfg, const std::string& path);

// Stable hex digest of the canonical JSON form; identifies a config in
// provenance records and manifests.
std::string config_digest(const SystemConfig& cfg);

}  // namespace salesmix
