#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salesmix/model.hpp"

namespace salesmix {

// Multipliers on the configured standard deviations, used by sensitivity
// runs.  `fuel_cost` scales only technologies with fuel-price uncertainty.
struct VariabilityFactors {
  double demand = 1.0;
  double renewable = 1.0;
  double fuel_cost = 1.0;

  bool operator==(const VariabilityFactors&) const = default;
};

struct Scenario {
  std::size_t index = 0;
  double probability = 0.0;
  double demand = 0.0;            // MWh
  std::vector<double> capacity;   // MWh, parallel to the config unit list
  std::vector<double> cost;       // EUR/MWh, parallel to the config unit list

  bool operator==(const Scenario&) const = default;
};

struct ScenarioProvenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  VariabilityFactors factors;

  bool operator==(const ScenarioProvenance&) const = default;
};

struct ScenarioSet {
  std::vector<std::string> unit_ids;
  std::vector<Scenario> scenarios;
  ScenarioProvenance provenance;

  bool operator==(const ScenarioSet&) const = default;
};

// Equiprobable Monte Carlo scenarios.  Each stochastic quantity draws from
// its own named substream of (seed, label), so adding scenarios, adding
// units or reordering units never perturbs another quantity's draws.  All
// wind units share one standard-normal deviate per scenario (perfectly
// correlated wind); solar capacities and fuel costs draw independently.
// Demand and capacities are truncated at zero.
ScenarioSet generate_scenarios(const SystemConfig& cfg,
                               const VariabilityFactors& factors = {});

// The deterministic scenario with every quantity at its mean, probability 1.
Scenario mean_value_scenario(const SystemConfig& cfg);

// CSV with header  omega,prob,demand,Q_<id>...,c_<id>...  plus a JSON
// provenance sidecar at <csv_path>.meta.json.  Values use shortest
// round-trip formatting, so save/load is lossless.
void save_scenarios(const ScenarioSet& set, const std::string& csv_path);
ScenarioSet load_scenarios(const std::string& csv_path);

}  // namespace salesmix
