#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "salesmix/scenario.hpp"

namespace salesmix {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIoError = 4;

// Everything needed to reproduce a run bit-identically, written as
// manifest.json next to every output file.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::string timestamp_utc;
  std::string config_path;
  std::string config_digest;
  std::uint64_t seed = 0;
  VariabilityFactors factors;
  double alpha = 1.0;
  double beta = 0.05;
  unsigned threads = 0;
  bool detail = false;
  std::optional<std::string> scenarios_path;
  std::string out_dir;
  std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

struct GenerateArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  VariabilityFactors factors;
};

struct SweepArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> scenarios_path;  // else generate from config
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> beta;
  unsigned threads = 0;
  bool detail = false;
  bool verify = false;  // cross-check a sample against the branch verifier
};

enum class SensitivityTarget { demand, renewables, costs };

struct SensitivityArgs {
  std::string config_path;
  std::string out_dir;
  SensitivityTarget target = SensitivityTarget::demand;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool detail = false;
};

struct ReportArgs {
  std::string frontier_path;
  std::optional<double> lambda;  // print a selection line when given
};

// Commands return a process exit code and write any failure reason to log.
// scenarios.csv (+ sidecar) and manifest.json into out_dir:
int cmd_generate(const GenerateArgs& args, std::ostream& log);
// frontier.csv and manifest.json (+ sweep_detail.csv, frontier_plot.csv
// with --detail) into out_dir; grid points that cannot be solved are
// recorded in the `infeasible` column and the run continues.  Exit 3 only
// when no grid point is feasible.
int cmd_sweep(const SweepArgs& args, std::ostream& log);
// One frontier CSV per variability factor {0.8, 1.0, 1.2} applied to the
// chosen target, all runs sharing the same base seed (common random
// numbers), plus manifest.json.
int cmd_sensitivity(const SensitivityArgs& args, std::ostream& log);
// Pretty-print an existing frontier.csv; with lambda, also the selected
// optimum.  Writes to `out`, not to files.
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& log);

}  // namespace salesmix
