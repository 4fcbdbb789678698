#include "salesmix/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "salesmix/errors.hpp"
#include "salesmix/model.hpp"
#include "salesmix/mpec.hpp"
#include "salesmix/numeric.hpp"
#include "salesmix/risk.hpp"
#include "salesmix/sweep.hpp"

namespace salesmix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_utc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIoError;
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out.flush()) throw IoError("cannot write: " + path);
}

void write_manifest(RunManifest m, const std::string& out_dir,
                    std::vector<std::string> outputs) {
  m.out_dir = out_dir;
  m.outputs = std::move(outputs);
  write_text((fs::path(out_dir) / "manifest.json").string(),
             manifest_to_json(m));
}

void log_frontier(const Frontier& f, std::ostream& log) {
  for (const SweepPoint& pt : f.points) {
    if (!pt.feasible) {
      log << "qft=" << format_double(pt.qft) << " infeasible: " << pt.diagnostic
          << '\n';
      continue;
    }
    log << "qft=" << format_double(pt.qft)
        << " pf=" << format_double(pt.futures_price)
        << " exp_spot=" << format_double(pt.expected_spot_price)
        << " exp_profit=" << format_double(pt.expected_profit)
        << " cvar=" << format_double(pt.cvar_profit) << '\n';
  }
}

std::size_t count_feasible(const Frontier& f) {
  std::size_t n = 0;
  for (const SweepPoint& pt : f.points) n += pt.feasible ? 1 : 0;
  return n;
}

// Cross-check a sample of stored solutions against the independent pattern
// verifier.  Returns the number of disagreements, logging each one.
std::size_t verify_sample(const SystemConfig& cfg, const ScenarioSet& set,
                          const Frontier& f, std::ostream& log) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < f.points.size(); ++i)
    if (f.points[i].feasible) feasible.push_back(i);
  if (feasible.empty()) return 0;
  std::vector<std::size_t> picks{feasible.front(),
                                 feasible[feasible.size() / 2],
                                 feasible.back()};
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());

  const std::size_t scen_count = std::min<std::size_t>(20, set.scenarios.size());
  std::size_t mismatches = 0;
  for (const std::size_t p : picks) {
    const SweepPoint& pt = f.points[p];
    for (std::size_t w = 0; w < scen_count; ++w) {
      const AllocationSolution ref = branch_verify(
          cfg.units, set.scenarios[w], pt.qft, pt.futures_price);
      const AllocationSolution& got = pt.solutions[w];
      const double tol = 1e-6 * std::max(1.0, std::abs(ref.profit));
      if (std::abs(ref.profit - got.profit) > tol ||
          std::abs(ref.outcome.price - got.outcome.price) > 1e-6) {
        ++mismatches;
        log << "verify mismatch at qft=" << format_double(pt.qft)
            << " scenario " << w << ": solver profit "
            << format_double(got.profit) << " price "
            << format_double(got.outcome.price) << ", verifier profit "
            << format_double(ref.profit) << " price "
            << format_double(ref.outcome.price) << '\n';
      }
    }
  }
  return mismatches;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["timestamp_utc"] = m.timestamp_utc;
  j["config_path"] = m.config_path;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["factors"]["demand"] = m.factors.demand;
  j["factors"]["renewable"] = m.factors.renewable;
  j["factors"]["fuel_cost"] = m.factors.fuel_cost;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["threads"] = m.threads;
  j["detail"] = m.detail;
  if (m.scenarios_path)
    j["scenarios_path"] = *m.scenarios_path;
  else
    j["scenarios_path"] = nullptr;
  j["out_dir"] = m.out_dir;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp_utc = j.at("timestamp_utc").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.factors.demand = j.at("factors").at("demand").get<double>();
    m.factors.renewable = j.at("factors").at("renewable").get<double>();
    m.factors.fuel_cost = j.at("factors").at("fuel_cost").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.threads = j.at("threads").get<unsigned>();
    m.detail = j.at("detail").get<bool>();
    if (!j.at("scenarios_path").is_null())
      m.scenarios_path = j.at("scenarios_path").get<std::string>();
    m.out_dir = j.at("out_dir").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  return run_guarded(log, [&] {
    SystemConfig cfg = load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    require_valid(cfg);
    const ScenarioSet set = generate_scenarios(cfg, args.factors);

    ensure_dir(args.out_dir);
    const std::string csv = (fs::path(args.out_dir) / "scenarios.csv").string();
    save_scenarios(set, csv);

    RunManifest m;
    m.command = "generate";
    m.tool_version = kToolVersion;
    m.timestamp_utc = now_utc();
    m.config_path = args.config_path;
    m.config_digest = config_digest(cfg);
    m.seed = cfg.seed;
    m.factors = args.factors;
    m.alpha = cfg.alpha;
    m.beta = cfg.cvar_level;
    write_manifest(m, args.out_dir,
                   {"scenarios.csv", "scenarios.csv.meta.json"});

    log << "wrote " << csv << " (" << set.scenarios.size() << " scenarios, seed "
        << cfg.seed << ")\n";
    return kExitOk;
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& log) {
  return run_guarded(log, [&] {
    SystemConfig cfg = load_config(args.config_path);
    const std::string disk_digest = config_digest(cfg);
    if (args.seed) cfg.seed = *args.seed;
    if (args.alpha) cfg.alpha = *args.alpha;
    if (args.beta) cfg.cvar_level = *args.beta;
    require_valid(cfg);

    ScenarioSet set;
    if (args.scenarios_path) {
      set = load_scenarios(*args.scenarios_path);
      if (args.seed)
        log << "note: --seed is ignored when --scenarios is given\n";
      if (set.provenance.config_digest != disk_digest)
        log << "warning: scenario set was generated from a different "
               "configuration (digest "
            << set.provenance.config_digest << " vs " << disk_digest << ")\n";
    } else {
      set = generate_scenarios(cfg, {});
    }

    SweepSettings settings;
    settings.threads = args.threads;
    const Frontier frontier = run_sweep(cfg, set, settings);

    ensure_dir(args.out_dir);
    std::vector<std::string> outputs{"frontier.csv"};
    write_frontier_csv(frontier,
                       (fs::path(args.out_dir) / "frontier.csv").string());
    if (args.detail) {
      write_text((fs::path(args.out_dir) / "sweep_detail.csv").string(),
                 sweep_detail_csv(frontier, cfg.units));
      write_text((fs::path(args.out_dir) / "frontier_plot.csv").string(),
                 frontier_plot_csv(frontier));
      outputs.push_back("sweep_detail.csv");
      outputs.push_back("frontier_plot.csv");
    }

    RunManifest m;
    m.command = "sweep";
    m.tool_version = kToolVersion;
    m.timestamp_utc = now_utc();
    m.config_path = args.config_path;
    m.config_digest = config_digest(cfg);
    m.seed = set.provenance.seed;
    m.factors = set.provenance.factors;
    m.alpha = cfg.alpha;
    m.beta = cfg.cvar_level;
    m.threads = args.threads;
    m.detail = args.detail;
    m.scenarios_path = args.scenarios_path;
    write_manifest(m, args.out_dir, std::move(outputs));

    log_frontier(frontier, log);

    if (args.verify) {
      const std::size_t bad = verify_sample(cfg, set, frontier, log);
      if (bad != 0) {
        log << "error: " << bad << " verification mismatches\n";
        return 1;
      }
      log << "verification clean\n";
    }

    const std::size_t feasible = count_feasible(frontier);
    log << feasible << "/" << frontier.points.size()
        << " grid points feasible\n";
    if (feasible == 0) {
      log << "error: no feasible grid point\n";
      return kExitInfeasible;
    }
    return kExitOk;
  });
}

int cmd_sensitivity(const SensitivityArgs& args, std::ostream& log) {
  return run_guarded(log, [&] {
    SystemConfig cfg = load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    require_valid(cfg);

    const char* target_name = args.target == SensitivityTarget::demand
                                  ? "demand"
                                  : args.target == SensitivityTarget::renewables
                                        ? "renewables"
                                        : "costs";
    ensure_dir(args.out_dir);
    SweepSettings settings;
    settings.threads = args.threads;

    std::vector<std::string> outputs;
    for (const double factor : {0.8, 1.0, 1.2}) {
      VariabilityFactors f;
      switch (args.target) {
        case SensitivityTarget::demand: f.demand = factor; break;
        case SensitivityTarget::renewables: f.renewable = factor; break;
        case SensitivityTarget::costs: f.fuel_cost = factor; break;
      }
      const ScenarioSet set = generate_scenarios(cfg, f);
      const Frontier frontier = run_sweep(cfg, set, settings);

      char tag[8];
      std::snprintf(tag, sizeof tag, "%03d",
                    static_cast<int>(std::lround(factor * 100)));
      const std::string stem = std::string(target_name) + "_" + tag;
      const std::string name = "frontier_" + stem + ".csv";
      write_frontier_csv(frontier, (fs::path(args.out_dir) / name).string());
      outputs.push_back(name);
      if (args.detail) {
        const std::string detail_name = "sweep_detail_" + stem + ".csv";
        write_text((fs::path(args.out_dir) / detail_name).string(),
                   sweep_detail_csv(frontier, cfg.units));
        outputs.push_back(detail_name);
      }
      log << name << ": " << count_feasible(frontier) << "/"
          << frontier.points.size() << " grid points feasible\n";
    }

    RunManifest m;
    m.command = std::string("sensitivity:") + target_name;
    m.tool_version = kToolVersion;
    m.timestamp_utc = now_utc();
    m.config_path = args.config_path;
    m.config_digest = config_digest(cfg);
    m.seed = cfg.seed;
    m.alpha = cfg.alpha;
    m.beta = cfg.cvar_level;
    m.threads = args.threads;
    m.detail = args.detail;
    write_manifest(m, args.out_dir, std::move(outputs));
    return kExitOk;
  });
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& log) {
  return run_guarded(log, [&] {
    const std::vector<FrontierRow> rows = read_frontier_csv(args.frontier_path);

    out << std::right << std::setw(10) << "qft" << std::setw(12) << "pf"
        << std::setw(12) << "E[spot]" << std::setw(12) << "premium"
        << std::setw(16) << "E[profit]" << std::setw(16) << "CVaR" << '\n';
    const auto num = [&](double v) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(2) << v;
      return s.str();
    };
    for (const FrontierRow& r : rows) {
      out << std::setw(10) << num(r.qft);
      if (r.infeasible) {
        out << "  infeasible\n";
        continue;
      }
      out << std::setw(12) << num(r.pf) << std::setw(12)
          << num(r.exp_spot_price) << std::setw(12)
          << num(risk_premium(r.pf, r.exp_spot_price)) << std::setw(16)
          << num(r.exp_profit) << std::setw(16) << num(r.cvar_profit) << '\n';
    }

    if (args.lambda) {
      std::vector<double> ep, cp, q;
      for (const FrontierRow& r : rows) {
        if (r.infeasible) continue;
        ep.push_back(r.exp_profit);
        cp.push_back(r.cvar_profit);
        q.push_back(r.qft);
      }
      if (ep.empty()) {
        log << "error: no feasible rows to select from\n";
        return kExitInfeasible;
      }
      const std::size_t pick = select_optimal(ep, cp, q, *args.lambda);
      out << "selected qft=" << format_double(q[pick])
          << " (lambda=" << format_double(*args.lambda)
          << "): E[profit]=" << num(ep[pick]) << " CVaR=" << num(cp[pick])
          << " score="
          << num(*args.lambda * ep[pick] + (1.0 - *args.lambda) * cp[pick])
          << '\n';
    }
    return kExitOk;
  });
}

}  // namespace salesmix
