// Command-line front end: scenario generation, frontier sweeps, variability
// sensitivity runs and frontier reports.  All diagnostics go to stderr; only
// `report` writes to stdout.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "salesmix/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Joint futures sales-mix and generation-plan optimizer for a "
      "price-making electricity producer"};
  app.set_version_flag("--version", std::string(salesmix::kToolVersion));
  app.require_subcommand(1);

  salesmix::GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "generate", "Sample a scenario set from a system configuration");
  gen->add_option("--config", gen_args.config_path,
                  "System configuration JSON")
      ->required();
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--seed", gen_args.seed, "Override the configuration seed");
  gen->add_option("--factor-demand", gen_args.factors.demand,
                  "Demand standard-deviation multiplier");
  gen->add_option("--factor-renewable", gen_args.factors.renewable,
                  "Renewable-capacity standard-deviation multiplier");
  gen->add_option("--factor-cost", gen_args.factors.fuel_cost,
                  "Fuel-cost standard-deviation multiplier");

  salesmix::SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep",
      "Compute the expected-profit/CVaR frontier over the commitment grid");
  sweep->add_option("--config", sweep_args.config_path,
                    "System configuration JSON")
      ->required();
  sweep->add_option("--out", sweep_args.out_dir, "Output directory")
      ->required();
  sweep->add_option("--scenarios", sweep_args.scenarios_path,
                    "Existing scenario CSV (instead of sampling)");
  sweep->add_option("--seed", sweep_args.seed,
                    "Override the configuration seed");
  sweep->add_option("--alpha", sweep_args.alpha,
                    "Override the physical delivery ratio");
  sweep->add_option("--beta", sweep_args.beta, "Override the CVaR tail level");
  sweep->add_option("--threads", sweep_args.threads,
                    "Worker threads (0 = hardware concurrency)");
  sweep->add_flag("--detail", sweep_args.detail,
                  "Also write per-scenario and plot CSVs");
  sweep->add_flag("--verify", sweep_args.verify,
                  "Cross-check sample solutions against the pattern verifier");

  salesmix::SensitivityArgs sens_args;
  std::string target = "demand";
  CLI::App* sens = app.add_subcommand(
      "sensitivity",
      "Sweep under 0.8x/1.0x/1.2x variability of one uncertainty driver");
  sens->add_option("--config", sens_args.config_path,
                   "System configuration JSON")
      ->required();
  sens->add_option("--out", sens_args.out_dir, "Output directory")->required();
  sens->add_option("--target", target, "demand, renewables or costs")
      ->check(CLI::IsMember({"demand", "renewables", "costs"}));
  sens->add_option("--seed", sens_args.seed,
                   "Override the configuration seed");
  sens->add_option("--threads", sens_args.threads,
                   "Worker threads (0 = hardware concurrency)");
  sens->add_flag("--detail", sens_args.detail,
                 "Also write per-scenario CSVs");

  salesmix::ReportArgs report_args;
  CLI::App* report =
      app.add_subcommand("report", "Pretty-print an existing frontier CSV");
  report->add_option("frontier", report_args.frontier_path,
                     "Path to a frontier CSV")
      ->required();
  report->add_option(
      "--lambda", report_args.lambda,
      "Risk-aversion weight in [0,1]; also print the selected commitment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? salesmix::kExitOk : salesmix::kExitConfigError;
  }

  if (gen->parsed()) return salesmix::cmd_generate(gen_args, std::cerr);
  if (sweep->parsed()) return salesmix::cmd_sweep(sweep_args, std::cerr);
  if (sens->parsed()) {
    sens_args.target = target == "demand"
                           ? salesmix::SensitivityTarget::demand
                           : target == "renewables"
                                 ? salesmix::SensitivityTarget::renewables
                                 : salesmix::SensitivityTarget::costs;
    return salesmix::cmd_sensitivity(sens_args, std::cerr);
  }
  if (report->parsed())
    return salesmix::cmd_report(report_args, std::cout, std::cerr);
  return salesmix::kExitConfigError;
}
