// tools/branchsim.cpp
//
// Command-line runner for measurement-chain experiments.
//
//   branchsim run <config> [--check NAME]... [--format json|text] [--out PATH]
//                          [--seed N] [--tolerance X]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or config error,
// 3 capacity error.

#include <CLI11.hpp>
#include <iostream>

#include "branchsim/runner.hpp"

int main(int argc, char** argv) {
  using namespace branchsim;

  CLI::App app{"Branching measurement-chain simulator"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::string format;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--check", options.check_filter, "Only run the named check (repeatable)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  run->add_option("--out", options.out, "Write the report to this path");
  run->add_option("--seed", options.seed, "Seed for random coefficient draws");
  run->add_option("--tolerance", options.tolerance, "Override the config tolerance");
  // Corrupts the perception step so the mixed-state record gets populated.
  run->add_flag("--negative-control", options.negative_control)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (!format.empty()) options.format = format == "json" ? ReportFormat::kJson : ReportFormat::kText;

  ConfigFile config;
  try {
    config = parse_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run_and_report(config, options, std::cout, std::cerr);
}
