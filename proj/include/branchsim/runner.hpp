// include/branchsim/runner.hpp
//
// Sweep orchestration and report rendering for the command-line tool.

#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <random>

#include "branchsim/config.hpp"

namespace branchsim {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2, kExitCapacity = 3 };

/// Command-line overrides applied on top of a ConfigFile.
struct RunOptions {
  std::vector<std::string> check_filter;
  std::optional<ReportFormat> format;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  bool negative_control = false;
};

/// Config after overrides; throws ConfigError when a filter names a check the
/// experiment does not have.
ConfigFile apply_overrides(ConfigFile config, const RunOptions& options);

/// Unit vector of n complex coefficients with independent standard normal
/// real and imaginary parts before normalization. Uses only the raw 64-bit
/// output of the engine, so draws are identical across standard libraries.
std::vector<Complex> random_unit_coefficients(std::size_t n, std::mt19937_64& rng);

struct SweepPoint {
  std::size_t draw = 0;
  std::optional<double> theta;
  std::vector<Complex> coefficients;
  RunReport report;
};

struct SweepOutcome {
  ConfigFile config;
  bool negative_control = false;
  std::vector<SweepPoint> points;
  double elapsed_ms = 0.0;

  bool passed() const;
};

/// Runs every (draw, theta) point of the config; points run in parallel and
/// are returned in input order.
SweepOutcome run_sweep(const ConfigFile& config, bool negative_control = false);

nlohmann::json to_json(const SweepOutcome& outcome);
std::string to_text(const SweepOutcome& outcome);

/// Full CLI pipeline: overrides, sweep, report to `options.out` / the config's
/// output path / `out`. Returns an ExitCode; diagnostics go to `err`.
int run_and_report(const ConfigFile& config, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace branchsim
