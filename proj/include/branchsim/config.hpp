// include/branchsim/config.hpp
//
// Experiment configuration files. The format is a JSON object:
//
//   {
//     "experiment":   "stern_gerlach" | "generalized" | "appendix_rotation",
//     "n_versions":   2,
//     "coefficients": [[0.6, 0.0], [0.8, 0.0]],   // [re, im] pairs; omit for random draws
//     "draws":        1,                          // random draws when coefficients are omitted
//     "observers":    1,
//     "photon_model": false,
//     "thetas":       [0.0, 0.5] | {"count": 64, "start": 0.0, "end": 6.283185307179586},
//     "seed":         42,
//     "tolerance":    1e-12,
//     "checks":       ["mixed_record", ...],      // default: every check of the experiment
//     "output":       {"path": "report.json", "format": "json" | "text"}
//   }
//
// A theta sweep object yields `count` points start + k (end − start) / count,
// so `end` itself is excluded.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "branchsim/error.hpp"
#include "branchsim/experiments.hpp"

namespace branchsim {

enum class ExperimentKind { kSternGerlach, kGeneralized, kAppendixRotation };
enum class ReportFormat { kJson, kText };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(ReportFormat format);

/// Configuration problem, naming the offending key and, when it can be
/// located, the 1-based line it appears on.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message);

  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

struct ConfigFile {
  ExperimentKind experiment = ExperimentKind::kSternGerlach;
  std::size_t n_versions = 2;
  std::optional<std::vector<Complex>> coefficients;
  std::size_t draws = 1;
  std::size_t observers = 1;
  bool photon_model = false;
  std::vector<double> thetas;
  std::uint64_t seed = 0;
  double tolerance = kTolerance;
  std::vector<std::string> checks;
  std::optional<std::string> output_path;
  ReportFormat format = ReportFormat::kJson;
};

ConfigFile parse_config(const std::filesystem::path& path);
ConfigFile parse_config_text(const std::string& text);

/// Check names available for an experiment kind.
const std::vector<std::string>& check_names(ExperimentKind kind);

/// Evenly spaced points in [start, end), end excluded.
std::vector<double> theta_grid(std::size_t count, double start, double end);

}  // namespace branchsim
