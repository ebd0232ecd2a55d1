// src/runner.cpp

#include "branchsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace branchsim {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json complex_list(const std::vector<Complex>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back({v.real(), v.imag()});
  return out;
}

std::string format_double(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

// Runs fn(i) for i in [0, n) on a small thread pool. The first exception, by
// index, is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ConfigFile apply_overrides(ConfigFile config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.tolerance) {
    if (!(*options.tolerance > 0.0) || !std::isfinite(*options.tolerance)) {
      throw ConfigError("tolerance", 0, "--tolerance must be a positive number");
    }
    config.tolerance = *options.tolerance;
  }
  if (options.format) config.format = *options.format;
  if (options.out) config.output_path = *options.out;
  if (!options.check_filter.empty()) {
    const auto& known = check_names(config.experiment);
    for (const auto& name : options.check_filter) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError("checks", 0,
                          "unknown check '" + name + "' for " + std::string(to_string(config.experiment)));
      }
    }
    config.checks = options.check_filter;
  }
  return config;
}

std::vector<Complex> random_unit_coefficients(std::size_t n, std::mt19937_64& rng) {
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Complex> out(n);
  double total = 0.0;
  do {
    total = 0.0;
    for (auto& a : out) {
      const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
      const double angle = 2.0 * std::numbers::pi * uniform();
      a = Complex(radius * std::cos(angle), radius * std::sin(angle));
      total += std::norm(a);
    }
  } while (!(total > 1e-300));
  const double scale = 1.0 / std::sqrt(total);
  for (auto& a : out) a *= scale;
  return out;
}

bool SweepOutcome::passed() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.report.passed(); });
}

SweepOutcome run_sweep(const ConfigFile& config, bool negative_control) {
  const auto start = Clock::now();
  SweepOutcome outcome;
  outcome.config = config;
  outcome.negative_control = negative_control;

  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<Complex>> draws;
  if (config.coefficients) {
    draws.push_back(*config.coefficients);
  } else {
    for (std::size_t d = 0; d < config.draws; ++d) draws.push_back(random_unit_coefficients(config.n_versions, rng));
  }

  const bool rotated = config.experiment == ExperimentKind::kAppendixRotation;
  for (std::size_t d = 0; d < draws.size(); ++d) {
    if (rotated) {
      for (double theta : config.thetas) outcome.points.push_back({d, theta, draws[d], {}});
    } else {
      outcome.points.push_back({d, std::nullopt, draws[d], {}});
    }
  }

  parallel_for(outcome.points.size(), [&](std::size_t i) {
    SweepPoint& point = outcome.points[i];
    ExperimentSpec spec;
    spec.n_versions = config.n_versions;
    spec.coefficients = point.coefficients;
    spec.observers = config.observers;
    spec.photon_model = config.photon_model;
    spec.tolerance = config.tolerance;
    spec.negative_control = negative_control;
    if (point.theta) {
      spec.rotation_thetas = {*point.theta};
      point.report = run_appendix_rotation(spec, *point.theta, config.checks);
    } else {
      point.report = run_measurement_chain(spec, config.checks);
    }
  });

  outcome.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return outcome;
}

json to_json(const SweepOutcome& outcome) {
  const ConfigFile& cfg = outcome.config;
  json config = {
      {"experiment", to_string(cfg.experiment)},
      {"n_versions", cfg.n_versions},
      {"coefficients", cfg.coefficients ? complex_list(*cfg.coefficients) : json(nullptr)},
      {"draws", cfg.coefficients ? 1 : cfg.draws},
      {"observers", cfg.observers},
      {"photon_model", cfg.photon_model},
      {"thetas", cfg.thetas},
      {"seed", cfg.seed},
      {"tolerance", cfg.tolerance},
      {"checks", cfg.checks.empty() ? check_names(cfg.experiment) : cfg.checks},
      {"negative_control", outcome.negative_control},
  };

  json runs = json::array();
  json checks = json::array();
  json runs_ms = json::array();
  std::map<std::string, double> residuals;
  for (std::size_t i = 0; i < outcome.points.size(); ++i) {
    const SweepPoint& p = outcome.points[i];
    json run = {
        {"index", i},
        {"draw", p.draw},
        {"coefficients", complex_list(p.coefficients)},
        {"final_state",
         {{"dimension", p.report.dimension}, {"norm", p.report.final_norm}, {"support", p.report.support}}},
    };
    if (p.theta) run["theta"] = *p.theta;
    json branches = json::array();
    for (const auto& b : p.report.branches) {
      branches.push_back({{"label", b.label}, {"weight", b.weight}, {"message", b.message}});
    }
    run["branches"] = std::move(branches);
    runs.push_back(std::move(run));

    for (const auto& c : p.report.checks) {
      json row = {{"run", i},
                  {"name", c.name},
                  {"status", to_string(c.status)},
                  {"residual", c.residual},
                  {"tolerance", c.tolerance},
                  {"note", c.note}};
      if (p.theta) row["theta"] = *p.theta;
      checks.push_back(std::move(row));
      if (c.status != CheckStatus::kSkipped) {
        auto [it, fresh] = residuals.try_emplace(c.name, c.residual);
        if (!fresh) it->second = std::max(it->second, c.residual);
      }
    }
    runs_ms.push_back(p.report.elapsed_ms);
  }

  return {
      {"schema_version", kSchemaVersion},
      {"experiment", to_string(cfg.experiment)},
      {"config", std::move(config)},
      {"passed", outcome.passed()},
      {"runs", std::move(runs)},
      {"checks", std::move(checks)},
      {"residuals", residuals},
      {"timings", {{"total_ms", outcome.elapsed_ms}, {"runs_ms", std::move(runs_ms)}}},
  };
}

std::string to_text(const SweepOutcome& outcome) {
  std::ostringstream os;
  std::size_t n_checks = 0, n_failed = 0;
  for (const auto& p : outcome.points) {
    for (const auto& c : p.report.checks) {
      ++n_checks;
      n_failed += c.status == CheckStatus::kFail;
    }
  }
  os << "experiment " << to_string(outcome.config.experiment) << "  points " << outcome.points.size() << "  checks "
     << n_checks << "  failed " << n_failed << "  result " << (outcome.passed() ? "PASS" : "FAIL") << "\n";

  char line[256];
  for (std::size_t i = 0; i < outcome.points.size(); ++i) {
    const SweepPoint& p = outcome.points[i];
    os << "\nrun " << i << "  draw " << p.draw;
    if (p.theta) os << "  theta " << format_double("%.6f", *p.theta);
    os << "  dimension " << p.report.dimension << "\n";
    std::snprintf(line, sizeof line, "  %-10s %-20s %s\n", "label", "weight", "message");
    os << line;
    for (const auto& b : p.report.branches) {
      std::snprintf(line, sizeof line, "  %-10s %-20.15g %s\n", b.label.c_str(), b.weight, b.message.c_str());
      os << line;
    }
  }

  os << "\nchecks\n";
  std::snprintf(line, sizeof line, "  %-5s %-26s %-8s %-12s %-12s %s\n", "run", "name", "status", "residual",
                "tolerance", "note");
  os << line;
  for (std::size_t i = 0; i < outcome.points.size(); ++i) {
    for (const auto& c : outcome.points[i].report.checks) {
      std::snprintf(line, sizeof line, "  %-5zu %-26s %-8s %-12.3e %-12.3e %s\n", i, c.name.c_str(),
                    std::string(to_string(c.status)).c_str(), c.residual, c.tolerance, c.note.c_str());
      os << line;
    }
  }
  return os.str();
}

int run_and_report(const ConfigFile& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  ConfigFile effective;
  try {
    effective = apply_overrides(config, options);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  SweepOutcome outcome;
  try {
    outcome = run_sweep(effective, options.negative_control);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string body =
      effective.format == ReportFormat::kJson ? to_json(outcome).dump(2) + "\n" : to_text(outcome);
  if (effective.output_path) {
    std::ofstream file(*effective.output_path, std::ios::binary);
    if (!file || !(file << body)) {
      err << "error: cannot write " << *effective.output_path << "\n";
      return kExitUsage;
    }
    out << (outcome.passed() ? "PASS" : "FAIL") << ": report written to " << *effective.output_path << "\n";
  } else {
    out << body;
  }
  return outcome.passed() ? kExitPass : kExitCheckFailure;
}

}  // namespace branchsim
