// src/config.cpp

#include "branchsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace branchsim {

namespace {

using nlohmann::json;

// Line of the first occurrence of "key" in the source text, or 0.
std::size_t locate_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(key, locate_key(text_, key), message);
  }

  std::size_t positive_integer(const json& j, const std::string& key) const {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(key, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < 1) fail(key, "expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  double number(const json& j, const std::string& key) const {
    if (!j.is_number()) fail(key, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(key, "expected a finite number");
    return v;
  }

  std::vector<Complex> coefficients(const json& j) const {
    if (!j.is_array() || j.empty()) fail("coefficients", "expected a nonempty list of [re, im] pairs");
    std::vector<Complex> out;
    for (const auto& entry : j) {
      if (entry.is_number()) {
        out.emplace_back(number(entry, "coefficients"), 0.0);
      } else if (entry.is_array() && entry.size() == 2) {
        out.emplace_back(number(entry[0], "coefficients"), number(entry[1], "coefficients"));
      } else {
        fail("coefficients", "each coefficient must be a [re, im] pair");
      }
    }
    return out;
  }

  std::vector<double> thetas(const json& j) const {
    if (j.is_array()) {
      std::vector<double> out;
      for (const auto& t : j) out.push_back(number(t, "thetas"));
      return out;
    }
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) {
        if (k != "count" && k != "start" && k != "end") fail("thetas", "unknown sweep key '" + k + "'");
      }
      if (!j.contains("count") || !j.contains("end")) fail("thetas", "sweep needs 'count' and 'end'");
      const double start = j.contains("start") ? number(j["start"], "thetas") : 0.0;
      return theta_grid(positive_integer(j["count"], "thetas"), start, number(j["end"], "thetas"));
    }
    fail("thetas", "expected a list of radians or a {count, start, end} sweep");
  }

 private:
  const std::string& text_;
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSternGerlach: return "stern_gerlach";
    case ExperimentKind::kGeneralized: return "generalized";
    case ExperimentKind::kAppendixRotation: return "appendix_rotation";
  }
  return "unknown";
}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::kJson ? "json" : "text";
}

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : Error("config" + (key.empty() ? std::string() : " key '" + key + "'") +
            (line ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + message),
      key_(std::move(key)),
      line_(line) {}

const std::vector<std::string>& check_names(ExperimentKind kind) {
  return kind == ExperimentKind::kAppendixRotation ? rotation_check_names() : chain_check_names();
}

std::vector<double> theta_grid(std::size_t count, double start, double end) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = start + static_cast<double>(k) * (end - start) / static_cast<double>(count);
  }
  return out;
}

ConfigFile parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", 0, e.what());
  }
  const Reader in(text);
  if (!root.is_object()) in.fail("", "top level must be an object");

  static const std::set<std::string> known{"experiment", "n_versions", "coefficients", "draws",  "observers", "photon_model",
                                           "thetas",     "seed",       "tolerance",    "checks", "output"};
  for (const auto& [key, value] : root.items()) {
    if (!known.contains(key)) in.fail(key, "unknown key");
  }

  ConfigFile cfg;
  if (!root.contains("experiment") || !root["experiment"].is_string()) {
    in.fail("experiment", "required: one of stern_gerlach, generalized, appendix_rotation");
  }
  const auto kind = root["experiment"].get<std::string>();
  if (kind == "stern_gerlach") {
    cfg.experiment = ExperimentKind::kSternGerlach;
  } else if (kind == "generalized") {
    cfg.experiment = ExperimentKind::kGeneralized;
  } else if (kind == "appendix_rotation") {
    cfg.experiment = ExperimentKind::kAppendixRotation;
  } else {
    in.fail("experiment", "unknown experiment '" + kind + "'");
  }

  if (root.contains("n_versions")) cfg.n_versions = in.positive_integer(root["n_versions"], "n_versions");
  if (cfg.n_versions < 2) in.fail("n_versions", "at least two versions are needed");
  if (cfg.experiment != ExperimentKind::kGeneralized && cfg.n_versions != 2) {
    in.fail("n_versions", std::string(to_string(cfg.experiment)) + " has exactly two versions");
  }
  if (root.contains("observers")) cfg.observers = in.positive_integer(root["observers"], "observers");
  if (root.contains("draws")) cfg.draws = in.positive_integer(root["draws"], "draws");
  if (root.contains("photon_model")) {
    if (!root["photon_model"].is_boolean()) in.fail("photon_model", "expected true or false");
    cfg.photon_model = root["photon_model"].get<bool>();
  }
  if (root.contains("seed")) {
    const auto& s = root["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      in.fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("tolerance")) {
    cfg.tolerance = in.number(root["tolerance"], "tolerance");
    if (!(cfg.tolerance > 0.0)) in.fail("tolerance", "must be positive");
  }

  if (root.contains("coefficients")) {
    auto coeffs = in.coefficients(root["coefficients"]);
    if (coeffs.size() != cfg.n_versions) {
      in.fail("coefficients", "n_versions is " + std::to_string(cfg.n_versions) + " but " +
                                  std::to_string(coeffs.size()) + " coefficients were given");
    }
    double total = 0.0;
    for (const auto& a : coeffs) total += std::norm(a);
    if (!(std::abs(total - 1.0) <= cfg.tolerance)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "coefficients are not normalized (sum of squared moduli " << total << ")";
      in.fail("coefficients", msg.str());
    }
    cfg.coefficients = std::move(coeffs);
    if (cfg.draws != 1) in.fail("draws", "random draws only apply when coefficients are omitted");
  }

  if (root.contains("thetas")) cfg.thetas = in.thetas(root["thetas"]);
  if (cfg.experiment == ExperimentKind::kAppendixRotation && cfg.thetas.empty()) {
    in.fail("thetas", "appendix_rotation needs at least one angle");
  }
  if (cfg.experiment != ExperimentKind::kAppendixRotation && !cfg.thetas.empty()) {
    in.fail("thetas", "angles only apply to appendix_rotation");
  }

  if (root.contains("checks")) {
    if (!root["checks"].is_array()) in.fail("checks", "expected a list of check names");
    const auto& known_checks = check_names(cfg.experiment);
    for (const auto& c : root["checks"]) {
      if (!c.is_string()) in.fail("checks", "expected a list of check names");
      const auto name = c.get<std::string>();
      if (std::find(known_checks.begin(), known_checks.end(), name) == known_checks.end()) {
        in.fail("checks", "unknown check '" + name + "' for " + std::string(to_string(cfg.experiment)));
      }
      cfg.checks.push_back(name);
    }
  }

  if (root.contains("output")) {
    const auto& out = root["output"];
    if (!out.is_object()) in.fail("output", "expected {path, format}");
    for (const auto& [k, v] : out.items()) {
      if (k == "path") {
        if (!v.is_string()) in.fail("output", "path must be a string");
        cfg.output_path = v.get<std::string>();
      } else if (k == "format") {
        const auto f = v.is_string() ? v.get<std::string>() : std::string();
        if (f == "json") {
          cfg.format = ReportFormat::kJson;
        } else if (f == "text") {
          cfg.format = ReportFormat::kText;
        } else {
          in.fail("output", "format must be \"json\" or \"text\"");
        }
      } else {
        in.fail("output", "unknown output key '" + k + "'");
      }
    }
  }
  return cfg;
}

ConfigFile parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace branchsim
