// src/experiments.cpp

#include "branchsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "branchsim/analysis.hpp"
#include "branchsim/error.hpp"

namespace branchsim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool is_observer(const SubsystemLayout& layout, std::size_t reg) {
  return layout.at(reg).role == RegisterRole::kObserver;
}

std::vector<std::string> resolve_checks(const std::vector<std::string>& requested,
                                        const std::vector<std::string>& known) {
  if (requested.empty()) return known;
  for (const auto& name : requested) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw InvalidArgument("unknown check '" + name + "'");
    }
  }
  std::vector<std::string> out;
  for (const auto& name : known) {
    if (std::find(requested.begin(), requested.end(), name) != requested.end()) out.push_back(name);
  }
  return out;
}

bool enabled(const std::vector<std::string>& checks, std::string_view name) {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

std::vector<Complex> unit_coefficients(std::size_t n, std::size_t j) {
  std::vector<Complex> out(n, Complex(0.0));
  out[j] = 1.0;
  return out;
}

double max_pairwise_overlap(const std::vector<Branch>& branches, const SubsystemLayout& layout) {
  std::vector<StateVector> vectors;
  vectors.reserve(branches.size());
  for (const auto& b : branches) vectors.push_back(branch_vector(b, layout));
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t k = i + 1; k < vectors.size(); ++k) {
      worst = std::max(worst, std::abs(inner_product(vectors[i], vectors[k])));
    }
  }
  return worst;
}

// Weight of each (observer, level) pair.
std::vector<double> observer_level_weights(const ChainLayout& chain, const StateVector& state) {
  const auto& layout = chain.layout;
  const std::size_t levels = layout.dimension(chain.observers.front());
  std::vector<double> w(chain.observers.size() * levels, 0.0);
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const double p = std::norm(state[i]);
    if (p == 0.0) continue;
    for (std::size_t k = 0; k < chain.observers.size(); ++k) {
      w[k * levels + layout.digit(i, chain.observers[k])] += p;
    }
  }
  return w;
}

void summarize_final(RunReport& report, const ChainLayout& chain, const StateVector& final_state,
                     double tolerance) {
  report.dimension = final_state.dimension();
  report.final_norm = norm(final_state);
  report.support = 0;
  for (const auto& a : final_state.amplitudes()) {
    if (std::norm(a) > tolerance * tolerance) ++report.support;
  }
  for (const auto& b : decompose_branches(final_state, chain.observer_name(0), tolerance)) {
    report.branches.push_back({b.label, std::norm(b.coefficient),
                               observer_message(b.record_label.front(), chain.n_versions)});
  }
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.n_versions < 2) throw InvalidArgument("n_versions must be at least 2");
  if (spec.observers < 1) throw InvalidArgument("observers must be at least 1");
  if (!(spec.tolerance > 0.0) || !std::isfinite(spec.tolerance)) {
    throw InvalidArgument("tolerance must be a positive finite number");
  }
  if (spec.coefficients.size() != spec.n_versions) {
    throw InvalidArgument("expected " + std::to_string(spec.n_versions) + " coefficients, got " +
                          std::to_string(spec.coefficients.size()));
  }
  double total = 0.0;
  for (const auto& a : spec.coefficients) total += std::norm(a);
  if (!(std::abs(total - 1.0) <= spec.tolerance)) {
    throw InvalidArgument("coefficients are not normalized: sum of squared moduli is " +
                          std::to_string(total));
  }
}

// ---------------------------------------------------------------------------
// Chain layout

Digits ChainLayout::version_config(std::size_t j) const {
  if (j >= n_versions) throw RangeError("version index out of range");
  Digits config;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    if (is_observer(layout, r)) continue;
    if (r == path) {
      config.push_back(j);
      continue;
    }
    const auto& group = layout.at(r).role == RegisterRole::kDetector ? detectors : photons;
    const auto pos = static_cast<std::size_t>(std::find(group.begin(), group.end(), r) - group.begin());
    config.push_back(pos == j ? 1 : 0);
  }
  return config;
}

bool ChainLayout::matches_config(std::size_t flat, const Digits& config) const {
  std::size_t k = 0;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    if (is_observer(layout, r)) continue;
    if (layout.digit(flat, r) != config[k++]) return false;
  }
  return true;
}

StateVector ChainLayout::version_state(std::size_t j, std::size_t observer_level) const {
  const Digits config = version_config(j);
  Digits digits(layout.size(), 0);
  std::size_t k = 0;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    digits[r] = is_observer(layout, r) ? observer_level : config[k++];
  }
  return product_state(layout, digits);
}

StateVector ChainLayout::ready_state(std::size_t j) const {
  Digits digits(layout.size(), 0);
  digits[path] = j;
  return product_state(layout, digits);
}

std::vector<std::string> ChainLayout::record_registers_pre_perception() const {
  std::vector<std::string> names;
  for (auto r : detectors) names.push_back(layout.at(r).name);
  for (auto r : photons) names.push_back(layout.at(r).name);
  return names;
}

ChainLayout make_chain_layout(std::size_t n_versions, std::size_t observers, bool photon_model,
                              std::size_t dimension_cap) {
  if (n_versions < 2) throw InvalidArgument("n_versions must be at least 2");
  if (observers < 1) throw InvalidArgument("observers must be at least 1");

  auto group_name = [&](const std::string& prefix, std::size_t j) {
    if (n_versions == 2) return prefix + (j == 0 ? "H" : "V");
    return prefix + std::to_string(j + 1);
  };

  std::vector<Register> regs;
  regs.push_back({"P", n_versions, RegisterRole::kParticlePath});
  for (std::size_t j = 0; j < n_versions; ++j) regs.push_back({group_name("D", j), 2, RegisterRole::kDetector});
  if (photon_model) {
    for (std::size_t j = 0; j < n_versions; ++j) regs.push_back({group_name("Ph", j), 2, RegisterRole::kPhoton});
  }
  for (std::size_t k = 0; k < observers; ++k) {
    regs.push_back({observers == 1 ? std::string("Obs") : "Obs" + std::to_string(k + 1), n_versions + 2,
                    RegisterRole::kObserver});
  }

  ChainLayout chain{SubsystemLayout(std::move(regs), dimension_cap), n_versions, 0, {}, {}, {}};
  chain.detectors = chain.layout.with_role(RegisterRole::kDetector);
  chain.photons = chain.layout.with_role(RegisterRole::kPhoton);
  chain.observers = chain.layout.with_role(RegisterRole::kObserver);
  return chain;
}

ChainLayout make_chain_layout(const ExperimentSpec& spec) {
  return make_chain_layout(spec.n_versions, spec.observers, spec.photon_model);
}

ChainOperators build_chain_operators(const ChainLayout& chain, bool negative_control) {
  ChainOperators ops;
  ops.pre_perception.push_back(build_detection_unitary(chain.layout));
  if (!chain.photons.empty()) ops.pre_perception.push_back(build_photon_emission_unitary(chain.layout));
  for (std::size_t k = 0; k < chain.observers.size(); ++k) {
    UnitaryOp perceive = build_perception_unitary(chain.layout, chain.observer_name(k));
    if (negative_control && k == 0) {
      perceive = compose(build_level_transposition(chain.layout, chain.observer_name(k), message_level(0),
                                                   chain.mixed_level()),
                         perceive);
    }
    ops.perception.push_back(std::move(perceive));
  }
  return ops;
}

StateVector apply_steps(const std::vector<UnitaryOp>& steps, const StateVector& x) {
  StateVector y = x;
  for (const auto& u : steps) y = apply_unitary(u, y);
  return y;
}

ChainEvolution evolve_chain(const ExperimentSpec& spec) {
  validate(spec);
  ChainLayout chain = make_chain_layout(spec);
  ChainOperators ops = build_chain_operators(chain, spec.negative_control);

  StateVector initial(chain.layout);
  Digits digits(chain.layout.size(), 0);
  for (std::size_t j = 0; j < spec.n_versions; ++j) {
    digits[chain.path] = j;
    initial[chain.layout.encode(digits)] = spec.coefficients[j];
  }
  StateVector post = apply_steps(ops.pre_perception, initial);
  StateVector final_state = apply_steps(ops.perception, post);
  return {std::move(chain), std::move(ops), std::move(initial), std::move(post), std::move(final_state)};
}

StateVector expected_final_state(const ChainLayout& chain, std::span<const Complex> coefficients) {
  if (coefficients.size() != chain.n_versions) throw InvalidArgument("coefficient count mismatch");
  StateVector out(chain.layout);
  for (std::size_t j = 0; j < chain.n_versions; ++j) {
    const StateVector v = chain.version_state(j, message_level(j));
    for (std::size_t i = 0; i < out.dimension(); ++i) out[i] += coefficients[j] * v[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Branches

std::string observer_level_label(std::size_t level, std::size_t n_versions) {
  if (level == kSeesNothing) return "nothing";
  if (level <= n_versions) return "M" + std::to_string(level);
  if (level == mixed_level(n_versions)) return "M_mixed";
  return "L" + std::to_string(level);
}

std::string observer_message(std::size_t level, std::size_t n_versions) {
  if (level == kSeesNothing) return "I see nothing";
  if (level <= n_versions) return "I see only classical state " + std::to_string(level);
  if (level == mixed_level(n_versions)) return "I see a mixed state";
  return "unassigned level " + std::to_string(level);
}

std::vector<Branch> decompose_branches(const StateVector& state,
                                       const std::vector<std::string>& record_registers,
                                       double tolerance) {
  const SubsystemLayout& layout = state.layout();
  if (record_registers.empty()) throw InvalidArgument("decompose_branches: no record register given");
  std::set<std::size_t> record_set;
  for (const auto& name : record_registers) record_set.insert(layout.index_of(name));
  const std::vector<std::size_t> records(record_set.begin(), record_set.end());
  std::vector<std::size_t> others;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    if (!record_set.contains(r)) others.push_back(r);
  }
  if (others.empty()) throw InvalidArgument("record registers cover the whole layout");
  const double n = norm(state);
  if (std::abs(n - 1.0) > 1e-9) {
    throw InvalidArgument("decompose_branches expects a unit state (norm " + std::to_string(n) + ")");
  }

  const SubsystemLayout record_layout = layout.subset(records);
  const SubsystemLayout relative_layout = layout.subset(others);
  auto record_index = [&](std::size_t i) {
    std::size_t f = 0;
    for (std::size_t k = 0; k < records.size(); ++k) f += layout.digit(i, records[k]) * record_layout.stride(k);
    return f;
  };
  auto relative_index = [&](std::size_t i) {
    std::size_t f = 0;
    for (std::size_t k = 0; k < others.size(); ++k) f += layout.digit(i, others[k]) * relative_layout.stride(k);
    return f;
  };

  const std::size_t n_labels = record_layout.total_dimension();
  std::vector<double> weight(n_labels, 0.0);
  std::vector<double> best(n_labels, -1.0);
  std::vector<Complex> best_amp(n_labels, Complex(0.0));
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const double p = std::norm(state[i]);
    if (p == 0.0) continue;
    const std::size_t l = record_index(i);
    weight[l] += p;
    if (p > best[l]) {
      best[l] = p;
      best_amp[l] = state[i];
    }
  }

  std::vector<std::optional<std::size_t>> slot(n_labels);
  std::vector<Branch> branches;
  for (std::size_t l = 0; l < n_labels; ++l) {
    if (!(weight[l] > tolerance * tolerance)) continue;
    Branch b{records, record_layout.decode(l), {}, std::sqrt(weight[l]) * best_amp[l] / std::abs(best_amp[l]),
             StateVector(relative_layout)};
    if (records.size() == 1 && layout.at(records.front()).role == RegisterRole::kObserver) {
      b.label = observer_level_label(b.record_label.front(), layout.dimension(records.front()) - 2);
    } else {
      for (std::size_t k = 0; k < records.size(); ++k) {
        if (k) b.label += ",";
        b.label += layout.at(records[k]).name + "=" + std::to_string(b.record_label[k]);
      }
    }
    slot[l] = branches.size();
    branches.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (state[i] == Complex(0.0)) continue;
    const auto s = slot[record_index(i)];
    if (!s) continue;
    branches[*s].relative_state[relative_index(i)] = state[i] / branches[*s].coefficient;
  }
  return branches;
}

std::vector<Branch> decompose_branches(const StateVector& state, const std::string& record_register,
                                       double tolerance) {
  return decompose_branches(state, std::vector<std::string>{record_register}, tolerance);
}

StateVector branch_vector(const Branch& branch, const SubsystemLayout& full) {
  std::vector<std::size_t> others;
  for (std::size_t r = 0; r < full.size(); ++r) {
    if (std::find(branch.record_registers.begin(), branch.record_registers.end(), r) ==
        branch.record_registers.end()) {
      others.push_back(r);
    }
  }
  const SubsystemLayout relative_layout = full.subset(others);
  if (!(relative_layout == branch.relative_state.layout())) {
    throw MismatchError("branch relative state does not match the layout");
  }
  StateVector out(full);
  for (std::size_t i = 0; i < full.total_dimension(); ++i) {
    bool on_label = true;
    for (std::size_t k = 0; k < branch.record_registers.size() && on_label; ++k) {
      on_label = full.digit(i, branch.record_registers[k]) == branch.record_label[k];
    }
    if (!on_label) continue;
    std::size_t r = 0;
    for (std::size_t k = 0; k < others.size(); ++k) r += full.digit(i, others[k]) * relative_layout.stride(k);
    out[i] = branch.coefficient * branch.relative_state[r];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checks

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

CheckResult make_check(std::string name, double residual, double threshold, std::string note) {
  const bool ok = residual <= threshold;  // false for NaN
  return {std::move(name), ok ? CheckStatus::kPass : CheckStatus::kFail, residual, threshold, std::move(note)};
}

bool RunReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::kFail; });
}

const CheckResult* RunReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const std::vector<std::string>& chain_check_names() {
  static const std::vector<std::string> names{
      "unitarity",    "final_state",        "branch_orthogonality",     "observer_coherence", "born_weights",
      "mixed_record", "observer_agreement", "coefficient_independence", "no_signaling"};
  return names;
}

const std::vector<std::string>& rotation_check_names() {
  static const std::vector<std::string> names{"primed_coefficients", "primed_evolution", "mixed_record",
                                              "basis_invariance"};
  return names;
}

double disagreement_weight(const ChainLayout& chain, const StateVector& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const double p = std::norm(state[i]);
    if (p == 0.0) continue;
    const std::size_t first = chain.layout.digit(i, chain.observers.front());
    for (std::size_t k = 1; k < chain.observers.size(); ++k) {
      if (chain.layout.digit(i, chain.observers[k]) != first) {
        total += p;
        break;
      }
    }
  }
  return total;
}

double mixed_record_weight(const ChainLayout& chain, const StateVector& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const double p = std::norm(state[i]);
    if (p == 0.0) continue;
    for (auto obs : chain.observers) {
      if (chain.layout.digit(i, obs) >= chain.mixed_level()) {
        total += p;
        break;
      }
    }
  }
  return total;
}

CheckResult multi_observer_agreement(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.observers < 2) {
    return {"observer_agreement", CheckStatus::kSkipped, 0.0, spec.tolerance * spec.tolerance,
            "single observer"};
  }
  const ChainEvolution evo = evolve_chain(spec);
  return make_check("observer_agreement", disagreement_weight(evo.chain, evo.final_state),
                    spec.tolerance * spec.tolerance);
}

CheckResult coefficient_independence_check(const ExperimentSpec& spec) {
  const ChainEvolution full = evolve_chain(spec);
  const std::string record = full.chain.observer_name(0);
  const auto full_branches = decompose_branches(full.final_state, record, spec.tolerance);

  double worst = 0.0;
  std::string skipped;
  for (std::size_t j = 0; j < spec.n_versions; ++j) {
    const Complex a = spec.coefficients[j];
    if (!(std::norm(a) > spec.tolerance * spec.tolerance)) {
      skipped += (skipped.empty() ? "" : ",") + std::to_string(j + 1);
      continue;
    }
    ExperimentSpec alone_spec = spec;
    alone_spec.coefficients = unit_coefficients(spec.n_versions, j);
    const StateVector alone = evolve_chain(alone_spec).final_state;

    // The record this version writes when it is alone.
    const auto alone_branches = decompose_branches(alone, record, spec.tolerance);
    const auto main = std::max_element(alone_branches.begin(), alone_branches.end(), [](const auto& x, const auto& y) {
      return std::norm(x.coefficient) < std::norm(y.coefficient);
    });

    StateVector extracted(full.chain.layout);
    for (const auto& b : full_branches) {
      if (b.record_label == main->record_label) extracted = branch_vector(b, full.chain.layout);
    }
    for (auto& x : extracted.amplitudes()) x /= a;
    worst = std::max(worst, distance(extracted, alone));
  }
  return make_check("coefficient_independence", worst, spec.tolerance,
                    skipped.empty() ? "" : "skipped zero-coefficient versions " + skipped);
}

CheckResult coefficient_independence_check(const ExperimentSpec& spec,
                                           std::span<const StateVector> version_states) {
  validate(spec);
  const ChainLayout chain = make_chain_layout(spec);
  if (version_states.size() != spec.n_versions) {
    throw InvalidArgument("expected one initial state per version");
  }
  for (const auto& v : version_states) {
    if (!(v.layout() == chain.layout)) throw MismatchError("version state is not on the chain layout");
  }
  const ChainOperators ops = build_chain_operators(chain, spec.negative_control);
  std::vector<UnitaryOp> steps = ops.pre_perception;
  steps.insert(steps.end(), ops.perception.begin(), ops.perception.end());

  auto combine = [&](std::optional<std::size_t> omit) {
    StateVector x(chain.layout);
    for (std::size_t k = 0; k < spec.n_versions; ++k) {
      if (omit && *omit == k) continue;
      for (std::size_t i = 0; i < x.dimension(); ++i) x[i] += spec.coefficients[k] * version_states[k][i];
    }
    return x;
  };

  const StateVector full_final = apply_steps(steps, combine(std::nullopt));
  StateVector sum_of_parts(chain.layout);
  double worst = 0.0;
  std::string skipped;
  for (std::size_t j = 0; j < spec.n_versions; ++j) {
    const Complex a = spec.coefficients[j];
    const StateVector alone = apply_steps(steps, version_states[j]);
    for (std::size_t i = 0; i < alone.dimension(); ++i) sum_of_parts[i] += a * alone[i];
    if (!(std::norm(a) > spec.tolerance * spec.tolerance)) {
      skipped += (skipped.empty() ? "" : ",") + std::to_string(j + 1);
      continue;
    }
    const StateVector without = apply_steps(steps, combine(j));
    StateVector extracted(chain.layout);
    for (std::size_t i = 0; i < extracted.dimension(); ++i) extracted[i] = (full_final[i] - without[i]) / a;
    worst = std::max(worst, distance(extracted, alone));
  }
  worst = std::max(worst, distance(full_final, sum_of_parts));
  return make_check("coefficient_independence", worst, spec.tolerance,
                    skipped.empty() ? "arbitrary version states" : "skipped zero-coefficient versions " + skipped);
}

UnitaryOp version_phase_perturbation(const ChainLayout& chain, std::size_t version, double phi) {
  const Digits config = chain.version_config(version);
  const Complex phase = std::polar(1.0, phi);
  return build_phase(
      chain.layout, [&](std::size_t i) { return chain.matches_config(i, config) ? phase : Complex(1.0); },
      "version-phase");
}

UnitaryOp version_permutation_perturbation(const ChainLayout& chain, std::size_t version) {
  if (version >= chain.n_versions) throw RangeError("version index out of range");
  const std::size_t own = chain.detectors[version];
  const std::size_t other = chain.detectors[(version + 1) % chain.n_versions];
  const auto& layout = chain.layout;
  return build_permutation(
      layout,
      [&](std::size_t i) {
        if (layout.digit(i, chain.path) != version || layout.digit(i, own) != kDetectorYes) return i;
        return layout.with_digit(i, other, 1 - layout.digit(i, other));
      },
      "version-permutation");
}

CheckResult no_signaling_check(const ExperimentSpec& spec, const UnitaryOp& perturbation) {
  validate(spec);
  const ChainEvolution evo = evolve_chain(spec);
  const ChainLayout& chain = evo.chain;
  if (perturbation.dimension() != chain.layout.total_dimension()) {
    throw InvalidPerturbation("perturbation dimension does not match the chain layout");
  }
  if (!verify_unitary(perturbation, spec.tolerance).passed) {
    throw InvalidPerturbation("perturbation is not unitary");
  }
  const Digits protected_config = chain.version_config(0);
  for (std::size_t i = 0; i < chain.layout.total_dimension(); ++i) {
    if (!chain.matches_config(i, protected_config)) continue;
    double deviation = 0.0;
    bool diagonal_seen = false;
    for (const auto& [row, value] : perturbation.column(i)) {
      if (row == i) {
        deviation += std::abs(value - Complex(1.0));
        diagonal_seen = true;
      } else {
        deviation += std::abs(value);
      }
    }
    if (!diagonal_seen) deviation += 1.0;
    if (deviation > spec.tolerance) {
      throw InvalidPerturbation("perturbation acts on the version-1 configuration subspace");
    }
  }

  const StateVector perturbed = apply_unitary(perturbation, evo.post_detection);
  const StateVector perturbed_final = apply_steps(evo.operators.perception, perturbed);
  double acc = 0.0;
  for (std::size_t i = 0; i < chain.layout.total_dimension(); ++i) {
    if (chain.matches_config(i, protected_config)) acc += std::norm(evo.final_state[i] - perturbed_final[i]);
  }
  return make_check("no_signaling", std::sqrt(acc), spec.tolerance, perturbation.provenance());
}

// ---------------------------------------------------------------------------
// Runs

RunReport run_measurement_chain(const ExperimentSpec& spec, const std::vector<std::string>& checks) {
  const auto start = Clock::now();
  const auto active = resolve_checks(checks, chain_check_names());
  const ChainEvolution evo = evolve_chain(spec);
  const ChainLayout& chain = evo.chain;
  const double tol = spec.tolerance;

  RunReport report;
  report.experiment = "measurement_chain";
  summarize_final(report, chain, evo.final_state, tol);

  std::vector<Branch> pre_branches, post_branches;
  if (enabled(active, "branch_orthogonality") || enabled(active, "born_weights")) {
    pre_branches = decompose_branches(evo.post_detection, chain.record_registers_pre_perception(), tol);
    post_branches = decompose_branches(evo.final_state, chain.observer_name(0), tol);
  }

  for (const auto& name : active) {
    if (name == "unitarity") {
      double worst = 0.0;
      for (const auto* group : {&evo.operators.pre_perception, &evo.operators.perception}) {
        for (const auto& u : *group) worst = std::max(worst, verify_unitary(u, tol).residual);
      }
      report.checks.push_back(make_check(name, worst, tol));
    } else if (name == "final_state") {
      report.checks.push_back(
          make_check(name, distance(evo.final_state, expected_final_state(chain, spec.coefficients)), tol));
    } else if (name == "branch_orthogonality") {
      const double worst = std::max(max_pairwise_overlap(pre_branches, chain.layout),
                                    max_pairwise_overlap(post_branches, chain.layout));
      report.checks.push_back(make_check(name, worst, tol, "post-detection and post-perception"));
    } else if (name == "observer_coherence") {
      double worst = 0.0;
      for (std::size_t k = 0; k < chain.observers.size(); ++k) {
        worst = std::max({worst, observer_coherence(evo.post_detection, chain.observer_name(k)),
                          observer_coherence(evo.final_state, chain.observer_name(k))});
      }
      report.checks.push_back(make_check(name, worst, tol, "post-detection and post-perception"));
    } else if (name == "born_weights") {
      double worst = 0.0;
      for (std::size_t j = 0; j < spec.n_versions; ++j) {
        // Record registers are detectors then photons, which is also layout order.
        Digits one_hot;
        for (auto reg : chain.detectors) one_hot.push_back(chain.detectors[j] == reg ? 1 : 0);
        for (auto reg : chain.photons) one_hot.push_back(chain.photons[j] == reg ? 1 : 0);
        double before = 0.0, after = 0.0;
        for (const auto& b : pre_branches) {
          if (b.record_label == one_hot) before = std::norm(b.coefficient);
        }
        for (const auto& b : post_branches) {
          if (b.record_label.front() == message_level(j)) after = std::norm(b.coefficient);
        }
        const double expected = std::norm(spec.coefficients[j]);
        worst = std::max({worst, std::abs(before - after), std::abs(before - expected), std::abs(after - expected)});
      }
      report.checks.push_back(make_check(name, worst, tol));
    } else if (name == "mixed_record") {
      report.checks.push_back(make_check(name, mixed_record_weight(chain, evo.final_state), tol * tol));
    } else if (name == "observer_agreement") {
      if (spec.observers < 2) {
        report.checks.push_back({name, CheckStatus::kSkipped, 0.0, tol * tol, "single observer"});
      } else {
        report.checks.push_back(make_check(name, disagreement_weight(chain, evo.final_state), tol * tol));
      }
    } else if (name == "coefficient_independence") {
      report.checks.push_back(coefficient_independence_check(spec));
    } else if (name == "no_signaling") {
      const auto phase = no_signaling_check(spec, version_phase_perturbation(chain, 1, std::numbers::pi));
      const auto perm = no_signaling_check(spec, version_permutation_perturbation(chain, 1));
      report.checks.push_back(
          make_check(name, std::max(phase.residual, perm.residual), tol, "phase flip and permutation on version 2"));
    }
  }
  report.elapsed_ms = elapsed_ms(start);
  return report;
}

std::array<Complex, 2> primed_coefficients(Complex a1, Complex a2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {a1 * c - a2 * s, a2 * c + a1 * s};
}

RunReport run_appendix_rotation(const ExperimentSpec& spec, double theta, const std::vector<std::string>& checks) {
  const auto start = Clock::now();
  const auto active = resolve_checks(checks, rotation_check_names());
  if (spec.n_versions != 2) throw InvalidArgument("the rotated-frame experiment needs exactly two versions");
  const ChainEvolution evo = evolve_chain(spec);
  const ChainLayout& chain = evo.chain;
  const double tol = spec.tolerance;
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  const UnitaryOp rotation = build_basis_rotation(chain.layout, {theta, chain.version_config(0), chain.version_config(1)});
  const StateVector& before = evo.post_detection;  // a(1)|1:⟩|∅⟩ + a(2)|2:⟩|∅⟩
  const StateVector rotated = apply_unitary(rotation, before);
  const StateVector ket1 = chain.version_state(0, kSeesNothing);
  const StateVector ket2 = chain.version_state(1, kSeesNothing);
  const StateVector primed1 = apply_unitary(rotation, ket1);
  const StateVector primed2 = apply_unitary(rotation, ket2);
  const StateVector evolved1 = apply_steps(evo.operators.perception, primed1);
  const StateVector evolved2 = apply_steps(evo.operators.perception, primed2);

  RunReport report;
  report.experiment = "appendix_rotation";
  summarize_final(report, chain, evo.final_state, tol);

  for (const auto& name : active) {
    if (name == "primed_coefficients") {
      const auto expected = primed_coefficients(spec.coefficients[0], spec.coefficients[1], theta);
      const Complex got1 = inner_product(ket1, rotated);
      const Complex got2 = inner_product(ket2, rotated);
      // Component of the rotated state outside span{|1:⟩, |2:⟩}.
      const double outside = distance(rotated, superpose({{got1, ket1}, {got2, ket2}}));
      report.checks.push_back(
          make_check(name, std::max({std::abs(got1 - expected[0]), std::abs(got2 - expected[1]), outside}), tol));
    } else if (name == "primed_evolution") {
      const StateVector want1 = superpose({{c, chain.version_state(0, message_level(0))},
                                           {s, chain.version_state(1, message_level(1))}});
      const StateVector want2 = superpose({{-s, chain.version_state(0, message_level(0))},
                                           {c, chain.version_state(1, message_level(1))}});
      report.checks.push_back(make_check(name, std::max(distance(evolved1, want1), distance(evolved2, want2)), tol));
    } else if (name == "mixed_record") {
      const StateVector evolved_rotated = apply_steps(evo.operators.perception, rotated);
      const double worst = std::max({mixed_record_weight(chain, evo.final_state), mixed_record_weight(chain, evolved1),
                                     mixed_record_weight(chain, evolved2), mixed_record_weight(chain, evolved_rotated)});
      report.checks.push_back(make_check(name, worst, tol * tol));
    } else if (name == "basis_invariance") {
      // Coordinates of the final state in the rotated frame.
      const StateVector in_primed = apply_unitary(adjoint(rotation), evo.final_state);
      const auto w_plain = observer_level_weights(chain, evo.final_state);
      const auto w_primed = observer_level_weights(chain, in_primed);
      double worst = 0.0;
      bool same_records = true;
      for (std::size_t k = 0; k < w_plain.size(); ++k) {
        worst = std::max(worst, std::abs(w_plain[k] - w_primed[k]));
        same_records &= (w_plain[k] > tol * tol) == (w_primed[k] > tol * tol);
      }
      if (!same_records) worst = std::max(worst, 1.0);
      report.checks.push_back(make_check(name, worst, tol));
    }
  }
  report.elapsed_ms = elapsed_ms(start);
  return report;
}

}  // namespace branchsim
