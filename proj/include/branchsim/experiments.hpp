// include/branchsim/experiments.hpp
//
// Measurement-chain experiments: a particle in a superposition of N paths,
// one detector per path, optional photon registers, and one or more
// observers. Runs are deterministic; every check reports its residual
// against the run's tolerance.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "branchsim/dynamics.hpp"

namespace branchsim {

struct ExperimentSpec {
  std::size_t n_versions = 2;
  std::vector<Complex> coefficients;  // a(j), Σ|a(j)|² = 1
  std::size_t observers = 1;
  bool photon_model = false;
  std::vector<double> rotation_thetas;
  double tolerance = kTolerance;
  // Test hook: the first observer's perception is followed by a swap of its
  // message-1 and mixed-state levels, so version 1 writes "I see a mixed state".
  bool negative_control = false;
};

/// Throws InvalidArgument when the spec breaks its invariants.
void validate(const ExperimentSpec& spec);

/// Register layout of a chain, with the positions of each register group.
struct ChainLayout {
  SubsystemLayout layout;
  std::size_t n_versions = 0;
  std::size_t path = 0;
  std::vector<std::size_t> detectors;
  std::vector<std::size_t> photons;  // empty without the photon model
  std::vector<std::size_t> observers;

  /// Labels of the non-observer registers for version j after detection
  /// (and emission): path j, detector j "yes", photon j emitted.
  Digits version_config(std::size_t j) const;
  /// |version j⟩ ⊗ |level⟩ on every observer register.
  StateVector version_state(std::size_t j, std::size_t observer_level) const;
  /// |pa,j⟩ with all detectors "no", photons in vacuum, observers seeing nothing.
  StateVector ready_state(std::size_t j) const;
  /// Labels of the registers the detection step writes (detectors, then photons).
  std::vector<std::string> record_registers_pre_perception() const;
  const std::string& observer_name(std::size_t k) const { return layout.at(observers.at(k)).name; }
  std::size_t mixed_level() const { return branchsim::mixed_level(n_versions); }
  /// True when the non-observer registers of `flat` equal `config`.
  bool matches_config(std::size_t flat, const Digits& config) const;
};

/// Registers P, detectors (DH/DV for two versions, D1..DN otherwise),
/// optional photons, then observers (Obs, or Obs1..ObsK). Throws
/// CapacityError above the dimension cap.
ChainLayout make_chain_layout(std::size_t n_versions, std::size_t observers, bool photon_model,
                              std::size_t dimension_cap = kDefaultDimensionCap);
ChainLayout make_chain_layout(const ExperimentSpec& spec);

/// Evolution steps of a chain, in application order.
struct ChainOperators {
  std::vector<UnitaryOp> pre_perception;  // detection, then emission
  std::vector<UnitaryOp> perception;      // one per observer
};

ChainOperators build_chain_operators(const ChainLayout& chain, bool negative_control = false);

/// Applies a sequence of operators in order.
StateVector apply_steps(const std::vector<UnitaryOp>& steps, const StateVector& x);

struct ChainEvolution {
  ChainLayout chain;
  ChainOperators operators;
  StateVector initial;         // Σ a(j)|pa,j⟩ ⊗ ready registers
  StateVector post_detection;  // after detection and emission
  StateVector final_state;     // after every observer's perception step
};

ChainEvolution evolve_chain(const ExperimentSpec& spec);

/// Σ a(j)|version j⟩|Mj⟩...|Mj⟩, built directly from product states.
StateVector expected_final_state(const ChainLayout& chain, std::span<const Complex> coefficients);

// ---------------------------------------------------------------------------
// Branch decomposition

struct Branch {
  std::vector<std::size_t> record_registers;  // positions in the full layout
  Digits record_label;                        // one level per record register
  std::string label;                          // printable form of record_label
  Complex coefficient;                        // a(j)
  StateVector relative_state;                 // unit norm, on the remaining registers
};

/// Relative-state decomposition with respect to one or more record registers.
/// Labels with weight ≤ tolerance² are dropped. The record basis must be
/// orthogonal (it is: record labels are basis levels). The coefficient's
/// phase is that of the largest-magnitude amplitude inside the branch.
/// Throws LayoutError for an unknown register, InvalidArgument for a
/// non-unit state.
std::vector<Branch> decompose_branches(const StateVector& state,
                                       const std::vector<std::string>& record_registers,
                                       double tolerance = kTolerance);
std::vector<Branch> decompose_branches(const StateVector& state, const std::string& record_register,
                                       double tolerance = kTolerance);

/// a(j) · (relative_state ⊗ |label⟩) on the full layout.
StateVector branch_vector(const Branch& branch, const SubsystemLayout& full);

/// Printable name of an observer level in an N-version chain.
std::string observer_level_label(std::size_t level, std::size_t n_versions);
/// Message the observer has written at `level`.
std::string observer_message(std::size_t level, std::size_t n_versions);

// ---------------------------------------------------------------------------
// Checks and reports

enum class CheckStatus { kPass, kFail, kSkipped };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kSkipped;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

/// Pass iff residual ≤ threshold.
CheckResult make_check(std::string name, double residual, double threshold, std::string note = {});

struct BranchRow {
  std::string label;
  double weight = 0.0;
  std::string message;
};

struct RunReport {
  std::string experiment;
  std::size_t dimension = 0;
  double final_norm = 0.0;
  std::size_t support = 0;  // basis states with weight > tolerance²
  std::vector<BranchRow> branches;
  std::vector<CheckResult> checks;
  double elapsed_ms = 0.0;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
};

/// Names of the checks run_measurement_chain knows, in report order.
const std::vector<std::string>& chain_check_names();
/// Names of the checks run_appendix_rotation knows, in report order.
const std::vector<std::string>& rotation_check_names();

/// Runs the chain and the enabled checks (all of chain_check_names() when
/// `checks` is empty). Throws InvalidArgument for an unknown check name.
RunReport run_measurement_chain(const ExperimentSpec& spec, const std::vector<std::string>& checks = {});

/// For each j with a(j) ≠ 0: the branch of the full run that carries the
/// record version j produces on its own, divided by a(j), against the run
/// with a(j) = 1 and every other coefficient 0.
CheckResult coefficient_independence_check(const ExperimentSpec& spec);

/// Variant for arbitrary (possibly non-orthogonal) initial version states on
/// make_chain_layout(spec). Branch j of the full run is taken as the
/// difference between the runs with and without version j present.
CheckResult coefficient_independence_check(const ExperimentSpec& spec,
                                           std::span<const StateVector> version_states);

/// Phase e^{iφ} on every basis state whose non-observer registers hold the
/// configuration of version `version`.
UnitaryOp version_phase_perturbation(const ChainLayout& chain, std::size_t version, double phi);

/// Permutation inside the path-`version` subspace: toggles the detector of
/// the next version whenever detector `version` reads "yes".
UnitaryOp version_permutation_perturbation(const ChainLayout& chain, std::size_t version);

/// Runs the chain with and without `perturbation` applied before perception
/// and compares the version-1 component of the two final states. Throws
/// InvalidPerturbation when the perturbation is not unitary or does not act
/// as the identity on the version-1 configuration subspace.
CheckResult no_signaling_check(const ExperimentSpec& spec, const UnitaryOp& perturbation);

/// Total weight on basis states where two observers hold different levels.
double disagreement_weight(const ChainLayout& chain, const StateVector& state);
/// Skipped for a single observer; otherwise pass iff weight ≤ tolerance².
CheckResult multi_observer_agreement(const ExperimentSpec& spec);

/// Total weight on observer levels ≥ N+1 (the mixed-state message and
/// anything beyond the classical messages), summed over observers.
double mixed_record_weight(const ChainLayout& chain, const StateVector& state);

/// Coordinates of a(1)|1:⟩ + a(2)|2:⟩ after the frame rotation by θ acts on
/// it: (a1 cos θ − a2 sin θ, a2 cos θ + a1 sin θ).
std::array<Complex, 2> primed_coefficients(Complex a1, Complex a2, double theta);

/// Two-version run in a rotated particle-detector frame. Requires N = 2.
RunReport run_appendix_rotation(const ExperimentSpec& spec, double theta,
                                const std::vector<std::string>& checks = {});

}  // namespace branchsim
