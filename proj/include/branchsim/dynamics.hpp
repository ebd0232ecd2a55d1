// include/branchsim/dynamics.hpp
//
// Builders for the evolution steps of a measurement chain. Every step is a
// controlled basis permutation (or, for the frame rotation, a 2x2 rotation
// on one plane), so unitarity can be checked exactly.
//
// Register conventions used by the builders:
//   particle path  levels 0..N-1 = path j+1
//   detector j     0 = "no" (ready), 1 = "yes"
//   photon j       0 = vacuum, 1 = emitted
//   observer       0 = sees nothing, 1..N = message "only classical state j",
//                  N+1 = "I see a mixed state"

#pragma once

#include <functional>
#include <map>
#include <string_view>

#include "branchsim/unitary.hpp"

namespace branchsim {

inline constexpr std::size_t kSeesNothing = 0;
inline constexpr std::size_t kDetectorNo = 0;
inline constexpr std::size_t kDetectorYes = 1;
inline constexpr std::size_t kPhotonVacuum = 0;
inline constexpr std::size_t kPhotonEmitted = 1;

/// Observer level for the message naming version `version` (0-based).
constexpr std::size_t message_level(std::size_t version) { return version + 1; }
/// Observer level meaning "I see a mixed state" in an N-version chain.
constexpr std::size_t mixed_level(std::size_t n_versions) { return n_versions + 1; }

/// Basis permutation given by a map on flat indices. Throws InvalidArgument
/// if `map` is not a bijection on [0, total_dimension).
UnitaryOp build_permutation(const SubsystemLayout& layout,
                            const std::function<std::size_t(std::size_t)>& map,
                            std::string provenance);

/// Diagonal operator with phase_of(i) on basis state i.
UnitaryOp build_phase(const SubsystemLayout& layout,
                      const std::function<Complex(std::size_t)>& phase_of,
                      std::string provenance);

/// `matrix` acting on one register, identity on the rest.
UnitaryOp build_local_unitary(const SubsystemLayout& layout, std::string_view reg,
                              const DenseMatrix& matrix);

/// Unconditional swap of levels a and b of one register.
UnitaryOp build_level_transposition(const SubsystemLayout& layout, std::string_view reg,
                                    std::size_t a, std::size_t b);

/// Controlled toggle: path = j flips detector j between "no" and "yes".
/// Needs one particle-path register with N levels and N detector registers.
UnitaryOp build_detection_unitary(const SubsystemLayout& layout);

/// Controlled toggle: detector j = "yes" flips photon j between vacuum and
/// emitted. Needs N detector and N photon registers.
UnitaryOp build_photon_emission_unitary(const SubsystemLayout& layout);

/// Registers the observers look at: the photon registers when the layout has
/// any, the detector registers otherwise.
std::vector<std::size_t> sensor_registers(const SubsystemLayout& layout);

/// Index j when the sensors are exactly one-hot at j (level 1 on sensor j,
/// level 0 elsewhere).
std::optional<std::size_t> one_hot_version(const SubsystemLayout& layout,
                                           std::span<const std::size_t> sensors, std::size_t flat);

/// Perception step for one observer: on sensor configuration one-hot at j,
/// swaps observer levels "sees nothing" and classical_configs[j]; identity on
/// every other configuration. Values must be message levels 1..N.
UnitaryOp build_perception_unitary(const SubsystemLayout& layout, std::string_view observer,
                                   const std::map<std::size_t, std::size_t>& classical_configs);

/// Same, with version j mapped to message j.
UnitaryOp build_perception_unitary(const SubsystemLayout& layout, std::string_view observer);

/// Rotation of the plane spanned by two configurations of the non-observer
/// registers, repeated for every observer label:
///   |first⟩  -> cos θ |first⟩ + sin θ |second⟩
///   |second⟩ -> −sin θ |first⟩ + cos θ |second⟩
struct BasisRotation {
  double theta = 0.0;
  Digits first;   // one label per non-observer register, in layout order
  Digits second;
};

UnitaryOp build_basis_rotation(const SubsystemLayout& layout, const BasisRotation& rotation);

}  // namespace branchsim
