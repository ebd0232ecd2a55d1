// include/branchsim/analysis.hpp
//
// Reduced density matrices and information measures, used to compare the
// branch structure against environment-based (decoherence / redundancy)
// accounts of classicality.

#pragma once

#include <string>
#include <vector>

#include "branchsim/unitary.hpp"

namespace branchsim {

/// Largest kept dimension for a reduced density matrix.
inline constexpr std::size_t kAnalysisDimensionCap = std::size_t{1} << 12;

/// Eigenvalues below this floor contribute 0 to the entropy.
inline constexpr double kEntropyEigenvalueFloor = 1e-14;

struct DensityMatrix {
  std::vector<std::string> registers;  // kept registers, in layout order
  DenseMatrix entries;

  std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }

  double hermiticity_residual() const;  // max |ρ − ρ†|
  double trace_residual() const;        // |tr ρ − 1|
  double min_eigenvalue() const;
  /// Hermitian, unit trace and PSD, each within `tolerance`.
  bool is_valid(double tolerance = kTolerance) const;
};

/// Partial trace over every register not named in `keep`. Throws
/// LayoutError for an unknown name, InvalidArgument for an empty keep set and
/// CapacityError when the kept dimension exceeds kAnalysisDimensionCap.
DensityMatrix reduced_density_matrix(const StateVector& state, const std::vector<std::string>& keep);

/// −Σ λ log₂ λ in bits. Throws InvalidArgument for a non-Hermitian input.
double von_neumann_entropy(const DensityMatrix& rho);

/// Largest |ρ_mn| between distinct message levels (m, n ≥ 1) of the
/// observer's reduced state.
double observer_coherence(const StateVector& state, const std::string& observer);

/// I(S:F) = S(ρ_S) + S(ρ_F) − S(ρ_SF), in bits. The sets must be nonempty and
/// disjoint.
double fragment_mutual_information(const StateVector& state, const std::vector<std::string>& fragment,
                                   const std::vector<std::string>& system);

}  // namespace branchsim
