// src/analysis.cpp

#include "branchsim/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "branchsim/error.hpp"

namespace branchsim {

double DensityMatrix::hermiticity_residual() const {
  if (entries.size() == 0) return 0.0;
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_residual() const { return std::abs(entries.trace() - Complex(1.0)); }

double DensityMatrix::min_eigenvalue() const {
  const DenseMatrix h = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double tolerance) const {
  return hermiticity_residual() <= tolerance && trace_residual() <= tolerance &&
         min_eigenvalue() >= -tolerance;
}

DensityMatrix reduced_density_matrix(const StateVector& state, const std::vector<std::string>& keep) {
  if (keep.empty()) throw InvalidArgument("reduced_density_matrix: keep set is empty");
  const SubsystemLayout& layout = state.layout();

  std::set<std::size_t> kept;
  for (const auto& name : keep) kept.insert(layout.index_of(name));

  // Per-register strides inside the kept and traced-out factors.
  std::vector<std::size_t> keep_stride(layout.size(), 0), env_stride(layout.size(), 0);
  std::size_t keep_dim = 1, env_dim = 1;
  for (std::size_t r = layout.size(); r-- > 0;) {
    if (kept.contains(r)) {
      keep_stride[r] = keep_dim;
      keep_dim *= layout.dimension(r);
    } else {
      env_stride[r] = env_dim;
      env_dim *= layout.dimension(r);
    }
  }
  if (keep_dim > kAnalysisDimensionCap) {
    throw CapacityError("reduced density matrix of dimension " + std::to_string(keep_dim) +
                        " exceeds cap " + std::to_string(kAnalysisDimensionCap));
  }

  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(env_dim));
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (state[i] == Complex(0.0)) continue;
    std::size_t k = 0, e = 0;
    for (std::size_t r = 0; r < layout.size(); ++r) {
      const std::size_t d = layout.digit(i, r);
      k += d * keep_stride[r];
      e += d * env_stride[r];
    }
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e)) = state[i];
  }

  DensityMatrix rho;
  for (auto r : kept) rho.registers.push_back(layout.at(r).name);
  rho.entries = m * m.adjoint();
  return rho;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  if (rho.hermiticity_residual() > kTolerance) {
    throw InvalidArgument("von_neumann_entropy: matrix is not Hermitian (residual " +
                          std::to_string(rho.hermiticity_residual()) + ")");
  }
  const DenseMatrix h = 0.5 * (rho.entries + rho.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda >= kEntropyEigenvalueFloor) s -= lambda * std::log2(lambda);
  }
  return std::max(s, 0.0);
}

double observer_coherence(const StateVector& state, const std::string& observer) {
  const DensityMatrix rho = reduced_density_matrix(state, {observer});
  double worst = 0.0;
  for (Eigen::Index m = 1; m < rho.entries.rows(); ++m) {
    for (Eigen::Index n = 1; n < rho.entries.cols(); ++n) {
      if (m != n) worst = std::max(worst, std::abs(rho.entries(m, n)));
    }
  }
  return worst;
}

double fragment_mutual_information(const StateVector& state, const std::vector<std::string>& fragment,
                                   const std::vector<std::string>& system) {
  if (fragment.empty() || system.empty()) {
    throw InvalidArgument("mutual information needs nonempty fragment and system sets");
  }
  for (const auto& f : fragment) {
    if (std::find(system.begin(), system.end(), f) != system.end()) {
      throw InvalidArgument("register '" + f + "' is in both the fragment and the system");
    }
  }
  std::vector<std::string> joint = system;
  joint.insert(joint.end(), fragment.begin(), fragment.end());

  const double s_sys = von_neumann_entropy(reduced_density_matrix(state, system));
  const double s_frag = von_neumann_entropy(reduced_density_matrix(state, fragment));
  const double s_joint = von_neumann_entropy(reduced_density_matrix(state, joint));
  return s_sys + s_frag - s_joint;
}

}  // namespace branchsim
