// include/branchsim/unitary.hpp
//
// Linear operators on a composite space. Three storage forms are supported:
// a phased basis permutation (U e_i = phase_i e_{image_i}), sparse columns,
// and a dense matrix. All builders in dynamics.hpp produce one of the first
// two; dense operators come from callers and from tests.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "branchsim/state.hpp"

namespace branchsim {

using DenseMatrix = Eigen::MatrixXcd;

/// Largest dimension that will be materialized as a dense matrix.
inline constexpr std::size_t kDenseDimensionCap = 2048;

struct PhasedPermutation {
  std::vector<std::size_t> image;
  std::vector<Complex> phase;
};

struct SparseColumns {
  // columns[j] lists the nonzero (row, value) entries of U e_j, sorted by row.
  std::vector<std::vector<std::pair<std::size_t, Complex>>> columns;
};

class UnitaryOp {
 public:
  using Representation = std::variant<PhasedPermutation, SparseColumns, DenseMatrix>;

  static UnitaryOp identity(std::size_t dimension, std::string provenance = "identity");
  /// Throws InvalidArgument unless `image` is a bijection on [0, n) and the
  /// vectors have equal length. Phases are not required to be unimodular;
  /// verify_unitary reports that.
  static UnitaryOp permutation(std::vector<std::size_t> image, std::vector<Complex> phase,
                               std::string provenance);
  static UnitaryOp sparse(SparseColumns columns, std::string provenance);
  static UnitaryOp dense(DenseMatrix matrix, std::string provenance);

  std::size_t dimension() const { return dimension_; }
  const std::string& provenance() const { return provenance_; }
  const Representation& representation() const { return rep_; }
  bool is_permutation() const { return std::holds_alternative<PhasedPermutation>(rep_); }

  /// Throws CapacityError above kDenseDimensionCap.
  DenseMatrix to_dense() const;
  /// Column U e_j as sorted (row, value) pairs.
  std::vector<std::pair<std::size_t, Complex>> column(std::size_t j) const;

 private:
  UnitaryOp(std::size_t dimension, Representation rep, std::string provenance)
      : dimension_(dimension), rep_(std::move(rep)), provenance_(std::move(provenance)) {}

  std::size_t dimension_;
  Representation rep_;
  std::string provenance_;
};

/// y = U x. Throws MismatchError when dimensions differ.
StateVector apply_unitary(const UnitaryOp& u, const StateVector& x);

/// The operator that applies `first`, then `second`.
UnitaryOp compose(const UnitaryOp& second, const UnitaryOp& first);

UnitaryOp adjoint(const UnitaryOp& u);

struct UnitarityCheck {
  bool passed = false;
  double residual = 0.0;  // max |(U†U − I)_ij|
  double tolerance = kTolerance;
};

UnitarityCheck verify_unitary(const UnitaryOp& u, double tolerance = kTolerance);

}  // namespace branchsim
