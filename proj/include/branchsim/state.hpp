// include/branchsim/state.hpp
//
// Dense state vectors over a SubsystemLayout.

#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "branchsim/layout.hpp"

namespace branchsim {

using Complex = std::complex<double>;

class StateVector {
 public:
  /// Zero vector over `layout`.
  explicit StateVector(SubsystemLayout layout);
  /// Throws MismatchError if the amplitude count differs from the layout dimension.
  StateVector(SubsystemLayout layout, std::vector<Complex> amplitudes);

  const SubsystemLayout& layout() const { return layout_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }

  Complex operator[](std::size_t i) const { return amplitudes_[i]; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }

  /// Amplitude of the product basis state with the given labels.
  Complex amplitude(std::span<const std::size_t> labels) const {
    return amplitudes_[layout_.encode(labels)];
  }

 private:
  SubsystemLayout layout_;
  std::vector<Complex> amplitudes_;
};

/// Basis vector |labels⟩. Throws RangeError for a label outside its register.
StateVector product_state(const SubsystemLayout& layout, std::span<const std::size_t> labels);

/// Linear combination Σ c_k |x_k⟩; not normalized. Throws MismatchError when
/// the states do not share a layout, InvalidArgument for an empty term list.
StateVector superpose(std::span<const std::pair<Complex, StateVector>> terms);
StateVector superpose(std::initializer_list<std::pair<Complex, StateVector>> terms);

/// ⟨x|y⟩, conjugate-linear in x.
Complex inner_product(const StateVector& x, const StateVector& y);

double norm(const StateVector& x);

/// x / ‖x‖. Throws DegenerateStateError when ‖x‖ ≤ 1e-14.
StateVector normalize(const StateVector& x);

/// ‖x − y‖.
double distance(const StateVector& x, const StateVector& y);

/// Inserts a register in basis level `label` at position `reg` of `full`,
/// so that the result lives on `full` and equals relative ⊗ |label⟩ with the
/// factors in layout order. `relative` must live on `full.without(reg)`.
StateVector embed(const StateVector& relative, const SubsystemLayout& full, std::size_t reg,
                  std::size_t label);

}  // namespace branchsim
