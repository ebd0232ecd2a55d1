// src/state.cpp

#include "branchsim/state.hpp"

#include <cmath>

#include "branchsim/error.hpp"

namespace branchsim {

namespace {

void require_same_layout(const StateVector& x, const StateVector& y) {
  if (!(x.layout() == y.layout())) throw MismatchError("states live on different layouts");
}

}  // namespace

StateVector::StateVector(SubsystemLayout layout)
    : layout_(std::move(layout)), amplitudes_(layout_.total_dimension()) {}

StateVector::StateVector(SubsystemLayout layout, std::vector<Complex> amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.total_dimension()) {
    throw MismatchError("amplitude count " + std::to_string(amplitudes_.size()) +
                        " does not match layout dimension " +
                        std::to_string(layout_.total_dimension()));
  }
}

StateVector product_state(const SubsystemLayout& layout, std::span<const std::size_t> labels) {
  StateVector out(layout);
  out[layout.encode(labels)] = 1.0;
  return out;
}

StateVector superpose(std::span<const std::pair<Complex, StateVector>> terms) {
  if (terms.empty()) throw InvalidArgument("superpose needs at least one term");
  StateVector out(terms.front().second.layout());
  for (const auto& [c, x] : terms) {
    require_same_layout(out, x);
    auto src = x.amplitudes();
    auto dst = out.amplitudes();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  }
  return out;
}

StateVector superpose(std::initializer_list<std::pair<Complex, StateVector>> terms) {
  return superpose(std::span<const std::pair<Complex, StateVector>>(terms.begin(), terms.size()));
}

Complex inner_product(const StateVector& x, const StateVector& y) {
  require_same_layout(x, y);
  Complex acc = 0.0;
  auto a = x.amplitudes();
  auto b = y.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm(const StateVector& x) {
  double acc = 0.0;
  for (const auto& a : x.amplitudes()) acc += std::norm(a);
  return std::sqrt(acc);
}

StateVector normalize(const StateVector& x) {
  const double n = norm(x);
  if (!(n > 1e-14)) throw DegenerateStateError("cannot normalize a vector of norm " + std::to_string(n));
  StateVector out = x;
  for (auto& a : out.amplitudes()) a /= n;
  return out;
}

double distance(const StateVector& x, const StateVector& y) {
  require_same_layout(x, y);
  double acc = 0.0;
  auto a = x.amplitudes();
  auto b = y.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

StateVector embed(const StateVector& relative, const SubsystemLayout& full, std::size_t reg,
                  std::size_t label) {
  if (!(relative.layout() == full.without(reg))) {
    throw MismatchError("relative state does not match the layout with register removed");
  }
  if (label >= full.dimension(reg)) throw RangeError("embed label out of range");

  // Flat index in `full` = high * (dim_reg * stride_reg) + label * stride_reg + low,
  // where the relative index is high * stride_reg + low.
  const std::size_t stride = full.stride(reg);
  const std::size_t block = stride * full.dimension(reg);
  StateVector out(full);
  auto src = relative.amplitudes();
  for (std::size_t r = 0; r < src.size(); ++r) {
    const std::size_t high = r / stride;
    const std::size_t low = r % stride;
    out[high * block + label * stride + low] = src[r];
  }
  return out;
}

}  // namespace branchsim
