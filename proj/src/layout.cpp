// src/layout.cpp

#include "branchsim/layout.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "branchsim/error.hpp"

namespace branchsim {

std::string_view to_string(RegisterRole role) {
  switch (role) {
    case RegisterRole::kParticlePath: return "particle-path";
    case RegisterRole::kDetector: return "detector";
    case RegisterRole::kPhoton: return "photon";
    case RegisterRole::kObserver: return "observer";
  }
  return "unknown";
}

SubsystemLayout::SubsystemLayout(std::vector<Register> registers, std::size_t dimension_cap)
    : registers_(std::move(registers)) {
  if (registers_.empty()) throw LayoutError("layout needs at least one register");

  std::unordered_set<std::string> names;
  for (const auto& r : registers_) {
    if (!names.insert(r.name).second) throw LayoutError("duplicate register name '" + r.name + "'");
    if (r.dimension < 2) {
      throw LayoutError("register '" + r.name + "' has dimension " + std::to_string(r.dimension) +
                        " (minimum 2)");
    }
    if (total_dimension_ > dimension_cap / r.dimension) {
      throw CapacityError("total dimension exceeds cap of " + std::to_string(dimension_cap));
    }
    total_dimension_ *= r.dimension;
  }

  strides_.resize(registers_.size());
  std::size_t stride = 1;
  for (std::size_t i = registers_.size(); i-- > 0;) {
    strides_[i] = stride;
    stride *= registers_[i].dimension;
  }
}

std::optional<std::size_t> SubsystemLayout::find(std::string_view name) const {
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (registers_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SubsystemLayout::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw LayoutError("unknown register '" + std::string(name) + "'");
}

std::vector<std::size_t> SubsystemLayout::with_role(RegisterRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (registers_[i].role == role) out.push_back(i);
  }
  return out;
}

std::size_t SubsystemLayout::encode(std::span<const std::size_t> digits) const {
  if (digits.size() != registers_.size()) {
    throw RangeError("expected " + std::to_string(registers_.size()) + " labels, got " +
                     std::to_string(digits.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= registers_[i].dimension) {
      throw RangeError("label " + std::to_string(digits[i]) + " out of range for register '" +
                       registers_[i].name + "' of dimension " +
                       std::to_string(registers_[i].dimension));
    }
    flat += digits[i] * strides_[i];
  }
  return flat;
}

Digits SubsystemLayout::decode(std::size_t flat) const {
  if (flat >= total_dimension_) throw RangeError("flat index out of range");
  Digits digits(registers_.size());
  for (std::size_t i = 0; i < registers_.size(); ++i) digits[i] = digit(flat, i);
  return digits;
}

SubsystemLayout SubsystemLayout::subset(std::span<const std::size_t> regs) const {
  std::vector<std::size_t> sorted(regs.begin(), regs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Register> kept;
  for (auto r : sorted) kept.push_back(registers_.at(r));
  return SubsystemLayout(std::move(kept), std::numeric_limits<std::size_t>::max());
}

SubsystemLayout SubsystemLayout::without(std::size_t reg) const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (i != reg) keep.push_back(i);
  }
  return subset(keep);
}

SubsystemLayout make_layout(std::vector<Register> registers, std::size_t dimension_cap) {
  return SubsystemLayout(std::move(registers), dimension_cap);
}

}  // namespace branchsim
