// include/branchsim/layout.hpp
//
// Register layout of a composite Hilbert space. A layout is an ordered list
// of named registers; flat basis indices use mixed radix with the FIRST
// register as the most significant digit.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace branchsim {

inline constexpr double kTolerance = 1e-12;
inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 24;

enum class RegisterRole { kParticlePath, kDetector, kPhoton, kObserver };

std::string_view to_string(RegisterRole role);

struct Register {
  std::string name;
  std::size_t dimension = 0;
  RegisterRole role = RegisterRole::kParticlePath;

  bool operator==(const Register&) const = default;
};

using Digits = std::vector<std::size_t>;

class SubsystemLayout {
 public:
  /// Throws LayoutError on an empty list, a duplicate name or a dimension
  /// below 2, and CapacityError when the product exceeds `dimension_cap`.
  explicit SubsystemLayout(std::vector<Register> registers,
                           std::size_t dimension_cap = kDefaultDimensionCap);

  std::size_t total_dimension() const { return total_dimension_; }
  std::size_t size() const { return registers_.size(); }
  const std::vector<Register>& registers() const { return registers_; }
  const Register& at(std::size_t reg) const { return registers_.at(reg); }
  std::size_t dimension(std::size_t reg) const { return registers_.at(reg).dimension; }
  std::size_t stride(std::size_t reg) const { return strides_.at(reg); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Like find(), but throws LayoutError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::size_t> with_role(RegisterRole role) const;

  /// Throws RangeError when a digit is out of range or the count is wrong.
  std::size_t encode(std::span<const std::size_t> digits) const;
  Digits decode(std::size_t flat) const;

  std::size_t digit(std::size_t flat, std::size_t reg) const {
    return (flat / strides_[reg]) % registers_[reg].dimension;
  }
  std::size_t with_digit(std::size_t flat, std::size_t reg, std::size_t value) const {
    return flat - digit(flat, reg) * strides_[reg] + value * strides_[reg];
  }

  /// Layout with the listed registers (by position) kept, in layout order.
  SubsystemLayout subset(std::span<const std::size_t> regs) const;
  /// Layout with one register removed.
  SubsystemLayout without(std::size_t reg) const;

  bool operator==(const SubsystemLayout& other) const { return registers_ == other.registers_; }

 private:
  std::vector<Register> registers_;
  std::vector<std::size_t> strides_;
  std::size_t total_dimension_ = 1;
};

SubsystemLayout make_layout(std::vector<Register> registers,
                            std::size_t dimension_cap = kDefaultDimensionCap);

}  // namespace branchsim
