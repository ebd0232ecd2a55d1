// src/dynamics.cpp

#include "branchsim/dynamics.hpp"

#include <cmath>

#include "branchsim/error.hpp"

namespace branchsim {

namespace {

struct ChainRegisters {
  std::size_t path;
  std::size_t n_versions;
  std::vector<std::size_t> detectors;
};

ChainRegisters locate_chain(const SubsystemLayout& layout) {
  const auto paths = layout.with_role(RegisterRole::kParticlePath);
  if (paths.size() != 1) {
    throw LayoutError("expected exactly one particle-path register, found " +
                      std::to_string(paths.size()));
  }
  ChainRegisters c{paths.front(), layout.dimension(paths.front()),
                   layout.with_role(RegisterRole::kDetector)};
  if (c.detectors.size() != c.n_versions) {
    throw LayoutError("path register has " + std::to_string(c.n_versions) + " levels but layout has " +
                      std::to_string(c.detectors.size()) + " detector registers");
  }
  return c;
}

// Swaps levels 0 and 1 of `reg` in `flat`.
std::size_t toggle(const SubsystemLayout& layout, std::size_t flat, std::size_t reg) {
  const std::size_t d = layout.digit(flat, reg);
  if (d > 1) return flat;
  return layout.with_digit(flat, reg, 1 - d);
}

std::vector<std::size_t> non_observer_registers(const SubsystemLayout& layout) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    if (layout.at(r).role != RegisterRole::kObserver) out.push_back(r);
  }
  return out;
}

}  // namespace

UnitaryOp build_permutation(const SubsystemLayout& layout,
                            const std::function<std::size_t(std::size_t)>& map,
                            std::string provenance) {
  const std::size_t n = layout.total_dimension();
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = map(i);
  return UnitaryOp::permutation(std::move(image), std::vector<Complex>(n, Complex(1.0)),
                                std::move(provenance));
}

UnitaryOp build_phase(const SubsystemLayout& layout,
                      const std::function<Complex(std::size_t)>& phase_of,
                      std::string provenance) {
  const std::size_t n = layout.total_dimension();
  std::vector<std::size_t> image(n);
  std::vector<Complex> phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    image[i] = i;
    phase[i] = phase_of(i);
  }
  return UnitaryOp::permutation(std::move(image), std::move(phase), std::move(provenance));
}

UnitaryOp build_local_unitary(const SubsystemLayout& layout, std::string_view reg,
                              const DenseMatrix& matrix) {
  const std::size_t r = layout.index_of(reg);
  const auto d = static_cast<Eigen::Index>(layout.dimension(r));
  if (matrix.rows() != d || matrix.cols() != d) {
    throw MismatchError("local operator is " + std::to_string(matrix.rows()) + "x" +
                        std::to_string(matrix.cols()) + " but register '" + std::string(reg) +
                        "' has dimension " + std::to_string(d));
  }
  SparseColumns cols;
  cols.columns.resize(layout.total_dimension());
  for (std::size_t j = 0; j < layout.total_dimension(); ++j) {
    const auto in = static_cast<Eigen::Index>(layout.digit(j, r));
    for (Eigen::Index out = 0; out < d; ++out) {
      const Complex v = matrix(out, in);
      if (v != Complex(0.0)) {
        cols.columns[j].emplace_back(layout.with_digit(j, r, static_cast<std::size_t>(out)), v);
      }
    }
  }
  return UnitaryOp::sparse(std::move(cols), "local(" + std::string(reg) + ")");
}

UnitaryOp build_level_transposition(const SubsystemLayout& layout, std::string_view reg,
                                    std::size_t a, std::size_t b) {
  const std::size_t r = layout.index_of(reg);
  if (a >= layout.dimension(r) || b >= layout.dimension(r)) {
    throw RangeError("transposition level out of range for register '" + std::string(reg) + "'");
  }
  return build_permutation(
      layout,
      [&](std::size_t i) {
        const std::size_t d = layout.digit(i, r);
        if (d == a) return layout.with_digit(i, r, b);
        if (d == b) return layout.with_digit(i, r, a);
        return i;
      },
      "transpose(" + std::string(reg) + ")");
}

UnitaryOp build_detection_unitary(const SubsystemLayout& layout) {
  const ChainRegisters c = locate_chain(layout);
  return build_permutation(
      layout, [&](std::size_t i) { return toggle(layout, i, c.detectors[layout.digit(i, c.path)]); },
      "detection");
}

UnitaryOp build_photon_emission_unitary(const SubsystemLayout& layout) {
  const auto detectors = layout.with_role(RegisterRole::kDetector);
  const auto photons = layout.with_role(RegisterRole::kPhoton);
  if (photons.empty() || photons.size() != detectors.size()) {
    throw LayoutError("photon emission needs one photon register per detector");
  }
  return build_permutation(
      layout,
      [&](std::size_t i) {
        std::size_t out = i;
        for (std::size_t j = 0; j < detectors.size(); ++j) {
          if (layout.digit(i, detectors[j]) == kDetectorYes) out = toggle(layout, out, photons[j]);
        }
        return out;
      },
      "photon-emission");
}

std::vector<std::size_t> sensor_registers(const SubsystemLayout& layout) {
  auto photons = layout.with_role(RegisterRole::kPhoton);
  if (!photons.empty()) return photons;
  return layout.with_role(RegisterRole::kDetector);
}

std::optional<std::size_t> one_hot_version(const SubsystemLayout& layout,
                                           std::span<const std::size_t> sensors, std::size_t flat) {
  std::optional<std::size_t> hot;
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    const std::size_t d = layout.digit(flat, sensors[j]);
    if (d == 0) continue;
    if (d != 1 || hot) return std::nullopt;
    hot = j;
  }
  return hot;
}

UnitaryOp build_perception_unitary(const SubsystemLayout& layout, std::string_view observer,
                                   const std::map<std::size_t, std::size_t>& classical_configs) {
  const ChainRegisters c = locate_chain(layout);
  const std::size_t obs = layout.index_of(observer);
  if (layout.at(obs).role != RegisterRole::kObserver) {
    throw LayoutError("register '" + std::string(observer) + "' is not an observer register");
  }
  if (layout.dimension(obs) < c.n_versions + 2) {
    throw LayoutError("observer register '" + std::string(observer) + "' has " +
                      std::to_string(layout.dimension(obs)) + " levels; " +
                      std::to_string(c.n_versions + 2) + " needed");
  }
  const auto sensors = sensor_registers(layout);
  if (sensors.size() != c.n_versions) throw LayoutError("need one sensor register per version");

  std::vector<std::size_t> message(c.n_versions, kSeesNothing);
  for (const auto& [version, level] : classical_configs) {
    if (version >= c.n_versions) throw RangeError("classical configuration index out of range");
    if (level < 1 || level > c.n_versions) {
      throw RangeError("message level " + std::to_string(level) + " is not a classical message");
    }
    message[version] = level;
  }

  return build_permutation(
      layout,
      [&](std::size_t i) {
        const auto j = one_hot_version(layout, sensors, i);
        if (!j || message[*j] == kSeesNothing) return i;
        const std::size_t d = layout.digit(i, obs);
        if (d == kSeesNothing) return layout.with_digit(i, obs, message[*j]);
        if (d == message[*j]) return layout.with_digit(i, obs, kSeesNothing);
        return i;
      },
      "perception(" + std::string(observer) + ")");
}

UnitaryOp build_perception_unitary(const SubsystemLayout& layout, std::string_view observer) {
  const ChainRegisters c = locate_chain(layout);
  std::map<std::size_t, std::size_t> configs;
  for (std::size_t j = 0; j < c.n_versions; ++j) configs[j] = message_level(j);
  return build_perception_unitary(layout, observer, configs);
}

UnitaryOp build_basis_rotation(const SubsystemLayout& layout, const BasisRotation& rotation) {
  const auto span_regs = non_observer_registers(layout);
  if (rotation.first.size() != span_regs.size() || rotation.second.size() != span_regs.size()) {
    throw RangeError("rotation span labels need one entry per non-observer register (" +
                     std::to_string(span_regs.size()) + ")");
  }
  for (std::size_t k = 0; k < span_regs.size(); ++k) {
    if (rotation.first[k] >= layout.dimension(span_regs[k]) ||
        rotation.second[k] >= layout.dimension(span_regs[k])) {
      throw RangeError("rotation span label out of range for register '" +
                       layout.at(span_regs[k]).name + "'");
    }
  }
  if (rotation.first == rotation.second) throw InvalidArgument("rotation span labels are identical");

  auto with_config = [&](std::size_t flat, const Digits& config) {
    for (std::size_t k = 0; k < span_regs.size(); ++k) flat = layout.with_digit(flat, span_regs[k], config[k]);
    return flat;
  };
  auto matches = [&](std::size_t flat, const Digits& config) {
    for (std::size_t k = 0; k < span_regs.size(); ++k) {
      if (layout.digit(flat, span_regs[k]) != config[k]) return false;
    }
    return true;
  };

  const double c = std::cos(rotation.theta);
  const double s = std::sin(rotation.theta);
  SparseColumns cols;
  cols.columns.resize(layout.total_dimension());
  for (std::size_t j = 0; j < layout.total_dimension(); ++j) {
    if (matches(j, rotation.first)) {
      cols.columns[j] = {{j, c}, {with_config(j, rotation.second), s}};
    } else if (matches(j, rotation.second)) {
      cols.columns[j] = {{with_config(j, rotation.first), -s}, {j, c}};
    } else {
      cols.columns[j] = {{j, 1.0}};
    }
  }
  return UnitaryOp::sparse(std::move(cols), "basis-rotation");
}

}  // namespace branchsim
