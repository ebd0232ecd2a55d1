// src/unitary.cpp

#include "branchsim/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "branchsim/error.hpp"

namespace branchsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dimension(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw MismatchError(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                        std::to_string(b));
  }
}

std::vector<std::pair<std::size_t, Complex>> merge_entries(
    std::vector<std::pair<std::size_t, Complex>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::size_t, Complex>> out;
  for (const auto& e : entries) {
    if (!out.empty() && out.back().first == e.first) {
      out.back().second += e.second;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second == Complex(0.0); });
  return out;
}

SparseColumns to_sparse(const UnitaryOp& u) {
  SparseColumns out;
  out.columns.resize(u.dimension());
  for (std::size_t j = 0; j < u.dimension(); ++j) out.columns[j] = u.column(j);
  return out;
}

}  // namespace

UnitaryOp UnitaryOp::identity(std::size_t dimension, std::string provenance) {
  PhasedPermutation p;
  p.image.resize(dimension);
  for (std::size_t i = 0; i < dimension; ++i) p.image[i] = i;
  p.phase.assign(dimension, Complex(1.0));
  return UnitaryOp(dimension, std::move(p), std::move(provenance));
}

UnitaryOp UnitaryOp::permutation(std::vector<std::size_t> image, std::vector<Complex> phase,
                                 std::string provenance) {
  if (image.size() != phase.size()) throw InvalidArgument("permutation: image/phase length differ");
  std::vector<bool> hit(image.size(), false);
  for (auto target : image) {
    if (target >= image.size() || hit[target]) {
      throw InvalidArgument("permutation '" + provenance + "' is not a bijection");
    }
    hit[target] = true;
  }
  const std::size_t n = image.size();
  return UnitaryOp(n, PhasedPermutation{std::move(image), std::move(phase)}, std::move(provenance));
}

UnitaryOp UnitaryOp::sparse(SparseColumns columns, std::string provenance) {
  const std::size_t n = columns.columns.size();
  for (auto& col : columns.columns) {
    for (const auto& [row, value] : col) {
      if (row >= n) throw InvalidArgument("sparse operator row index out of range");
    }
    col = merge_entries(std::move(col));
  }
  return UnitaryOp(n, std::move(columns), std::move(provenance));
}

UnitaryOp UnitaryOp::dense(DenseMatrix matrix, std::string provenance) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("dense operator must be square");
  const auto n = static_cast<std::size_t>(matrix.rows());
  return UnitaryOp(n, std::move(matrix), std::move(provenance));
}

std::vector<std::pair<std::size_t, Complex>> UnitaryOp::column(std::size_t j) const {
  return std::visit(
      overloaded{
          [&](const PhasedPermutation& p) {
            return std::vector<std::pair<std::size_t, Complex>>{{p.image[j], p.phase[j]}};
          },
          [&](const SparseColumns& s) { return s.columns[j]; },
          [&](const DenseMatrix& m) {
            std::vector<std::pair<std::size_t, Complex>> col;
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
              const Complex v = m(r, static_cast<Eigen::Index>(j));
              if (v != Complex(0.0)) col.emplace_back(static_cast<std::size_t>(r), v);
            }
            return col;
          },
      },
      rep_);
}

DenseMatrix UnitaryOp::to_dense() const {
  if (dimension_ > kDenseDimensionCap) {
    throw CapacityError("operator of dimension " + std::to_string(dimension_) +
                        " is too large to materialize densely");
  }
  if (const auto* m = std::get_if<DenseMatrix>(&rep_)) return *m;
  const auto n = static_cast<Eigen::Index>(dimension_);
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (std::size_t j = 0; j < dimension_; ++j) {
    for (const auto& [row, value] : column(j)) {
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) += value;
    }
  }
  return out;
}

StateVector apply_unitary(const UnitaryOp& u, const StateVector& x) {
  require_dimension(u.dimension(), x.dimension(), "apply_unitary");
  StateVector y(x.layout());
  auto in = x.amplitudes();
  auto out = y.amplitudes();
  std::visit(overloaded{
                 [&](const PhasedPermutation& p) {
                   for (std::size_t j = 0; j < in.size(); ++j) out[p.image[j]] += p.phase[j] * in[j];
                 },
                 [&](const SparseColumns& s) {
                   for (std::size_t j = 0; j < in.size(); ++j) {
                     if (in[j] == Complex(0.0)) continue;
                     for (const auto& [row, value] : s.columns[j]) out[row] += value * in[j];
                   }
                 },
                 [&](const DenseMatrix& m) {
                   Eigen::Map<const Eigen::VectorXcd> xv(in.data(), static_cast<Eigen::Index>(in.size()));
                   Eigen::Map<Eigen::VectorXcd> yv(out.data(), static_cast<Eigen::Index>(out.size()));
                   yv.noalias() = m * xv;
                 },
             },
             u.representation());
  return y;
}

UnitaryOp compose(const UnitaryOp& second, const UnitaryOp& first) {
  require_dimension(second.dimension(), first.dimension(), "compose");
  std::string provenance = second.provenance() + " * " + first.provenance();
  const std::size_t n = first.dimension();

  const auto* p2 = std::get_if<PhasedPermutation>(&second.representation());
  const auto* p1 = std::get_if<PhasedPermutation>(&first.representation());
  if (p1 && p2) {
    std::vector<std::size_t> image(n);
    std::vector<Complex> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
      image[i] = p2->image[p1->image[i]];
      phase[i] = p2->phase[p1->image[i]] * p1->phase[i];
    }
    return UnitaryOp::permutation(std::move(image), std::move(phase), std::move(provenance));
  }
  if (std::holds_alternative<DenseMatrix>(second.representation()) ||
      std::holds_alternative<DenseMatrix>(first.representation())) {
    return UnitaryOp::dense(second.to_dense() * first.to_dense(), std::move(provenance));
  }

  SparseColumns out;
  out.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::size_t, Complex>> acc;
    for (const auto& [mid, v1] : first.column(j)) {
      for (const auto& [row, v2] : second.column(mid)) acc.emplace_back(row, v2 * v1);
    }
    out.columns[j] = std::move(acc);
  }
  return UnitaryOp::sparse(std::move(out), std::move(provenance));
}

UnitaryOp adjoint(const UnitaryOp& u) {
  std::string provenance = "adjoint(" + u.provenance() + ")";
  const std::size_t n = u.dimension();
  if (const auto* p = std::get_if<PhasedPermutation>(&u.representation())) {
    std::vector<std::size_t> image(n);
    std::vector<Complex> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
      image[p->image[i]] = i;
      phase[p->image[i]] = std::conj(p->phase[i]);
    }
    return UnitaryOp::permutation(std::move(image), std::move(phase), std::move(provenance));
  }
  if (const auto* m = std::get_if<DenseMatrix>(&u.representation())) {
    return UnitaryOp::dense(m->adjoint(), std::move(provenance));
  }
  SparseColumns out;
  out.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [row, value] : u.column(j)) out.columns[row].emplace_back(j, std::conj(value));
  }
  return UnitaryOp::sparse(std::move(out), std::move(provenance));
}

UnitarityCheck verify_unitary(const UnitaryOp& u, double tolerance) {
  UnitarityCheck check;
  check.tolerance = tolerance;
  const std::size_t n = u.dimension();

  if (const auto* m = std::get_if<DenseMatrix>(&u.representation())) {
    const auto id = DenseMatrix::Identity(m->rows(), m->cols());
    check.residual = (m->adjoint() * *m - id).cwiseAbs().maxCoeff();
  } else if (const auto* p = std::get_if<PhasedPermutation>(&u.representation())) {
    // Bijectivity is enforced on construction, so U†U is diagonal.
    for (std::size_t i = 0; i < n; ++i) {
      check.residual = std::max(check.residual, std::abs(std::norm(p->phase[i]) - 1.0));
    }
  } else {
    const SparseColumns s = to_sparse(u);
    // (U†U)_ij = Σ_r conj(U_ri) U_rj, accumulated row by row.
    std::vector<std::vector<std::pair<std::size_t, Complex>>> rows(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& [row, value] : s.columns[j]) rows[row].emplace_back(j, value);
    }
    std::unordered_map<std::size_t, Complex> gram;
    for (const auto& row : rows) {
      for (const auto& [i, vi] : row) {
        for (const auto& [j, vj] : row) gram[i * n + j] += std::conj(vi) * vj;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!gram.contains(i * n + i)) check.residual = std::max(check.residual, 1.0);
    }
    for (const auto& [key, value] : gram) {
      const Complex target = (key / n == key % n) ? Complex(1.0) : Complex(0.0);
      check.residual = std::max(check.residual, std::abs(value - target));
    }
  }
  check.passed = check.residual <= tolerance;
  return check;
}

}  // namespace branchsim
