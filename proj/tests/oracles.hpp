// tests/oracles.hpp
//
// Reference implementations used only by tests. Nothing here calls into the
// library's index arithmetic, operator builders or analysis code: digits are
// decoded by hand, evolution steps are written as rules on digit vectors,
// partial traces are brute-force double loops and eigenvalues come from a
// cyclic Jacobi sweep.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Dims = std::vector<std::size_t>;
using Digits = std::vector<std::size_t>;
using Rule = std::function<Digits(Digits)>;

inline std::size_t total(const Dims& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

// First register is the most significant digit.
inline Digits decode(const Dims& dims, std::size_t flat) {
  Digits d(dims.size());
  for (std::size_t r = dims.size(); r-- > 0;) {
    d[r] = flat % dims[r];
    flat /= dims[r];
  }
  return d;
}

inline std::size_t encode(const Dims& dims, const Digits& d) {
  std::size_t flat = 0;
  for (std::size_t r = 0; r < dims.size(); ++r) flat = flat * dims[r] + d[r];
  return flat;
}

// Chain registers laid out as P, detectors, [photons], observers.
struct Chain {
  std::size_t n = 2;
  std::size_t observers = 1;
  bool photons = false;

  Dims dims() const {
    Dims d{n};
    for (std::size_t j = 0; j < n; ++j) d.push_back(2);
    if (photons) {
      for (std::size_t j = 0; j < n; ++j) d.push_back(2);
    }
    for (std::size_t k = 0; k < observers; ++k) d.push_back(n + 2);
    return d;
  }
  std::size_t detector(std::size_t j) const { return 1 + j; }
  std::size_t photon(std::size_t j) const { return 1 + n + j; }
  std::size_t observer(std::size_t k) const { return 1 + n + (photons ? n : 0) + k; }
  std::size_t sensor(std::size_t j) const { return photons ? photon(j) : detector(j); }
};

inline Rule detection_rule(const Chain& c) {
  return [c](Digits d) {
    auto& det = d[c.detector(d[0])];
    det = 1 - det;
    return d;
  };
}

inline Rule emission_rule(const Chain& c) {
  return [c](Digits d) {
    for (std::size_t j = 0; j < c.n; ++j) {
      if (d[c.detector(j)] == 1) d[c.photon(j)] = 1 - d[c.photon(j)];
    }
    return d;
  };
}

inline Rule perception_rule(const Chain& c, std::size_t k) {
  return [c, k](Digits d) {
    std::size_t hot = 0, count = 0;
    bool clean = true;
    for (std::size_t j = 0; j < c.n; ++j) {
      const auto v = d[c.sensor(j)];
      if (v != 0) {
        ++count;
        hot = j;
        clean &= v == 1;
      }
    }
    if (count != 1 || !clean) return d;
    auto& o = d[c.observer(k)];
    if (o == 0) {
      o = hot + 1;
    } else if (o == hot + 1) {
      o = 0;
    }
    return d;
  };
}

inline std::vector<Rule> chain_rules(const Chain& c) {
  std::vector<Rule> rules{detection_rule(c)};
  if (c.photons) rules.push_back(emission_rule(c));
  for (std::size_t k = 0; k < c.observers; ++k) rules.push_back(perception_rule(c, k));
  return rules;
}

// Dense matrix whose column i is e_{rule(i)}.
inline Eigen::MatrixXcd permutation_matrix(const Dims& dims, const Rule& rule) {
  const auto n = static_cast<Eigen::Index>(total(dims));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(static_cast<Eigen::Index>(encode(dims, rule(decode(dims, static_cast<std::size_t>(i))))), i) = 1.0;
  }
  return m;
}

// Matrix-free application of a basis-permutation rule.
inline std::vector<Complex> evolve(const Dims& dims, const Rule& rule, const std::vector<Complex>& x) {
  std::vector<Complex> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != Complex(0.0)) y[encode(dims, rule(decode(dims, i)))] += x[i];
  }
  return y;
}

inline std::vector<Complex> evolve_all(const Dims& dims, const std::vector<Rule>& rules, std::vector<Complex> x) {
  for (const auto& r : rules) x = evolve(dims, r, x);
  return x;
}

// Σ a(j) |pa,j⟩|0...0⟩.
inline std::vector<Complex> chain_initial(const Chain& c, const std::vector<Complex>& a) {
  const Dims dims = c.dims();
  std::vector<Complex> x(total(dims));
  for (std::size_t j = 0; j < c.n; ++j) {
    Digits d(dims.size(), 0);
    d[0] = j;
    x[encode(dims, d)] = a[j];
  }
  return x;
}

// ρ_keep = Tr_rest |ψ⟩⟨ψ| by summing over every pair of basis states that
// agree on the traced-out registers.
inline Eigen::MatrixXcd partial_trace(const Dims& dims, const std::vector<Complex>& psi, const std::set<std::size_t>& keep) {
  Dims kept_dims;
  for (auto r : keep) kept_dims.push_back(dims[r]);
  const auto dk = static_cast<Eigen::Index>(total(kept_dims));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
  auto kept_index = [&](const Digits& d) {
    Digits k;
    for (auto r : keep) k.push_back(d[r]);
    return static_cast<Eigen::Index>(encode(kept_dims, k));
  };
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] == Complex(0.0)) continue;
    const Digits di = decode(dims, i);
    for (std::size_t j = 0; j < psi.size(); ++j) {
      if (psi[j] == Complex(0.0)) continue;
      const Digits dj = decode(dims, j);
      bool same_env = true;
      for (std::size_t r = 0; r < dims.size() && same_env; ++r) {
        if (!keep.contains(r)) same_env = di[r] == dj[r];
      }
      if (same_env) rho(kept_index(di), kept_index(dj)) += psi[i] * std::conj(psi[j]);
    }
  }
  return rho;
}

// Eigenvalues of a Hermitian matrix H = A + iB through the real symmetric
// embedding [[A, −B], [B, A]] (each eigenvalue appears twice) and cyclic Jacobi.
inline std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  const std::size_t n = static_cast<std::size_t>(h.rows());
  const std::size_t m = 2 * n;
  std::vector<std::vector<double>> s(m, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      s[i][j] = v.real();
      s[i + n][j + n] = v.real();
      s[i][j + n] = -v.imag();
      s[i + n][j] = v.imag();
    }
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) off += s[p][q] * s[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        if (std::abs(s[p][q]) < 1e-300) continue;
        const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double skp = s[k][p], skq = s[k][q];
          s[k][p] = c * skp - sn * skq;
          s[k][q] = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double spk = s[p][k], sqk = s[q][k];
          s[p][k] = c * spk - sn * sqk;
          s[q][k] = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = s[i][i];
  std::sort(diag.begin(), diag.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < m; i += 2) out.push_back(0.5 * (diag[i] + diag[i + 1]));
  return out;
}

inline double entropy_bits(const std::vector<double>& eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues) {
    if (l >= 1e-14) s -= l * std::log2(l);
  }
  return s;
}

inline double binary_entropy(double p) {
  double s = 0.0;
  for (double q : {p, 1.0 - p}) {
    if (q > 0.0) s -= q * std::log2(q);
  }
  return s;
}

inline std::vector<Complex> random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  double t = 0.0;
  for (auto& x : v) {
    x = Complex(g(rng), g(rng));
    t += std::norm(x);
  }
  for (auto& x : v) x /= std::sqrt(t);
  return v;
}

inline double distance(const std::vector<Complex>& x, std::span<const Complex> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i] - y[i]);
  return std::sqrt(acc);
}

}  // namespace oracle
