#include <doctest.h>

#include <numbers>

#include "../oracles.hpp"
#include "../test_support.hpp"
#include "branchsim/dynamics.hpp"
#include "branchsim/error.hpp"

using namespace branchsim;
using branchsim::testing::random_complex;
using branchsim::testing::random_state;

namespace {

SubsystemLayout chain_layout(std::size_t n, std::size_t observers, bool photons) {
  std::vector<Register> regs{{"P", n, RegisterRole::kParticlePath}};
  for (std::size_t j = 0; j < n; ++j) regs.push_back({"D" + std::to_string(j + 1), 2, RegisterRole::kDetector});
  if (photons) {
    for (std::size_t j = 0; j < n; ++j) regs.push_back({"Ph" + std::to_string(j + 1), 2, RegisterRole::kPhoton});
  }
  for (std::size_t k = 0; k < observers; ++k) {
    regs.push_back({"Obs" + std::to_string(k + 1), n + 2, RegisterRole::kObserver});
  }
  return make_layout(std::move(regs));
}

StateVector ket(const SubsystemLayout& layout, std::vector<std::size_t> labels) {
  return product_state(layout, labels);
}

DenseMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<DenseMatrix>(m).householderQ();
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("detection maps the particle superposition onto two versions") {
    const auto layout = chain_layout(2, 1, false);
    const Complex a1(0.6, 0.0), a2(0.0, 0.8);
    const auto before = superpose({{a1, ket(layout, {0, 0, 0, 0})}, {a2, ket(layout, {1, 0, 0, 0})}});
    const auto after = apply_unitary(build_detection_unitary(layout), before);
    const auto expect = superpose({{a1, ket(layout, {0, 1, 0, 0})}, {a2, ket(layout, {1, 0, 1, 0})}});
    CHECK(distance(after, expect) == 0.0);
  }

  TEST_CASE("detection on path 1 sets DH to yes") {
    const auto layout = chain_layout(2, 1, false);
    const auto after = apply_unitary(build_detection_unitary(layout), ket(layout, {0, 0, 0, 0}));
    CHECK(distance(after, ket(layout, {0, 1, 0, 0})) == 0.0);
  }

  TEST_CASE("detection is an involution") {
    const auto layout = chain_layout(3, 1, false);
    const auto u = build_detection_unitary(layout);
    const DenseMatrix twice = compose(u, u).to_dense();
    CHECK(twice.isApprox(DenseMatrix::Identity(twice.rows(), twice.cols())));
  }

  TEST_CASE("detection requires the chain registers") {
    const auto no_path = make_layout({{"D1", 2, RegisterRole::kDetector}, {"D2", 2, RegisterRole::kDetector}});
    CHECK_THROWS_AS(build_detection_unitary(no_path), LayoutError);
    const auto short_detectors = make_layout({{"P", 3, RegisterRole::kParticlePath}, {"D1", 2, RegisterRole::kDetector}});
    CHECK_THROWS_AS(build_detection_unitary(short_detectors), LayoutError);
  }

  TEST_CASE("perception writes the version's message") {
    const auto layout = chain_layout(2, 1, false);
    const auto u = build_perception_unitary(layout, "Obs1");
    CHECK(distance(apply_unitary(u, ket(layout, {0, 1, 0, 0})), ket(layout, {0, 1, 0, 1})) == 0.0);
    CHECK(distance(apply_unitary(u, ket(layout, {1, 0, 1, 0})), ket(layout, {1, 0, 1, 2})) == 0.0);

    const Complex a1(0.6), a2(0.8);
    const auto before = superpose({{a1, ket(layout, {0, 1, 0, 0})}, {a2, ket(layout, {1, 0, 1, 0})}});
    const auto expect = superpose({{a1, ket(layout, {0, 1, 0, 1})}, {a2, ket(layout, {1, 0, 1, 2})}});
    CHECK(distance(apply_unitary(u, before), expect) == 0.0);

    // No detector fired: the observer still sees nothing.
    CHECK(distance(apply_unitary(u, ket(layout, {0, 0, 0, 0})), ket(layout, {0, 0, 0, 0})) == 0.0);
    // Both fired (not one-hot) and the mixed level are left alone.
    CHECK(distance(apply_unitary(u, ket(layout, {0, 1, 1, 0})), ket(layout, {0, 1, 1, 0})) == 0.0);
    CHECK(distance(apply_unitary(u, ket(layout, {0, 1, 0, 3})), ket(layout, {0, 1, 0, 3})) == 0.0);
  }

  TEST_CASE("perception never maps into the mixed-state level") {
    for (std::size_t n : {2u, 3u, 4u}) {
      const auto layout = chain_layout(n, 2, false);
      for (const char* obs : {"Obs1", "Obs2"}) {
        const auto u = build_perception_unitary(layout, obs);
        const std::size_t r = layout.index_of(obs);
        for (std::size_t i = 0; i < layout.total_dimension(); ++i) {
          for (const auto& [row, value] : u.column(i)) {
            if (layout.digit(row, r) == mixed_level(n)) REQUIRE(layout.digit(i, r) == mixed_level(n));
          }
        }
      }
    }
  }

  TEST_CASE("perception validation") {
    auto regs = std::vector<Register>{{"P", 3, RegisterRole::kParticlePath},
                                      {"D1", 2, RegisterRole::kDetector},
                                      {"D2", 2, RegisterRole::kDetector},
                                      {"D3", 2, RegisterRole::kDetector},
                                      {"Obs", 4, RegisterRole::kObserver}};
    const auto small_observer = make_layout(regs);
    CHECK_THROWS_AS(build_perception_unitary(small_observer, "Obs"), LayoutError);
    const auto layout = chain_layout(2, 1, false);
    CHECK_THROWS_AS(build_perception_unitary(layout, "D1"), LayoutError);
    CHECK_THROWS_AS(build_perception_unitary(layout, "Obs1", {{0, 3}}), RangeError);
    CHECK_THROWS_AS(build_perception_unitary(layout, "Obs1", {{0, 0}}), RangeError);
    CHECK_THROWS_AS(build_perception_unitary(layout, "Obs1", {{2, 1}}), RangeError);
    // A custom message map is still a permutation.
    CHECK(verify_unitary(build_perception_unitary(layout, "Obs1", {{0, 2}, {1, 1}})).passed);
  }

  TEST_CASE("already-written record maps back to nothing") {
    const auto layout = chain_layout(2, 1, false);
    const auto u = build_perception_unitary(layout, "Obs1");
    CHECK(distance(apply_unitary(u, ket(layout, {0, 1, 0, 1})), ket(layout, {0, 1, 0, 0})) == 0.0);
  }

  TEST_CASE("photon model: emission then perception through photons") {
    const auto layout = chain_layout(2, 1, true);
    const auto emit = build_photon_emission_unitary(layout);
    const auto perceive = build_perception_unitary(layout, "Obs1");
    const auto detected = apply_unitary(build_detection_unitary(layout), ket(layout, {1, 0, 0, 0, 0, 0}));
    const auto emitted = apply_unitary(emit, detected);
    CHECK(distance(emitted, ket(layout, {1, 0, 1, 0, 1, 0})) == 0.0);
    CHECK(distance(apply_unitary(perceive, emitted), ket(layout, {1, 0, 1, 0, 1, 2})) == 0.0);
    // Without emitted photons the observer sees nothing even though a detector fired.
    CHECK(distance(apply_unitary(perceive, detected), detected) == 0.0);
    CHECK_THROWS_AS(build_photon_emission_unitary(chain_layout(2, 1, false)), LayoutError);
  }

  TEST_CASE("builders agree with the rule-based oracle matrices") {
    for (bool photons : {false, true}) {
      const oracle::Chain c{2, 2, photons};
      const auto layout = chain_layout(2, 2, photons);
      const auto dims = c.dims();
      CHECK((build_detection_unitary(layout).to_dense() - oracle::permutation_matrix(dims, oracle::detection_rule(c)))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      if (photons) {
        CHECK((build_photon_emission_unitary(layout).to_dense() -
               oracle::permutation_matrix(dims, oracle::emission_rule(c)))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
      }
      for (std::size_t k = 0; k < 2; ++k) {
        const auto u = build_perception_unitary(layout, "Obs" + std::to_string(k + 1));
        CHECK((u.to_dense() - oracle::permutation_matrix(dims, oracle::perception_rule(c, k))).cwiseAbs().maxCoeff() ==
              0.0);
      }
    }
  }

  TEST_CASE("basis rotation") {
    const auto layout = chain_layout(2, 1, false);
    const Digits one{0, 1, 0}, two{1, 0, 1};
    const auto zero = build_basis_rotation(layout, {0.0, one, two});
    CHECK((zero.to_dense() - DenseMatrix::Identity(32, 32)).cwiseAbs().maxCoeff() == 0.0);

    const double theta = 0.83;
    const auto r = build_basis_rotation(layout, {theta, one, two});
    const auto back = build_basis_rotation(layout, {-theta, one, two});
    CHECK((compose(back, r).to_dense() - DenseMatrix::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-12);

    // |1:⟩|∅⟩ -> cos θ |1:⟩|∅⟩ + sin θ |2:⟩|∅⟩, for every observer label.
    for (std::size_t obs = 0; obs < 4; ++obs) {
      const auto img = apply_unitary(r, ket(layout, {0, 1, 0, obs}));
      const auto want = superpose({{std::cos(theta), ket(layout, {0, 1, 0, obs})}, {std::sin(theta), ket(layout, {1, 0, 1, obs})}});
      CHECK(distance(img, want) <= 1e-15);
    }
    // Outside the span: identity.
    CHECK(distance(apply_unitary(r, ket(layout, {0, 0, 0, 0})), ket(layout, {0, 0, 0, 0})) == 0.0);

    // Frame rotation acting on a(1)|1:⟩ + a(2)|2:⟩.
    const Complex a1(0.6, 0.1), a2(0.3, -0.7);
    const auto rotated =
        apply_unitary(r, superpose({{a1, ket(layout, {0, 1, 0, 0})}, {a2, ket(layout, {1, 0, 1, 0})}}));
    CHECK(std::abs(rotated[layout.encode(std::vector<std::size_t>{0, 1, 0, 0})] -
                   (a1 * std::cos(theta) - a2 * std::sin(theta))) <= 1e-15);
    CHECK(std::abs(rotated[layout.encode(std::vector<std::size_t>{1, 0, 1, 0})] -
                   (a2 * std::cos(theta) + a1 * std::sin(theta))) <= 1e-15);

    CHECK_THROWS_AS(build_basis_rotation(layout, {0.3, one, one}), InvalidArgument);
    CHECK_THROWS_AS(build_basis_rotation(layout, {0.3, {0, 1}, two}), RangeError);
    CHECK_THROWS_AS(build_basis_rotation(layout, {0.3, {0, 2, 0}, two}), RangeError);
  }

  TEST_CASE("property: rotations add") {
    const auto layout = chain_layout(2, 1, false);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
    for (int trial = 0; trial < 50; ++trial) {
      const double t1 = angle(rng), t2 = angle(rng);
      const Digits one{0, 1, 0}, two{1, 0, 1};
      const auto lhs = compose(build_basis_rotation(layout, {t2, one, two}), build_basis_rotation(layout, {t1, one, two}));
      const auto rhs = build_basis_rotation(layout, {t1 + t2, one, two});
      REQUIRE((lhs.to_dense() - rhs.to_dense()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("property: every builder is unitary, norm-preserving and linear") {
    std::mt19937_64 rng(13);
    for (bool photons : {false, true}) {
      const auto layout = chain_layout(3, 2, photons);
      std::vector<UnitaryOp> ops{build_detection_unitary(layout), build_perception_unitary(layout, "Obs1"),
                                 build_perception_unitary(layout, "Obs2"),
                                 build_level_transposition(layout, "Obs1", 1, 4)};
      if (photons) ops.push_back(build_photon_emission_unitary(layout));
      // Span: version 1 (path 0, D1 yes) and version 2 (path 1, D2 yes), photons untouched.
      Digits first(photons ? 7 : 4, 0), second(photons ? 7 : 4, 0);
      first[1] = 1;
      second[0] = 1;
      second[2] = 1;
      ops.push_back(build_basis_rotation(layout, {0.4, first, second}));
      for (const auto& u : ops) {
        CHECK(verify_unitary(u).passed);
        for (int trial = 0; trial < 5; ++trial) {
          const auto x = random_state(layout, rng);
          const auto z = random_state(layout, rng);
          const Complex alpha = random_complex(rng), beta = random_complex(rng);
          const auto lhs = apply_unitary(u, superpose({{alpha, x}, {beta, z}}));
          const auto rhs = superpose({{alpha, apply_unitary(u, x)}, {beta, apply_unitary(u, z)}});
          REQUIRE(distance(lhs, rhs) <= 1e-12);
          REQUIRE(std::abs(norm(apply_unitary(u, x)) - 1.0) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("property: steps commute with operators on registers they do not touch") {
    std::mt19937_64 rng(17);
    const auto layout = chain_layout(3, 2, false);
    const auto detect = build_detection_unitary(layout);
    const auto perceive1 = build_perception_unitary(layout, "Obs1");
    const auto on_obs1 = build_local_unitary(layout, "Obs1", random_unitary(5, rng));
    const auto on_obs2 = build_local_unitary(layout, "Obs2", random_unitary(5, rng));
    const auto on_path = build_local_unitary(layout, "P", random_unitary(3, rng));
    const std::vector<std::pair<const UnitaryOp*, const UnitaryOp*>> pairs{
        {&detect, &on_obs1}, {&detect, &on_obs2}, {&perceive1, &on_obs2}, {&perceive1, &on_path}};
    for (const auto& [a, b] : pairs) {
      for (int trial = 0; trial < 5; ++trial) {
        const auto x = random_state(layout, rng);
        REQUIRE(distance(apply_unitary(*a, apply_unitary(*b, x)), apply_unitary(*b, apply_unitary(*a, x))) <= 1e-12);
      }
    }
  }

  TEST_CASE("local unitary dimension check") {
    const auto layout = chain_layout(2, 1, false);
    CHECK_THROWS_AS(build_local_unitary(layout, "P", DenseMatrix::Identity(3, 3)), MismatchError);
    CHECK_THROWS_AS(build_level_transposition(layout, "Obs1", 0, 4), RangeError);
  }
}
