#include <doctest.h>

#include "../oracles.hpp"
#include "branchsim/error.hpp"
#include "branchsim/layout.hpp"

using namespace branchsim;

namespace {

SubsystemLayout stern_gerlach_layout() {
  return make_layout({{"P", 2, RegisterRole::kParticlePath},
                      {"DH", 2, RegisterRole::kDetector},
                      {"DV", 2, RegisterRole::kDetector},
                      {"Obs", 4, RegisterRole::kObserver}});
}

}  // namespace

TEST_SUITE("layout") {
  TEST_CASE("total dimension is the product of register dimensions") {
    CHECK(stern_gerlach_layout().total_dimension() == 32);
    CHECK(make_layout({{"P", 2, RegisterRole::kParticlePath}}).total_dimension() == 2);
  }

  TEST_CASE("invalid register lists") {
    CHECK_THROWS_AS(make_layout({{"P", 2, RegisterRole::kParticlePath}, {"P", 2, RegisterRole::kDetector}}),
                    LayoutError);
    CHECK_THROWS_AS(make_layout({{"P", 1, RegisterRole::kParticlePath}}), LayoutError);
    CHECK_THROWS_AS(make_layout({}), LayoutError);
  }

  TEST_CASE("dimension cap") {
    CHECK_THROWS_AS(make_layout({{"A", 1 << 12, RegisterRole::kPhoton}, {"B", 1 << 13, RegisterRole::kPhoton}}),
                    CapacityError);
    CHECK(make_layout({{"A", 1 << 12, RegisterRole::kPhoton}, {"B", 1 << 12, RegisterRole::kPhoton}})
              .total_dimension() == (1u << 24));
    CHECK_THROWS_AS(make_layout({{"A", 4, RegisterRole::kPhoton}, {"B", 4, RegisterRole::kPhoton}}, 15),
                    CapacityError);
    // Overflowing products are caught before they wrap.
    CHECK_THROWS_AS(make_layout({{"A", std::size_t{1} << 40, RegisterRole::kPhoton},
                                 {"B", std::size_t{1} << 40, RegisterRole::kPhoton}}),
                    CapacityError);
  }

  TEST_CASE("first register is the most significant digit") {
    const auto layout = stern_gerlach_layout();
    CHECK(layout.stride(0) == 16);
    CHECK(layout.stride(1) == 8);
    CHECK(layout.stride(2) == 4);
    CHECK(layout.stride(3) == 1);
    const std::vector<std::size_t> labels{1, 1, 0, 0};
    CHECK(layout.encode(labels) == 24);
  }

  TEST_CASE("encode/decode round-trip agrees with a hand-rolled mixed radix") {
    const auto layout = make_layout({{"P", 3, RegisterRole::kParticlePath},
                                     {"D1", 2, RegisterRole::kDetector},
                                     {"D2", 2, RegisterRole::kDetector},
                                     {"D3", 2, RegisterRole::kDetector},
                                     {"Obs", 5, RegisterRole::kObserver}});
    const oracle::Dims dims{3, 2, 2, 2, 5};
    for (std::size_t i = 0; i < layout.total_dimension(); ++i) {
      const auto digits = layout.decode(i);
      REQUIRE(layout.encode(digits) == i);
      REQUIRE(digits == oracle::decode(dims, i));
      for (std::size_t r = 0; r < layout.size(); ++r) REQUIRE(layout.digit(i, r) == digits[r]);
    }
  }

  TEST_CASE("with_digit replaces one digit") {
    const auto layout = stern_gerlach_layout();
    const std::vector<std::size_t> a{1, 0, 1, 2}, b{1, 0, 1, 3};
    CHECK(layout.with_digit(layout.encode(a), 3, 3) == layout.encode(b));
  }

  TEST_CASE("labels out of range") {
    const auto layout = stern_gerlach_layout();
    const std::vector<std::size_t> bad{0, 0, 0, 4};
    CHECK_THROWS_AS(layout.encode(bad), RangeError);
    const std::vector<std::size_t> short_list{0, 0};
    CHECK_THROWS_AS(layout.encode(short_list), RangeError);
    CHECK_THROWS_AS(layout.decode(32), RangeError);
  }

  TEST_CASE("lookup by name and role") {
    const auto layout = stern_gerlach_layout();
    CHECK(layout.index_of("DV") == 2);
    CHECK_FALSE(layout.find("DX").has_value());
    CHECK_THROWS_AS(layout.index_of("DX"), LayoutError);
    CHECK(layout.with_role(RegisterRole::kDetector) == std::vector<std::size_t>{1, 2});
  }

  TEST_CASE("subset keeps layout order") {
    const auto layout = stern_gerlach_layout();
    const std::vector<std::size_t> keep{3, 0};
    const auto sub = layout.subset(keep);
    REQUIRE(sub.size() == 2);
    CHECK(sub.at(0).name == "P");
    CHECK(sub.at(1).name == "Obs");
    CHECK(layout.without(1).total_dimension() == 16);
  }
}
