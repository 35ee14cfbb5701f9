#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "greedylab/rng.hpp"
#include "greedylab/spvec.hpp"

using namespace greedylab;

TEST_CASE("parse_vec basics") {
  SpVec f = parse_vec("1@1,1@2");
  REQUIRE(f.support_size() == 2);
  CHECK(f.coef(1) == 1.0);
  CHECK(f.coef(2) == 1.0);
  CHECK(f.coef(3) == 0.0);
  CHECK(f.max_index() == 2);

  SpVec g = parse_vec("3.5@7,-2@3");
  REQUIRE(g.support_size() == 2);
  CHECK(g.entries[0] == std::pair<index_t, double>{3, -2.0});
  CHECK(g.entries[1] == std::pair<index_t, double>{7, 3.5});

  CHECK(parse_vec("").empty());
  CHECK(parse_vec("  ").empty());
  CHECK(parse_vec("0@5,1@2").support_size() == 1);
  CHECK(parse_vec(" 1@1 , 2@4 ").support_size() == 2);
}

TEST_CASE("parse_vec rejects malformed literals") {
  CHECK_THROWS_AS(parse_vec("1@4,2@4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1@0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1@-3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("x@1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1@"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1@1,"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vec("1@1 2@2"), std::invalid_argument);
}

TEST_CASE("format round trip is exact") {
  CHECK(format_vec(parse_vec("1@1,1@2")) == "1@1,1@2");

  Rng rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    SpVec f;
    int m = 1 + int(rng.below(8));
    for (int k = 0; k < m; ++k) {
      double c = rng.sym() * std::pow(10.0, double(rng.below(40)) - 20.0);
      f.set(index_t(1 + rng.below(1000)), c);
    }
    CHECK(parse_vec(format_vec(f)) == f);
  }
  // awkward magnitudes
  SpVec f;
  f.set(1, 0.1);
  f.set(2, 1.0 / 3.0);
  f.set(3, 1e300);
  f.set(4, 5e-324);
  CHECK(parse_vec(format_vec(f)) == f);
}

TEST_CASE("set and scale maintain invariants") {
  SpVec f;
  f.set(5, 2.0);
  f.set(2, -1.0);
  CHECK(f.support() == std::vector<index_t>{2, 5});
  f.set(5, 0.0);
  CHECK(f.support() == std::vector<index_t>{2});
  f *= 0.0;
  CHECK(f.empty());
  CHECK_THROWS_AS(f.set(0, 1.0), std::invalid_argument);

  SpVec g = parse_vec("1@1,2@2");
  g *= -2.0;
  CHECK(g.coef(2) == -4.0);
}

TEST_CASE("add and restrict") {
  SpVec f = parse_vec("1@1,2@3");
  SpVec g = parse_vec("1@2,-2@3");
  SpVec sum = add(f, g);
  CHECK(sum == parse_vec("1@1,1@2"));
  CHECK(add_scaled(f, -1.0, f).empty());

  CHECK(restrict_to(f, {3, 9}) == parse_vec("2@3"));
  CHECK(restrict_to(f, {}).empty());
}

TEST_CASE("nonincreasing_rearrangement") {
  SpVec f;
  f.set(1, 0.5);
  f.set(2, -0.9);
  f.set(3, 0.9);
  CHECK(nonincreasing_rearrangement(f) == std::vector<double>{0.9, 0.9, 0.5});
  CHECK(nonincreasing_rearrangement(SpVec{}).empty());
  SpVec g;
  g.set(7, 3.0);
  CHECK(nonincreasing_rearrangement(g) == std::vector<double>{3.0});
}

TEST_CASE("rearrangement ignores index permutation and signs") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 1 + int(rng.below(10));
    std::vector<double> mags;
    SpVec f, g;
    for (int k = 0; k < m; ++k) mags.push_back(rng.unit() + 0.001);
    for (int k = 0; k < m; ++k) {
      f.set(index_t(k + 1), mags[std::size_t(k)]);
      g.set(index_t(1000 - 7 * k), double(rng.sign()) * mags[std::size_t(k)]);
    }
    CHECK(nonincreasing_rearrangement(f) == nonincreasing_rearrangement(g));
  }
}

TEST_CASE("sign patterns and indicators") {
  auto eps = SignPattern::from_pairs({{2, -1}, {1, 1}});
  CHECK(eps.at(1) == 1);
  CHECK(eps.at(2) == -1);
  CHECK(eps.at(3) == 0);
  CHECK_THROWS_AS(SignPattern::from_pairs({{1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(SignPattern::from_pairs({{1, 1}, {1, -1}}), std::invalid_argument);

  CHECK(indicator({3, 1}) == parse_vec("1@1,1@3"));
  CHECK(signed_indicator({1, 2, 3}, eps) == parse_vec("1@1,-1@2,1@3"));
}
