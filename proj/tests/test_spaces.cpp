#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "greedylab/rng.hpp"
#include "greedylab/spaces.hpp"

using namespace greedylab;

namespace {

double nrm(const char* space, const char* vec) {
  return norm(*parse_space(space), parse_vec(vec));
}

SpVec random_vec(Rng& rng, int max_support, index_t max_index) {
  SpVec f;
  int m = 1 + int(rng.below(std::uint64_t(max_support)));
  for (int k = 0; k < m; ++k)
    f.set(index_t(1 + rng.below(std::uint64_t(max_index))),
          rng.sym() * std::pow(10.0, 2.0 * rng.unit() - 1.0));
  return f;
}

}  // namespace

TEST_CASE("frozen norm values") {
  CHECK(nrm("lp:0.5", "1@1,1@2") == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(nrm("lp:2", "3@1,4@2") == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(nrm("lp:inf", "3@1,-4@2") == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(nrm("c0", "3@1,-4@9") == doctest::Approx(4.0).epsilon(1e-15));

  CHECK(nrm("lorentz:p=1,q=2,w=pot:0.5", "1@1,1@2") ==
        doctest::Approx(1.4856334612503).epsilon(1e-12));
  CHECK(nrm("lorentz:p=1,q=2,w=const:1", "1@1,1@2") ==
        doctest::Approx(1.73205080756888).epsilon(1e-12));
  CHECK(nrm("lorentz:p=1,q=inf,w=const:1", "3@1,1@2,2@3") ==
        doctest::Approx(4.0).epsilon(1e-12));

  CHECK(nrm("marcin:w=pot:0.5", "1@1,1@2,1@3") ==
        doctest::Approx(1.31322232541251).epsilon(1e-12));
  CHECK(nrm("marcin:w=const:1", "3@1,1@2,2@3") == doctest::Approx(3.0).epsilon(1e-12));

  CHECK(nrm("garling:p=1,w=pot:0.5", "1@1,2@2") ==
        doctest::Approx(2.41421356237309).epsilon(1e-12));
  CHECK(nrm("garling:p=0.5,w=pot:0.5", "1@1,2@2,1@3") ==
        doctest::Approx(6.64273441009184).epsilon(1e-12));
  CHECK(nrm("garling:p=0.5,w=pot:0.5", "0.5@1,1@2,0.25@3,2@4") ==
        doctest::Approx(5.80807820472492).epsilon(1e-12));

  CHECK(nrm("vp:0.5", "1@1,1@2,1@3") == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(nrm("vp:0.5", "1@1,-1@2,1@3,-1@4") ==
        doctest::Approx(38.9705627484771).epsilon(1e-12));
  CHECK(nrm("vp:1", "2@1,1@3") == doctest::Approx(6.0).epsilon(1e-12));

  CHECK(nrm("sw:w=const:1", "1@1,-1@2,1@3") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nrm("sw:w=pot:0.5", "1@1,-2@2,1@3,3@4") ==
        doctest::Approx(1.66313670681653).epsilon(1e-12));

  const char* kt = "kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)";
  CHECK(nrm(kt, "1@1,-2@3,1@4") == doctest::Approx(2.55461125695738).epsilon(1e-12));
  CHECK(nrm(kt, "1@1,1@2,1@3") == doctest::Approx(2.28445705037617).epsilon(1e-12));

  CHECK(nrm("dsum(lp:1,lp:2)", "1@1,1@2,1@3") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(nrm("mixed:q=2,p=1,blocks=2,2", "1@1,1@2,1@3,1@4") ==
        doctest::Approx(2.82842712474619).epsilon(1e-12));
}

TEST_CASE("alternating decreasing sw collapses to the first term") {
  SpVec f;
  for (index_t n = 1; n <= 9; ++n)
    f.set(n, (n % 2 ? 1.0 : -1.0) / double(n));
  CHECK(norm(*parse_space("sw:w=pot:0.5"), f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse_space labels round trip") {
  for (const char* text :
       {"lp:0.5", "lp:inf", "c0", "lorentz:p=1,q=2,w=pot:0.5",
        "lorentz:p=1,q=inf,w=const:1", "marcin:w=expl:[1,0.5;tail=0.5]",
        "garling:p=0.5,w=pot:0.5", "vp:0.5", "sw:w=pot:0.5",
        "kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)", "dsum(lp:1,lp:2)",
        "dsum(lp:0.5,kt(lp:1 ; w=const:1),c0)", "mixed:q=2,p=1,blocks=2,2",
        "mixed:q=2,p=0.5,blocks=1,2,3"}) {
    CAPTURE(text);
    SpacePtr X = parse_space(text);
    CHECK(X->label == text);
    CHECK(parse_space(X->label)->label == X->label);
  }
}

TEST_CASE("parse_space rejects malformed specs with positions") {
  for (const char* text :
       {"", "lq:2", "lp:0", "lp:-1", "lp:x", "c0x", "lorentz:p=1,q=2",
        "lorentz:p=1,w=const:1", "lorentz:p=inf,q=2,w=const:1", "vp:1.5",
        "vp:0", "garling:p=0,w=const:1", "sw:const:1", "kt(lp:1)",
        "kt(lp:1 ; w=const:1", "dsum(lp:1)", "mixed:q=2,p=1,blocks=",
        "mixed:q=2,p=1,blocks=0", "mixed:q=inf,p=1,blocks=2", "lp:2 junk"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_space(text), std::invalid_argument);
  }
  try {
    parse_space("lorentz:p=1,q=2");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("exponents and flags") {
  CHECK(parse_space("lp:0.5")->p_exponent == doctest::Approx(0.5));
  CHECK(parse_space("lp:2")->p_exponent == doctest::Approx(1.0));
  CHECK(parse_space("lorentz:p=1,q=2,w=pot:0.5")->p_exponent == doctest::Approx(1.0));
  CHECK(parse_space("lorentz:p=1,q=0.5,w=const:1")->p_exponent == doctest::Approx(0.5));
  CHECK(parse_space("marcin:w=pot:0.5")->p_exponent == doctest::Approx(1.0));
  CHECK(parse_space("garling:p=0.5,w=pot:0.5")->p_exponent == doctest::Approx(0.5));
  CHECK(parse_space("vp:0.5")->p_exponent == doctest::Approx(0.5));
  CHECK(parse_space("kt(lorentz:p=1,q=0.5,w=pot:0.5 ; w=pot:0.5)")->p_exponent ==
        doctest::Approx(0.5));
  CHECK(parse_space("dsum(lp:0.5,lp:2)")->p_exponent == doctest::Approx(0.5));
  CHECK(parse_space("mixed:q=2,p=0.5,blocks=2,2")->p_exponent == doctest::Approx(0.5));

  // q = inf certificate lands on a grid value
  double r = parse_space("lorentz:p=1,q=inf,w=pot:0.5")->p_exponent;
  CHECK(r >= 0.25);
  CHECK(r <= 0.99);

  auto flags = [](const char* s) {
    SpacePtr X = parse_space(s);
    return std::pair<bool, bool>{X->symmetric, X->lattice_unconditional};
  };
  CHECK(flags("lp:0.5") == std::pair<bool, bool>{true, true});
  CHECK(flags("lorentz:p=1,q=2,w=pot:0.5") == std::pair<bool, bool>{true, true});
  CHECK(flags("marcin:w=pot:0.5") == std::pair<bool, bool>{true, true});
  CHECK(flags("garling:p=0.5,w=pot:0.5") == std::pair<bool, bool>{false, true});
  CHECK(flags("vp:0.5") == std::pair<bool, bool>{false, false});
  CHECK(flags("sw:w=pot:0.5") == std::pair<bool, bool>{false, false});
  CHECK(flags("kt(lp:1 ; w=const:1)") == std::pair<bool, bool>{false, false});
  CHECK(flags("dsum(lp:1,lp:2)") == std::pair<bool, bool>{false, true});
  CHECK(flags("mixed:q=2,p=1,blocks=2,2") == std::pair<bool, bool>{false, true});
}

TEST_CASE("p-triangle inequality at the declared exponent") {
  Rng rng(41);
  for (const char* text :
       {"lp:0.5", "lp:1", "lp:2", "c0", "lorentz:p=1,q=2,w=pot:0.5",
        "lorentz:p=1,q=inf,w=const:1", "marcin:w=pot:0.5",
        "garling:p=0.5,w=pot:0.5", "vp:0.5", "sw:w=pot:0.5",
        "kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)", "dsum(lp:1,lp:2)",
        "mixed:q=2,p=0.5,blocks=2,3,1"}) {
    CAPTURE(text);
    SpacePtr X = parse_space(text);
    const double r = X->p_exponent;
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      SpVec f = random_vec(rng, 8, 6);
      SpVec g = random_vec(rng, 8, 6);
      double lhs = std::pow(norm(*X, add(f, g)), r);
      double rhs = std::pow(norm(*X, f), r) + std::pow(norm(*X, g), r);
      if (lhs > rhs * (1.0 + 1e-9)) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("lattice monotonicity where flagged") {
  Rng rng(42);
  for (const char* text :
       {"lp:0.5", "lorentz:p=1,q=2,w=pot:0.5", "marcin:w=pot:0.5",
        "garling:p=0.5,w=pot:0.5", "dsum(lp:1,lp:2)", "mixed:q=2,p=1,blocks=3,3"}) {
    CAPTURE(text);
    SpacePtr X = parse_space(text);
    REQUIRE(X->lattice_unconditional);
    for (int trial = 0; trial < 500; ++trial) {
      SpVec f = random_vec(rng, 6, 6);
      SpVec g;
      for (const auto& [n, c] : f.entries)
        g.set(n, c * rng.unit() * double(rng.sign()));
      CHECK(norm(*X, g) <= norm(*X, f) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("symmetry where flagged") {
  Rng rng(43);
  for (const char* text : {"lp:0.5", "lorentz:p=1,q=2,w=pot:0.5",
                           "lorentz:p=1,q=inf,w=pot:0.5", "marcin:w=pot:0.5", "c0"}) {
    CAPTURE(text);
    SpacePtr X = parse_space(text);
    REQUIRE(X->symmetric);
    for (int trial = 0; trial < 300; ++trial) {
      SpVec f = random_vec(rng, 6, 8);
      SpVec g;
      // random injective relocation with sign flips
      std::vector<index_t> where;
      for (const auto& [n, c] : f.entries) {
        index_t m;
        do {
          m = index_t(1 + rng.below(64));
        } while (std::find(where.begin(), where.end(), m) != where.end());
        where.push_back(m);
        g.set(m, double(rng.sign()) * c);
      }
      CHECK(norm(*X, g) == doctest::Approx(norm(*X, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("garling DP equals subset brute force") {
  Rng rng(44);
  SpacePtr X = parse_space("garling:p=0.5,w=pot:0.5");
  const WeightSpec& w = X->weight;
  for (int trial = 0; trial < 200; ++trial) {
    SpVec f = random_vec(rng, 12, 20);
    const std::size_t m = f.entries.size();
    double best = 0.0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << m); ++mask) {
      double acc = 0.0;
      int slot = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::uint64_t(1) << i))
          acc += std::pow(std::fabs(f.entries[i].second), 0.5) * w.w(++slot);
      best = std::max(best, acc);
    }
    CHECK(norm(*X, f) == doctest::Approx(best * best).epsilon(1e-10));
  }
}

TEST_CASE("kt and dsum combine exactly") {
  Rng rng(45);
  SpacePtr kt = parse_space("kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)");
  SpacePtr inner = parse_space("lorentz:p=1,q=2,w=pot:0.5");
  SpacePtr swsp = parse_space("sw:w=pot:0.5");
  SpacePtr ds = parse_space("dsum(lp:1,lp:2)");
  SpacePtr l1 = parse_space("lp:1");
  SpacePtr l2 = parse_space("lp:2");
  for (int trial = 0; trial < 200; ++trial) {
    SpVec f = random_vec(rng, 8, 12);
    CHECK(norm(*kt, f) == std::max(norm(*inner, f), norm(*swsp, f)));
    SpVec odd, even;
    for (const auto& [n, c] : f.entries)
      ((n - 1) % 2 == 0 ? odd : even).set((n - 1) / 2 + 1, c);
    CHECK(norm(*ds, f) == std::max(norm(*l1, odd), norm(*l2, even)));
  }
}

TEST_CASE("mixed norm rejects out-of-structure indices") {
  SpacePtr X = parse_space("mixed:q=2,p=1,blocks=2,2");
  CHECK_THROWS_AS(norm(*X, parse_vec("1@5")), std::invalid_argument);
}

TEST_CASE("fundamental_lorentz") {
  WeightSpec pot = parse_weight("pot:0.5");
  WeightSpec cst = parse_weight("const:1");
  // telescoping at p=q=1
  for (index_t m : {1, 2, 5, 30})
    CHECK(fundamental_lorentz(1, 1, pot, m) == doctest::Approx(pot.s(m)).epsilon(1e-13));
  // q=2 const closed form
  for (index_t m : {1, 3, 8, 100})
    CHECK(fundamental_lorentz(1, 2, cst, m) ==
          doctest::Approx(std::sqrt(double(m) * double(m + 1) / 2.0)).epsilon(1e-13));
  CHECK(fundamental_lorentz(1, 2, pot, 2) == doctest::Approx(1.4856334612503).epsilon(1e-12));
  CHECK(fundamental_lorentz(1, 2, pot, 3) == doctest::Approx(1.87777492638851).epsilon(1e-12));
  CHECK(fundamental_lorentz(1, 2, pot, 8) == doctest::Approx(3.30358266422596).epsilon(1e-12));
  CHECK(fundamental_lorentz(1, 2, cst, 8) == doctest::Approx(6.0).epsilon(1e-13));
  // q=inf
  CHECK(fundamental_lorentz(2, std::numeric_limits<double>::infinity(), pot, 9) ==
        doctest::Approx(std::sqrt(4.70477013327583)).epsilon(1e-12));
  // phi stays within constant factors of s_m
  double lo = 1e300, hi = 0.0;
  for (index_t m = 1; m <= (1 << 12); m *= 2) {
    double ratio = fundamental_lorentz(1, 2, pot, m) / pot.s(m);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo > 0.1);
  CHECK(hi < 10.0);

  // indicator norm equals the fundamental function
  SpacePtr X = parse_space("lorentz:p=1,q=2,w=pot:0.5");
  for (index_t m : {1, 2, 7})
    CHECK(norm(*X, indicator({m, m + 3, m + 9})) ==
          doctest::Approx(fundamental_lorentz(1, 2, pot, 3)).epsilon(1e-12));
}

TEST_CASE("hardy_check frozen ratios and verdicts") {
  auto fam = hardy_harmonic_family({1 << 6, 1 << 8, 1 << 10});
  HardyReport cst = hardy_check(parse_weight("const:1"), 2.0, fam);
  REQUIRE(cst.ratios.size() == 3);
  CHECK(cst.ratios[0] == doctest::Approx(2.17804749803712).epsilon(1e-12));
  CHECK(cst.ratios[1] == doctest::Approx(2.47474139311914).epsilon(1e-12));
  CHECK(cst.ratios[2] == doctest::Approx(2.74028751635264).epsilon(1e-12));
  CHECK(cst.increasing);

  HardyReport pot = hardy_check(parse_weight("pot:0.5"), 2.0, fam);
  CHECK(pot.ratios[0] == doctest::Approx(1.09135197611145).epsilon(1e-12));
  CHECK(pot.ratios[1] == doctest::Approx(1.08506166619732).epsilon(1e-12));
  CHECK(pot.ratios[2] == doctest::Approx(1.08343841810339).epsilon(1e-12));
  CHECK_FALSE(pot.increasing);
  CHECK(pot.max_ratio < 1.1);

  CHECK_THROWS_AS(hardy_check(parse_weight("const:1"), 1.0, fam), std::invalid_argument);
}
