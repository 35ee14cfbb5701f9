#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "greedylab/basis.hpp"
#include "greedylab/constants.hpp"
#include "greedylab/spaces.hpp"

using namespace greedylab;

namespace {

BasisModel lattice_of(const char* text) {
  return BasisModel::lattice(parse_space(text));
}

ConstantEstimate run(ConstantKind kind, const char* space, index_t d,
                     std::uint64_t seed = 0) {
  BasisModel model = lattice_of(space);
  TestFamily fam;
  fam.dimension = d;
  fam.seed = seed;
  return estimate_constant(kind, model, nullptr, fam);
}

}  // namespace

TEST_CASE("symmetric lattices score one on every kind") {
  for (const char* space : {"lp:0.5", "lp:1", "lp:2"}) {
    BasisModel model = lattice_of(space);
    TestFamily fam;
    fam.dimension = 8;
    for (ConstantKind kind : all_constant_kinds()) {
      const auto est = estimate_constant(kind, model, nullptr, fam);
      INFO(space << " " << constant_kind_name(kind));
      CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(recheck_estimate(est, model, nullptr) ==
            doctest::Approx(est.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("witness pairs recheck on non-symmetric spaces") {
  for (const char* space : {"vp:1", "dsum(lp:1,lp:2)", "garling:p=1,w=pot:0.5"}) {
    BasisModel model = lattice_of(space);
    TestFamily fam;
    fam.dimension = 6;
    for (ConstantKind kind : all_constant_kinds()) {
      if (kind == ConstantKind::Delta_b || kind == ConstantKind::Delta_sb)
        continue;  // closed-form table, separate case below
      const auto est = estimate_constant(kind, model, nullptr, fam);
      INFO(space << " " << constant_kind_name(kind));
      CHECK(est.value >= 1.0 - 1e-12);
      CHECK(recheck_estimate(est, model, nullptr) ==
            doctest::Approx(est.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("interleaved sum separates the even and odd rows") {
  // Odd indices land in the first part.  Four spikes cost 4 in the first
  // row and 2 in the second, so the plain democracy ratio reaches 2.
  const auto est = run(ConstantKind::Delta, "dsum(lp:1,lp:2)", 8);
  CHECK(est.value >= 2.0 - 1e-9);
}

TEST_CASE("sign choices split the bounded variation norm") {
  // Alternating signs on [1..8] jump at every step; the all-plus block
  // only jumps at its ends.  Ratio 16/2.
  const auto est = run(ConstantKind::Delta_s, "vp:1", 8);
  CHECK(est.value >= 8.0 - 1e-9);
}

TEST_CASE("coordinate projections can grow the variation norm") {
  // Ones on [1..8] have norm 2; keeping the odd positions costs 8.  The
  // flat vector ties everywhere, so the comb is a greedy set.
  const auto est = run(ConstantKind::C_qg, "vp:1", 8);
  CHECK(est.value >= 4.0 - 1e-9);
  BasisModel model = lattice_of("vp:1");
  CHECK(recheck_estimate(est, model, nullptr) ==
        doctest::Approx(est.value).epsilon(1e-12));
}

TEST_CASE("estimates are reproducible for a fixed seed") {
  const auto a = run(ConstantKind::Delta_s, "dsum(lp:1,lp:2)", 6, 17);
  const auto b = run(ConstantKind::Delta_s, "dsum(lp:1,lp:2)", 6, 17);
  CHECK(a.value == b.value);
  CHECK(a.witness_lhs == b.witness_lhs);
  CHECK(a.witness_rhs == b.witness_rhs);
  CHECK(a.budget == b.budget);
}

TEST_CASE("dual fundamental table") {
  auto at = [](const char* space, index_t m) {
    return dual_fundamental(*parse_space(space), m);
  };
  CHECK(at("lp:0.5", 5).value() == doctest::Approx(1.0));
  CHECK(at("lp:1", 7).value() == doctest::Approx(1.0));
  CHECK(at("lp:2", 9).value() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(at("c0", 6).value() == doctest::Approx(6.0));
  CHECK_FALSE(at("lp:inf", 3).has_value());

  // pot:0.5 prefix sums grow like 2 sqrt(n), so 1/s is regular; constant
  // weights give the harmonic sum and fail.
  const auto reg = at("lorentz:p=1,q=1,w=pot:0.5", 3);
  REQUIRE(reg.has_value());
  CHECK(reg.value() == doctest::Approx(3.0 / 2.28445705037617).epsilon(1e-12));
  CHECK_FALSE(at("lorentz:p=1,q=1,w=const:1", 3).has_value());
  CHECK_FALSE(at("lorentz:p=0.5,q=1,w=pot:0.5", 3).has_value());
  CHECK_FALSE(at("vp:1", 3).has_value());
  CHECK_FALSE(at("garling:p=0.5,w=pot:0.5", 3).has_value());
}

TEST_CASE("bidemocracy pairs the envelope with the dual table") {
  for (const char* space : {"lp:0.5", "lp:1", "lp:2", "c0",
                            "lorentz:p=1,q=1,w=pot:0.5"}) {
    BasisModel model = lattice_of(space);
    TestFamily fam;
    fam.dimension = 10;
    for (ConstantKind kind : {ConstantKind::Delta_b, ConstantKind::Delta_sb}) {
      const auto est = estimate_constant(kind, model, nullptr, fam);
      INFO(space << " " << constant_kind_name(kind));
      CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(recheck_estimate(est, model, nullptr) ==
            doctest::Approx(est.value).epsilon(1e-12));
      CHECK(est.note.find("closed-form") != std::string::npos);
    }
  }
  BasisModel model = lattice_of("garling:p=0.5,w=pot:0.5");
  TestFamily fam;
  fam.dimension = 6;
  CHECK_THROWS_AS(estimate_constant(ConstantKind::Delta_b, model, nullptr, fam),
                  std::invalid_argument);
}

TEST_CASE("kind names round trip") {
  for (ConstantKind kind : all_constant_kinds())
    CHECK(parse_constant_kind(constant_kind_name(kind)) == kind);
  CHECK_THROWS_AS(parse_constant_kind("K_xx"), std::invalid_argument);
}

TEST_CASE("democracy functions on a symmetric space are the closed form") {
  BasisModel model = lattice_of("lp:0.5");
  const auto df = democracy_functions(model, nullptr, 10, SigmaMode::Exact);
  CHECK(df.exact);
  for (index_t m = 1; m <= 10; ++m) {
    const double want = double(m) * double(m);
    CHECK(df.phi_u[std::size_t(m - 1)] == doctest::Approx(want).epsilon(1e-12));
    CHECK(df.phi_l[std::size_t(m - 1)] == doctest::Approx(want).epsilon(1e-12));
    CHECK(df.phi_eps_u[std::size_t(m - 1)] ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK(df.phi_eps_l[std::size_t(m - 1)] ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("democracy functions spread apart on the variation space") {
  BasisModel model = lattice_of("vp:0.5");
  const auto df = democracy_functions(model, nullptr, 12, SigmaMode::Heuristic);
  CHECK_FALSE(df.exact);
  for (index_t m = 1; m <= 12; ++m) {
    INFO("m=" << m);
    // Combs jump twice per spike; intervals only at the ends.
    CHECK(df.phi_u[std::size_t(m - 1)] >= 4.0 * double(m) * double(m) - 1e-9);
    CHECK(df.phi_l[std::size_t(m - 1)] <= 4.0 + 1e-9);
    CHECK(df.phi_eps_l[std::size_t(m - 1)] <= 4.0 + 1e-9);
    CHECK(df.phi_eps_l[std::size_t(m - 1)] > 0.0);
  }
  // Monotone by construction: running max above, suffix min below.
  for (index_t m = 2; m <= 12; ++m) {
    CHECK(df.phi_u[std::size_t(m - 1)] >= df.phi_u[std::size_t(m - 2)]);
    CHECK(df.phi_eps_u[std::size_t(m - 1)] >= df.phi_eps_u[std::size_t(m - 2)]);
  }
}

TEST_CASE("horizon guard on democracy functions") {
  BasisModel model = lattice_of("lp:1");
  CHECK_THROWS_AS(democracy_functions(model, nullptr, 0, SigmaMode::Exact),
                  std::invalid_argument);
  CHECK_THROWS_AS(democracy_functions(model, nullptr, 5000, SigmaMode::Exact),
                  std::invalid_argument);
  // Large but in budget: must not blow up on the structured path.
  BasisModel vp = lattice_of("vp:1");
  const auto df = democracy_functions(vp, nullptr, 128, SigmaMode::Heuristic);
  CHECK(df.phi_eps_l[127] <= 2.0 + 1e-9);
}

TEST_CASE("rearrangement envelopes sandwich the norm") {
  for (const char* space : {"lp:1", "lp:0.5"}) {
    BasisModel model = lattice_of(space);
    std::vector<SpVec> samples = {
        parse_vec("1@1"),
        parse_vec("1@1,1@2,1@3"),
        parse_vec("4@1,2@2,1@3,0.5@4,0.25@5"),
        parse_vec("1@2,-3@4,2@7,-1@9"),
        parse_vec("5@1,5@2,5@3,5@4,5@5,5@6"),
    };
    const auto rep = embedding_sandwich_check(model, nullptr, samples);
    INFO(space);
    CHECK(rep.worst_left_margin >= -1e-9);
    CHECK(rep.worst_right_margin >= -1e-9);
    CHECK(rep.lambda_u >= 1.0 - 1e-12);
  }
}

TEST_CASE("degenerate families raise instead of fabricating a value") {
  BasisModel model = lattice_of("lp:1");
  TestFamily fam;
  fam.dimension = 1;
  // No disjoint pair exists in one dimension.
  CHECK_THROWS_AS(
      estimate_constant(ConstantKind::Delta_d, model, nullptr, fam),
      std::runtime_error);
  CHECK_THROWS_AS(estimate_constant(ConstantKind::K_su, model, nullptr,
                                    TestFamily{.dimension = 0}),
                  std::invalid_argument);
}
