#ifndef GREEDYLAB_CONSTANTS_HPP
#define GREEDYLAB_CONSTANTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greedylab/basis.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/spvec.hpp"

namespace greedylab {

// Every named constant the estimator can search for.  Values are always
// certified lower bounds realized by a stored witness; upper bounds only
// ever come from analytic inequalities evaluated elsewhere.
enum class ConstantKind {
  K_su,      // ||S_A f|| <= C ||f||
  K_u,       // ||M_gamma f|| <= C ||f||, |gamma_n| <= 1
  K_sc,      // ||1_{eps,B}|| <= C ||1_{eps,A}||, B inside A
  K_lc,      // ||1_{eps,A}|| <= C ||sum eps_n a_n x_n||, a_n >= 1
  K_pu,      // ||sum a_n x_n|| <= C ||sum b_n x_n||, max|a| <= min|b|
  C_qg,      // ||S_{A\B} f|| <= C ||f|| over nested greedy sets
  C_ql,      // max{||f||, ||1_{eps,A}||} <= C ||f + 1_{eps,A}||
  C_ag,      // ||f - S_A f|| <= C ||f - S_B f||, A greedy, |B| <= |A|
  C_g,       // ||f - S_A f|| <= C sigma_{|A|}(f), A greedy
  Delta,     // ||1_A|| <= C ||1_B||, |A| <= |B|
  Delta_d,   // Delta with A, B disjoint
  Delta_s,   // signed indicators, free signs both sides
  Delta_sd,  // signed and disjoint
  Gamma,     // carrier form ||f + 1_{eps,A}|| <= C ||f + 1_{delta,B}||
  Lambda_u,  // ||U(f,A)|| <= C ||f|| over greedy sets
  Lambda_t,  // ||T(f,A)|| <= C ||f|| over greedy sets
  Delta_b,   // phi_u(m) phi*_u(m) <= C m via the dual table
  Delta_sb,  // same with the signed upper democracy function
};

const char* constant_kind_name(ConstantKind kind);
ConstantKind parse_constant_kind(const std::string& name);
const std::vector<ConstantKind>& all_constant_kinds();

// Deterministic search family.  Sets are exhausted while 2^dimension stays
// small, otherwise intervals, strided combs and seeded random draws; sign
// patterns are exhausted up to 2^sign_cap standalone and fall back to
// structured-plus-sampled inside set products.
struct TestFamily {
  index_t dimension = 10;
  std::vector<double> levels = {1.0, 1.25, 2.0, 4.0};
  int sign_cap = 12;
  int random_draws = 200;
  std::uint64_t seed = 0;
};

// value = rhs_scale * ||witness_lhs|| / ||witness_rhs||, with an absent
// rhs counting as 1.  Witness vectors are stored in ambient form, so the
// re-check is one norm evaluation per side.
struct ConstantEstimate {
  ConstantKind kind = ConstantKind::K_su;
  double value = 1.0;
  SpVec witness_lhs;
  SpVec witness_rhs;
  double rhs_scale = 1.0;
  std::string budget;
  std::string note;
};

ConstantEstimate estimate_constant(ConstantKind kind, const BasisModel& model,
                                   const SpacePtr& space,
                                   const TestFamily& family);

double recheck_estimate(const ConstantEstimate& est, const BasisModel& model,
                        const SpacePtr& space);

// phi*_u(m) for the spaces with a closed-form dual fundamental function:
// lp (p >= 1): m^{1-1/p}; lp (p < 1): 1; c0: m; Lorentz d_{1,q}(w) with
// 1/s regular: m/s_m.  Everything else has no entry.
std::optional<double> dual_fundamental(const SpaceSpec& X, index_t m);

// Democracy functions for m = 1..m_max (index m-1):
//   phi_u(m)     = sup ||1_A||,       |A| <= m
//   phi_l(m)     = inf ||1_A||,       |A| >= m
//   phi_eps_u(m) = sup ||1_{eps,A}||, |A| <= m
//   phi_eps_l(m) = inf ||1_{eps,A}||, |A| >= m
// exact = closed form by symmetry; otherwise sup-flavored entries are
// lower bounds and inf-flavored entries upper bounds, both from candidate
// enumeration (exhaustive over a 16-index horizon in Exact mode).
struct DemocracyFunctions {
  std::vector<double> phi_u, phi_l, phi_eps_u, phi_eps_l;
  bool exact = false;
};

DemocracyFunctions democracy_functions(const BasisModel& model,
                                       const SpacePtr& space, index_t m_max,
                                       SigmaMode mode);

// Two-sided embedding sandwich on a sample family:
//   ||f|| <= 4 A_p^2 (sum (a*_n)^p w_u(n))^{1/p},  w_u = diff of phi_eps_u^p
//   sup_n a*_n phi_eps_l(n) <= Lambda_u ||f||
// Margins are rhs - lhs; negative margins carry the witness.  phi and
// Lambda_u come from this module with a default family seeded at 0, so the
// report is deterministic.
struct SandwichReport {
  double left_constant = 0.0;
  double lambda_u = 1.0;
  double worst_left_margin = 0.0;
  double worst_right_margin = 0.0;
  SpVec left_witness;
  SpVec right_witness;
};

SandwichReport embedding_sandwich_check(const BasisModel& model,
                                        const SpacePtr& space,
                                        const std::vector<SpVec>& samples);

}  // namespace greedylab

#endif
