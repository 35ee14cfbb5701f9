#ifndef GREEDYLAB_GALLERY_HPP
#define GREEDYLAB_GALLERY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "greedylab/basis.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/spvec.hpp"
#include "greedylab/weights.hpp"

namespace greedylab {

// Named constructions with pinned numbers.  Every headline value is
// reproducible by a direct norm evaluation of the stored or described
// witness, and every randomized scan is seeded, so a report is bit-stable
// from run to run.

// ---- alternating basis of the p-variation space --------------------------
// x_n = (-1)^(n-1) e_n inside vp:p.  For coefficients a through this basis
// the norm is (sum_n |a_n + a_(n-1)|^p)^(1/p) with a_0 = 0 and n running
// one step past the support, so constant signs grow like m^(1/p) while
// alternating signs collapse to 2^(1/p): democratic, not superdemocratic.
struct VpAlternatingReport {
  double p = 0.5;
  index_t m_max = 0;
  std::vector<double> phi_u;      // [m-1] constant signs, (2 + (m-1) 2^p)^(1/p)
  std::vector<double> phi_eps_l;  // [m-1] alternating signs, 2^(1/p)
  double growth_lo = 0.0;         // min_m phi_u(m) / m^(1/p)
  double growth_hi = 0.0;         // max_m phi_u(m) / m^(1/p)
  double eps_l_sup = 0.0;         // sup_m phi_eps_l(m)
  index_t exhaustive_m = 0;       // sign patterns exhausted for m <= this
  bool structured_extremal = false;  // exhaustive max/min hit the two patterns
  double democracy_lb = 0.0;  // max ||1_A||/||1_B|| over |A| = |B|, unsigned
  double democracy_bound = 0.0;  // 2^(1/p)
  std::string note;              // flags the p = 1 shorthand for the prefixes
};

VpAlternatingReport vp_alternating_report(double p, index_t m_max);

// ---- constant-coefficient gap inside lp + lq ------------------------------
// x_(2k-1) = (e_k, e_k) and x_(2k) = (e_k/2, e_k) in dsum(lp:p, lp:q)
// (second part c0 when q = inf).  Constant coefficients reach both growth
// rates m^(1/q) and m^(1/p), so suppression and lower unconditionality
// split on this basis even though signed indicators stay sandwiched at
// the m^(1/p) rate.
struct LplqReport {
  double p = 0.5;
  double q = 2.0;  // +inf allowed
  index_t m_max = 0;
  std::string space_label;
  std::vector<double> f_norms;  // [m-1]  -x_(2k-1) + 2 x_(2k), k <= m
  std::vector<double> g_norms;  // [m-1]  -x_(2k-1) + x_(2k)
  std::vector<double> h_norms;  // [m-1]  -x_(2k-1)
  bool f_exact = false;         // f_norms[m-1] == m^(1/q) bit for bit
  bool h_exact = false;         // h_norms[m-1] == m^(1/p) bit for bit
  bool hf_strictly_increasing = false;  // ||h_m|| / ||f_m|| over 1..m_max
  std::vector<double> gf_doubling;      // ||g_m|| / ||f_m|| at m = 1, 2, 4, ...
  bool gf_doubling_increasing = false;
  double sandwich_lo = 0.0;  // 2^(-1-1/p)
  double sandwich_hi = 0.0;  // max{1, 2^(1-1/q), 3 2^(-1-1/p)}
  index_t sandwich_checked = 0;
  index_t sandwich_violations = 0;
  double ratio_min = 0.0;  // ||1_(eps,A)|| / |A|^(1/p) over the exhaustive scan
  double ratio_max = 0.0;
};

// Coefficients through the basis above into the interleaved ambient
// coordinates of the direct sum (odd indices feed part 1, even part 2).
SpVec lplq_synthesize(const SpVec& coords);

LplqReport lplq_succ_not_lucc_report(double p, double q, index_t m_max);

// ---- orthonormal-block model in R^(2n) ------------------------------------
// Two unit-column blocks of n vectors; block s spans [a_s] + X_s where
// a_s = sqrt(n - 1/4) u + (-1)^(s-1) v / 2 and X_s carries an isometric
// copy of the zero-sum hyperplane of R^n.  Duals solve biorthogonality to
// 1e-10 inside BasisModel::matrix.  Throws outside 2 <= n <= 32.
BasisModel hilbert_block_basis(int n);

struct HilbertBlockReport {
  int n = 0;
  double a_norm = 0.0;            // ||a_1|| = ||a_2||, analytically sqrt(n)
  double a_diff_norm = 0.0;       // ||a_1 - a_2|| = 1
  double block_sum_margin = 0.0;  // max_s ||sum_j x_j^s - a_s||
  double dual_sq_min = 0.0;
  double dual_sq_max = 0.0;
  double dual_sq_bound = 0.0;  // n/(n - 1/4) + 1, itself <= 3
  double eps_theta_norm = 0.0;  // signs (-1)^s over all 2n vectors, norm 1
  double demo_min = 0.0;        // ||1_A||^2 / |A| over nonempty sets
  double demo_max = 0.0;
  bool demo_exhaustive = false;  // every set when 2n <= 16, sampled past that
  index_t demo_sets = 0;
  // Projection onto the first k = floor(n/2) vectors of block 1: power
  // iteration against the analytic floor sqrt(k - k^2/n), which already
  // clears the sqrt(2)/3 sqrt(n) growth target.
  bool with_operator_norms = false;
  index_t op_set_size = 0;
  double op_norm = 0.0;
  double op_analytic_lb = 0.0;
  double op_target = 0.0;
};

HilbertBlockReport hilbert_block_report(int n, bool with_operator_norms);

// ---- spread-and-spike witness in the partial-sum intersection space -------
// Inside kt(lorentz:p=1,q=<q>,w=const:1 ; w=const:1): the harmonic seed
// f = (1/n)_(n<=N) is spread into g, whose block k holds N copies of
// 1/(k N) followed by the spike -1/k.  The spikes form a greedy set B of g
// with S_B g = h; partial sums of g telescope to sup 1, so the projection
// inflates the norm by the full harmonic factor.
struct KtWitnessReport {
  double q = 2.0;
  index_t N = 0;
  std::string space_label;
  double norm_f = 0.0;  // = H_N, the N-th harmonic number
  double norm_g = 0.0;  // max(lorentz_g, sw_g)
  double norm_h = 0.0;  // = H_N again: the spike part alone
  double lorentz_g = 0.0;
  double lorentz_h = 0.0;
  double sw_g = 0.0;  // 1 for power-of-two N, exactly
  double ratio = 0.0;  // norm_h / norm_g
  index_t dense_support = 0;  // N (N + 1)
  std::string witness;  // rebuild recipe for g and B
};

KtWitnessReport kt_not_qg_witness(double q, index_t N);

// Dense form of the witness for small N: block k holds N copies of
// 1/(k N) on ((k-1)(N+1), (k-1)(N+1) + N] and the spike -1/k sits at
// k (N + 1).  Throws past N (N + 1) = 2^21 entries.
SpVec kt_witness_vector(index_t N);
std::vector<index_t> kt_witness_spikes(index_t N);

// ---- greedy projection bound in the weighted partial-sum norm -------------
// With w = pot:(1/p), every greedy set A of every f obeys
//   ||S_A f||_w <= 2 (1 + C[s,r]) max{ ||f||_(1,inf,w), ||f||_w },
// where C[s,r] = sup_n s_n^(r-1) sum_j s_j^(-r) s_(n+j-1)/(n+j-1).  The r
// grid is scanned for a convergent inner series (last dyadic increment
// ratio <= 0.88); the first admissible r is used.  Throws when the whole
// grid is inadmissible, which happens as p approaches 1.
struct KtBoundReport {
  double p = 2.0;
  double q = 2.0;
  std::string weight_label;         // pot:(1/p)
  std::vector<double> r_grid;       // {1.1, 1.25, 1.5, 2}
  std::vector<double> tail_ratios;  // dyadic increment ratio per grid r
  std::vector<double> admissible_r;
  double r_used = 0.0;
  double c_value = 0.0;      // truncated C[s, r_used]
  double bound_factor = 0.0;  // 2 (1 + c_value)
  index_t dimension = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  index_t sets_checked = 0;
  index_t violations = 0;
  double worst_margin = 0.0;  // min rhs - lhs over all comparisons
  double max_ratio = 0.0;     // max lhs / rhs
};

KtBoundReport kt_qg_bound_check(double p, double q, int samples,
                                std::uint64_t seed, index_t dimension = 64);

// ---- Garling norms of run-length encoded sequences ------------------------
// The value sequence is runs[0].value repeated runs[0].length times, then
// runs[1], ...  Backward DP over weight slots with a sliding-window
// maximum, O(total length) per run; values enter through |value|^p.
struct GarlingRun {
  double value = 0.0;
  index_t length = 0;
};

double garling_runs_norm(double p, const WeightSpec& w,
                         const std::vector<GarlingRun>& runs);

// ---- l1 escape under a pinned Garling norm --------------------------------
// Stage m stacks m constant blocks of lengths 2^(16 - 3(m - j)), built
// shortest first, each prepended at the largest level c_j keeping the
// stack norm inside max(1, previous (1 + 1e-12)) via a 100-step bisection.
// The mass-one profile h over the same layout then has ||h||_1 = m exactly
// while ||h||_g stays within a constant of the single-block stage: l1 mass
// escapes the Garling norm linearly.
struct GarlingEscapeStage {
  int blocks = 0;
  std::vector<index_t> lengths;  // stack order, longest first
  std::vector<double> lambdas;   // build order: lambda_j = c_j s(k_j)^(1/p)
  double stack_norm = 0.0;       // pinned at 1 up to the bisection slack
  double h_norm = 0.0;
  double h_l1 = 0.0;       // = blocks, each block sums to 1 bit for bit
  double lambda_min = 0.0;
};

struct GarlingEscapeReport {
  double p = 0.5;
  int stages = 0;
  std::string weight_label;  // pot:(1-p)
  std::vector<GarlingEscapeStage> stage;
  double escape_ratio = 0.0;  // h_norm(last stage) / h_norm(first)
  bool lambdas_above_half = false;
};

// Throws once the stage layout underflows block lengths or the tuple
// budget of 1e5 slots; stages <= 6 always fits.
GarlingEscapeReport garling_l1_escape(double p, int stages);

// ---- block-averaging operator on lorentz:p=1 -------------------------------
// T f = sum_k (f_k / eta_k) 1_(I_k) with consecutive blocks I_k of length
// eta_k.  Bounded with norm <= 1 on lorentz:p=1,q,w=const:1 exactly when
// q >= 1; below that, harmonic prefixes blow the ratio past any constant.
struct TEtaReport {
  double q = 2.0;
  std::string schedule;  // leading schedule terms
  index_t schedule_len = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;  // over seeded samples and harmonic prefixes
  bool bounded = false;    // max_ratio <= 1 + 1e-9
  std::vector<double> harmonic_ratios;  // prefixes L = 1..8
  bool witness_found = false;  // q < 1: first harmonic prefix with ratio > 2
  index_t witness_len = 0;
  index_t witness_support = 0;
  double witness_ratio = 0.0;
};

// Image support caps at 2^20 entries.  eta must be strictly increasing
// positive lengths and cover the support of f.
SpVec t_eta_apply(const std::vector<index_t>& eta, const SpVec& f);

std::vector<index_t> t_eta_default_schedule(index_t len);  // eta_k = 2^k

TEtaReport t_eta_check(double q, const std::vector<index_t>& eta, int samples,
                       std::uint64_t seed);

}  // namespace greedylab

#endif
