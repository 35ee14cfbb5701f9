#ifndef GREEDYLAB_BASIS_HPP
#define GREEDYLAB_BASIS_HPP

#include <cstdint>
#include <vector>

#include "greedylab/spaces.hpp"
#include "greedylab/spvec.hpp"

namespace greedylab {

// Basis under study.  Two variants:
//  - lattice: the unit vector system of a sequence space, coordinates of
//    f are its stored coefficients;
//  - matrix: an explicit basis of R^d given as d columns, dual functionals
//    solved from the biorthogonality system (validated to 1e-10), norms
//    taken in the ambient Euclidean metric.
class BasisModel {
 public:
  static BasisModel lattice(SpacePtr space);
  // columns[k] is the (k+1)-th basis vector, each of length d = columns.size().
  static BasisModel matrix(std::vector<std::vector<double>> columns);

  bool is_matrix() const { return d_ > 0; }
  const SpacePtr& space() const;   // lattice variant only
  index_t dimension() const { return d_; }

  // Coefficients of f through the dual functionals.  Lattice: f itself.
  SpVec coordinates(const SpVec& f) const;
  // sum_n c_n x_n as an ambient vector.  Lattice: c itself.
  SpVec synthesize(const SpVec& coords) const;
  // Lattice: the space quasi-norm of the coefficients; matrix: Euclidean.
  double norm(const SpVec& f) const;

  // S_A f: keep the coordinates on A, synthesize back.
  SpVec project(const SpVec& f, const std::vector<index_t>& A) const;

  double basis_vector_norm(index_t n) const;
  double dual_norm(index_t n) const;  // matrix variant only

  // Operator norm of S_A on the Euclidean ambient, matrix variant only.
  // Power iteration on the Gram form, 200 steps, tolerance 1e-8.
  double projection_operator_norm(const std::vector<index_t>& A) const;

 private:
  BasisModel() = default;
  SpacePtr space_;
  index_t d_ = 0;
  std::vector<std::vector<double>> cols_;   // cols_[k]  = x_{k+1}
  std::vector<std::vector<double>> duals_;  // duals_[j] = x*_{j+1}
};

// Support of the coordinates sorted by strictly decreasing magnitude,
// ties broken by smaller index.  Zero vector gives an empty ordering.
std::vector<index_t> greedy_order(const BasisModel& model, const SpVec& f);

// G_m f = S_{A_m} f with A_m the first m entries of the greedy ordering,
// and H_m f = f - G_m f.  m past the support size keeps all of f.
SpVec greedy_projection(const BasisModel& model, const SpVec& f, index_t m);
SpVec residual(const BasisModel& model, const SpVec& f, index_t m);

// A is a greedy set of f: no coordinate outside A beats one inside.
bool is_greedy_set(const SpVec& coords, const std::vector<index_t>& A);

// All greedy sets of cardinality m: the full higher magnitude levels plus
// every right-sized subset of the boundary level.  Boundary levels with
// more than 20 members exceed the combinatorial budget and throw.
std::vector<std::vector<index_t>> enumerate_greedy_sets(const SpVec& coords,
                                                        index_t m);

// U(f,A) = min_{n in A}|c_n| sum_{n in A} sgn(c_n) x_n and
// T(f,A) = U(f,A) + S_{A^c} f.  A must pass the greedy-set test; any such
// set is accepted, not only prefixes of the greedy chain.  Empty A gives
// U = 0 and T = f.
SpVec truncation_U(const BasisModel& model, const SpVec& f,
                   const std::vector<index_t>& A);
SpVec truncation_T(const BasisModel& model, const SpVec& f,
                   const std::vector<index_t>& A);

// Full greedy run on one vector.  greedy_sets[m-1] holds A_m sorted by
// index; residual_norms[m] = ||f - G_m f|| for m = 0..|supp|, so the last
// entry vanishes.
struct GreedyTrace {
  std::vector<index_t> ordering;
  std::vector<std::vector<index_t>> greedy_sets;
  std::vector<double> residual_norms;
};

GreedyTrace greedy_trace(const BasisModel& model, const SpVec& f);

enum class SigmaMode { Exact, Heuristic };

// certified = the value is the true minimum, not just an upper bound.
// Exact mode certifies sigma_tilde always and sigma on lattice norms;
// coefficient refinement and heuristic candidate sets only bound.
// set/approx witness the value: approx is the achieving m-term combination
// in coordinates, so value = ||f - synthesize(approx)|| re-evaluates it.
struct MTermError {
  double value = 0.0;
  bool certified = false;
  std::vector<index_t> set;
  SpVec approx;
};

// Best m-term error with free coefficients,
//   sigma_m(f) = inf ||f - sum_{n in B} b_n x_n||, |B| <= m.
// Lattice norms take b = coefficients of f on B (optimal by monotonicity)
// and minimize ||S_{B^c} f|| over |B| = m.  Other norms enumerate B and
// refine the warm start b = f|_B by 20 coordinate-descent sweeps with a
// golden-section line search per coordinate.
// space selects the error norm; null means the model's own norm (required
// for the matrix variant).
MTermError sigma(const BasisModel& model, const SpacePtr& space, const SpVec& f,
                 index_t m, SigmaMode mode);

// Restricted variant over coordinate projections,
//   sigma_tilde_m(f) = inf {||f - S_B f|| : |B| <= m}.
// Exact mode enumerates every B with C(|supp|, <=m) <= 1e6 and throws past
// that budget; heuristic mode takes the best of greedy prefixes, level
// aligned sets and 1e3 seeded random subsets.
MTermError sigma_tilde(const BasisModel& model, const SpacePtr& space,
                       const SpVec& f, index_t m, SigmaMode mode);

}  // namespace greedylab

#endif
