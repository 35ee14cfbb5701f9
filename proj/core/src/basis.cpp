#include "greedylab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "greedylab/rng.hpp"

namespace greedylab {
namespace {

double mag(double c) { return std::abs(c); }

int sgn(double c) { return (c > 0.0) - (c < 0.0); }

std::vector<index_t> canonical_set(std::vector<index_t> A) {
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  return A;
}

// Entries of f whose index is not in sorted `A`.
SpVec complement_of(const SpVec& f, const std::vector<index_t>& A) {
  SpVec out;
  out.entries.reserve(f.entries.size());
  auto it = A.begin();
  for (const auto& [n, c] : f.entries) {
    while (it != A.end() && *it < n) ++it;
    if (it != A.end() && *it == n) continue;
    out.entries.emplace_back(n, c);
  }
  return out;
}

double euclidean(const SpVec& f) {
  double s = 0.0;
  for (const auto& [n, c] : f.entries) s += c * c;
  return std::sqrt(s);
}

// Row-reduce [M | I] with partial pivoting; returns the inverse rows.
// Throws when a pivot collapses, which is how singular column sets fail.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> M) {
  const std::size_t d = M.size();
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (mag(M[r][col]) > mag(M[piv][col])) piv = r;
    if (mag(M[piv][col]) < 1e-13)
      throw std::invalid_argument("basis matrix is singular");
    std::swap(M[piv], M[col]);
    std::swap(inv[piv], inv[col]);
    const double s = 1.0 / M[col][col];
    for (std::size_t j = 0; j < d; ++j) {
      M[col][j] *= s;
      inv[col][j] *= s;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double t = M[r][col];
      if (t == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        M[r][j] -= t * M[col][j];
        inv[r][j] -= t * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace

BasisModel BasisModel::lattice(SpacePtr space) {
  if (!space) throw std::invalid_argument("lattice model needs a space");
  BasisModel m;
  m.space_ = std::move(space);
  return m;
}

BasisModel BasisModel::matrix(std::vector<std::vector<double>> columns) {
  const std::size_t d = columns.size();
  if (d == 0) throw std::invalid_argument("matrix model needs columns");
  for (const auto& col : columns)
    if (col.size() != d)
      throw std::invalid_argument("matrix model columns must have length d");
  // Rows of X^{-1} are the dual functionals: x*_j(g) = (X^{-1} g)_j.
  std::vector<std::vector<double>> X(d, std::vector<double>(d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) X[i][k] = columns[k][i];
  auto duals = invert(std::move(X));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += duals[j][i] * columns[k][i];
      if (mag(dot - (j == k ? 1.0 : 0.0)) > 1e-10)
        throw std::invalid_argument("dual functionals fail biorthogonality");
    }
  BasisModel m;
  m.d_ = static_cast<index_t>(d);
  m.cols_ = std::move(columns);
  m.duals_ = std::move(duals);
  return m;
}

const SpacePtr& BasisModel::space() const {
  if (is_matrix()) throw std::logic_error("matrix model has no space");
  return space_;
}

SpVec BasisModel::coordinates(const SpVec& f) const {
  if (!is_matrix()) return f;
  if (f.max_index() > d_)
    throw std::invalid_argument("vector exceeds the model dimension");
  SpVec out;
  for (index_t j = 1; j <= d_; ++j) {
    double c = 0.0;
    for (const auto& [i, v] : f.entries) c += duals_[j - 1][i - 1] * v;
    if (c != 0.0) out.entries.emplace_back(j, c);
  }
  return out;
}

SpVec BasisModel::synthesize(const SpVec& coords) const {
  if (!is_matrix()) return coords;
  if (coords.max_index() > d_)
    throw std::invalid_argument("coordinates exceed the model dimension");
  std::vector<double> g(static_cast<std::size_t>(d_), 0.0);
  for (const auto& [n, c] : coords.entries)
    for (index_t i = 0; i < d_; ++i) g[i] += c * cols_[n - 1][i];
  SpVec out;
  for (index_t i = 0; i < d_; ++i)
    if (g[i] != 0.0) out.entries.emplace_back(i + 1, g[i]);
  return out;
}

double BasisModel::norm(const SpVec& f) const {
  return is_matrix() ? euclidean(f) : greedylab::norm(*space_, f);
}

SpVec BasisModel::project(const SpVec& f, const std::vector<index_t>& A) const {
  if (!is_matrix()) return restrict_to(f, A);
  return synthesize(restrict_to(coordinates(f), A));
}

double BasisModel::basis_vector_norm(index_t n) const {
  if (n < 1) throw std::invalid_argument("basis index must be >= 1");
  if (!is_matrix()) return greedylab::norm(*space_, indicator({n}));
  if (n > d_) throw std::invalid_argument("basis index exceeds the dimension");
  double s = 0.0;
  for (double v : cols_[n - 1]) s += v * v;
  return std::sqrt(s);
}

double BasisModel::dual_norm(index_t n) const {
  if (!is_matrix()) throw std::logic_error("dual_norm needs the matrix variant");
  if (n < 1 || n > d_) throw std::invalid_argument("dual index out of range");
  double s = 0.0;
  for (double v : duals_[n - 1]) s += v * v;
  return std::sqrt(s);
}

double BasisModel::projection_operator_norm(
    const std::vector<index_t>& A) const {
  if (!is_matrix())
    throw std::logic_error("projection_operator_norm needs the matrix variant");
  auto idx = canonical_set(A);
  if (idx.empty()) return 0.0;
  for (index_t n : idx)
    if (n < 1 || n > d_) throw std::invalid_argument("index out of range");
  const std::size_t d = static_cast<std::size_t>(d_);
  // M g = sum_{n in A} (x*_n . g) x_n; top singular value via the Gram
  // form M^T M.  The seeded start keeps runs reproducible.
  std::vector<double> v(d), Mv(d), u(d);
  Rng rng(sub_seed(0, "projection-operator-norm"));
  for (std::size_t i = 0; i < d; ++i) v[i] = rng.sym() + 1e-3;
  double lam = 0.0;
  for (int step = 0; step < 200; ++step) {
    std::fill(Mv.begin(), Mv.end(), 0.0);
    for (index_t n : idx) {
      const auto& dr = duals_[n - 1];
      const auto& cl = cols_[n - 1];
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += dr[i] * v[i];
      for (std::size_t i = 0; i < d; ++i) Mv[i] += dot * cl[i];
    }
    std::fill(u.begin(), u.end(), 0.0);
    for (index_t n : idx) {
      const auto& dr = duals_[n - 1];
      const auto& cl = cols_[n - 1];
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += cl[i] * Mv[i];
      for (std::size_t i = 0; i < d; ++i) u[i] += dot * dr[i];
    }
    double nu = 0.0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;
    if (step > 0 && mag(nu - lam) <= 1e-8 * std::max(1.0, nu)) {
      lam = nu;
      break;
    }
    lam = nu;
    for (std::size_t i = 0; i < d; ++i) v[i] = u[i] / nu;
  }
  return std::sqrt(lam);
}

std::vector<index_t> greedy_order(const BasisModel& model, const SpVec& f) {
  const SpVec c = model.coordinates(f);
  std::vector<index_t> idx = c.support();
  std::sort(idx.begin(), idx.end(), [&](index_t a, index_t b) {
    const double ma = mag(c.coef(a)), mb = mag(c.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  return idx;
}

SpVec greedy_projection(const BasisModel& model, const SpVec& f, index_t m) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const auto order = greedy_order(model, f);
  if (m >= static_cast<index_t>(order.size())) return f;
  std::vector<index_t> A(order.begin(), order.begin() + m);
  return model.project(f, A);
}

SpVec residual(const BasisModel& model, const SpVec& f, index_t m) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const auto order = greedy_order(model, f);
  if (m >= static_cast<index_t>(order.size())) return SpVec{};
  if (!model.is_matrix()) {
    // Exact coefficient split: G_m + H_m = f entry for entry.
    std::vector<index_t> rest(order.begin() + m, order.end());
    return restrict_to(f, canonical_set(rest));
  }
  std::vector<index_t> A(order.begin(), order.begin() + m);
  return add_scaled(f, -1.0, model.project(f, A));
}

bool is_greedy_set(const SpVec& coords, const std::vector<index_t>& A) {
  const auto idx = canonical_set(A);
  if (idx.empty()) return true;
  double inside = std::numeric_limits<double>::infinity();
  for (index_t n : idx) inside = std::min(inside, mag(coords.coef(n)));
  double outside = 0.0;
  auto it = idx.begin();
  for (const auto& [n, c] : coords.entries) {
    while (it != idx.end() && *it < n) ++it;
    if (it != idx.end() && *it == n) continue;
    outside = std::max(outside, mag(c));
  }
  return inside >= outside;
}

std::vector<std::vector<index_t>> enumerate_greedy_sets(const SpVec& coords,
                                                        index_t m) {
  const index_t n = static_cast<index_t>(coords.support_size());
  if (m < 0 || m > n)
    throw std::invalid_argument("m must lie in [0, |supp|]");
  if (m == 0) return {{}};
  // Magnitude levels, largest first, indices ascending inside each level.
  std::vector<index_t> order;
  order.reserve(coords.entries.size());
  for (const auto& [i, c] : coords.entries) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = mag(coords.coef(a)), mb = mag(coords.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::vector<index_t> base;
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos;
    const double level = mag(coords.coef(order[pos]));
    while (end < order.size() && mag(coords.coef(order[end])) == level) ++end;
    if (base.size() + (end - pos) <= static_cast<std::size_t>(m)) {
      base.insert(base.end(), order.begin() + pos, order.begin() + end);
      pos = end;
      if (base.size() == static_cast<std::size_t>(m)) break;
      continue;
    }
    // Boundary level: choose the remaining slots freely inside it.
    const std::size_t need = static_cast<std::size_t>(m) - base.size();
    const std::size_t width = end - pos;
    if (width > 20)
      throw std::runtime_error(
          "greedy set boundary level exceeds the combinatorial cap (20)");
    std::vector<index_t> level_idx(order.begin() + pos, order.begin() + end);
    std::sort(level_idx.begin(), level_idx.end());
    std::vector<std::vector<index_t>> out;
    std::vector<std::size_t> pick(need);
    for (std::size_t i = 0; i < need; ++i) pick[i] = i;
    while (true) {
      std::vector<index_t> A = base;
      for (std::size_t i : pick) A.push_back(level_idx[i]);
      std::sort(A.begin(), A.end());
      out.push_back(std::move(A));
      std::size_t i = need;
      while (i > 0 && pick[i - 1] == width - need + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < need; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
  }
  std::sort(base.begin(), base.end());
  return {base};
}

SpVec truncation_U(const BasisModel& model, const SpVec& f,
                   const std::vector<index_t>& A) {
  const SpVec c = model.coordinates(f);
  const auto idx = canonical_set(A);
  if (!is_greedy_set(c, idx))
    throw std::invalid_argument("A is not a greedy set of f");
  if (idx.empty()) return SpVec{};
  double t = std::numeric_limits<double>::infinity();
  for (index_t n : idx) t = std::min(t, mag(c.coef(n)));
  SpVec u;
  for (index_t n : idx) {
    const double s = t * sgn(c.coef(n));
    if (s != 0.0) u.entries.emplace_back(n, s);
  }
  return model.synthesize(u);
}

SpVec truncation_T(const BasisModel& model, const SpVec& f,
                   const std::vector<index_t>& A) {
  const SpVec c = model.coordinates(f);
  const auto idx = canonical_set(A);
  if (!is_greedy_set(c, idx))
    throw std::invalid_argument("A is not a greedy set of f");
  if (idx.empty()) return f;
  double t = std::numeric_limits<double>::infinity();
  for (index_t n : idx) t = std::min(t, mag(c.coef(n)));
  SpVec tc = complement_of(c, idx);
  for (index_t n : idx) {
    const double s = t * sgn(c.coef(n));
    if (s != 0.0) tc.set(n, s);
  }
  return model.synthesize(tc);
}

GreedyTrace greedy_trace(const BasisModel& model, const SpVec& f) {
  GreedyTrace tr;
  tr.ordering = greedy_order(model, f);
  const index_t n = static_cast<index_t>(tr.ordering.size());
  tr.greedy_sets.reserve(static_cast<std::size_t>(n));
  for (index_t m = 1; m <= n; ++m) {
    std::vector<index_t> A(tr.ordering.begin(), tr.ordering.begin() + m);
    std::sort(A.begin(), A.end());
    tr.greedy_sets.push_back(std::move(A));
  }
  tr.residual_norms.reserve(static_cast<std::size_t>(n) + 1);
  for (index_t m = 0; m <= n; ++m)
    tr.residual_norms.push_back(model.norm(residual(model, f, m)));
  return tr;
}

namespace {

double measure(const BasisModel& model, const SpacePtr& space, const SpVec& f) {
  if (!space) return model.norm(f);
  if (model.is_matrix())
    throw std::invalid_argument("matrix models measure in their own norm");
  return greedylab::norm(*space, f);
}

// f - S_B f in the model, measured.
double projection_error(const BasisModel& model, const SpacePtr& space,
                        const SpVec& f, const SpVec& coords,
                        const std::vector<index_t>& B) {
  if (!model.is_matrix()) return measure(model, space, complement_of(f, B));
  return measure(model, space,
                 add_scaled(f, -1.0, model.synthesize(restrict_to(coords, B))));
}

double binom(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= double(n - k + i) / double(i);
    if (r > 1e18) return r;
  }
  return r;
}

template <typename Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    visit(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

// Minimize fn over [lo, hi]; plain golden section, 64 shrink steps.
template <typename Fn>
double golden_argmin(double lo, double hi, Fn&& fn) {
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < 64; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Coordinate descent from the warm start b = coords|_B.  Returns the best
// error found and its approximant; an upper bound on the free-coefficient
// minimum.
std::pair<double, SpVec> refine_coefficients(const BasisModel& model,
                                             const SpacePtr& space,
                                             const SpVec& f, const SpVec& coords,
                                             const std::vector<index_t>& B) {
  SpVec approx = restrict_to(coords, B);
  double maxmag = 0.0;
  for (const auto& [n, c] : coords.entries) maxmag = std::max(maxmag, mag(c));
  auto error_of = [&](const SpVec& b) {
    return measure(model, space, add_scaled(f, -1.0, model.synthesize(b)));
  };
  double best = error_of(approx);
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool improved = false;
    for (index_t n : B) {
      const double c = approx.coef(n);
      const double r = 2.0 * (maxmag + mag(c)) + 1.0;
      auto slice = [&](double t) {
        SpVec g = approx;
        g.set(n, t);
        return error_of(g);
      };
      const double t = golden_argmin(c - r, c + r, slice);
      const double v = slice(t);
      if (v < best * (1.0 - 1e-12)) {
        approx.set(n, t);
        best = v;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {best, approx};
}

std::vector<std::vector<index_t>> heuristic_subsets(const SpVec& coords,
                                                    index_t m,
                                                    bool exact_size) {
  const auto supp = coords.support();
  const std::size_t n = supp.size();
  const std::size_t want = static_cast<std::size_t>(
      std::min<index_t>(m, static_cast<index_t>(n)));
  std::vector<std::vector<index_t>> out;
  std::vector<index_t> order = supp;
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = mag(coords.coef(a)), mb = mag(coords.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  // Greedy chain prefixes.
  for (std::size_t k = exact_size ? want : 0; k <= want; ++k) {
    std::vector<index_t> A(order.begin(), order.begin() + k);
    std::sort(A.begin(), A.end());
    out.push_back(std::move(A));
  }
  // Level aligned cuts: never split a magnitude tie.
  std::size_t pos = 0;
  std::vector<index_t> base;
  while (pos < n) {
    std::size_t end = pos;
    const double level = mag(coords.coef(order[pos]));
    while (end < n && mag(coords.coef(order[end])) == level) ++end;
    if (end - pos + base.size() > want) break;
    base.insert(base.end(), order.begin() + pos, order.begin() + end);
    pos = end;
    if (!exact_size || base.size() == want) {
      std::vector<index_t> A = base;
      std::sort(A.begin(), A.end());
      out.push_back(std::move(A));
    }
  }
  // Seeded random subsets.
  Rng rng(sub_seed(0, "sigma-heuristic"));
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t k =
        exact_size ? want
                   : static_cast<std::size_t>(rng.below(want + 1));
    std::vector<index_t> pool = supp;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<index_t> A(pool.begin(), pool.begin() + k);
    std::sort(A.begin(), A.end());
    out.push_back(std::move(A));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

MTermError sigma_tilde(const BasisModel& model, const SpacePtr& space,
                       const SpVec& f, index_t m, SigmaMode mode) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const SpVec coords = model.coordinates(f);
  const std::size_t n = coords.support_size();
  const std::size_t want =
      static_cast<std::size_t>(std::min<index_t>(m, static_cast<index_t>(n)));
  MTermError out;
  out.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<index_t>& B) {
    const double v = projection_error(model, space, f, coords, B);
    if (v < out.value) {
      out.value = v;
      out.set = B;
      out.approx = restrict_to(coords, B);
    }
  };
  if (mode == SigmaMode::Exact) {
    double total = 0.0;
    for (std::size_t k = 0; k <= want; ++k) total += binom(n, k);
    if (total > 1e6)
      throw std::runtime_error(
          "sigma_tilde exact budget exceeded: C(|supp|, <=m) > 1e6");
    const auto supp = coords.support();
    for (std::size_t k = 0; k <= want; ++k)
      for_each_subset(n, k, [&](const std::vector<std::size_t>& pick) {
        std::vector<index_t> B;
        B.reserve(k);
        for (std::size_t i : pick) B.push_back(supp[i]);
        consider(B);
      });
    out.certified = true;
    return out;
  }
  for (const auto& B : heuristic_subsets(coords, m, false)) consider(B);
  return out;
}

MTermError sigma(const BasisModel& model, const SpacePtr& space, const SpVec& f,
                 index_t m, SigmaMode mode) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const SpVec coords = model.coordinates(f);
  const std::size_t n = coords.support_size();
  if (m >= static_cast<index_t>(n))
    return {0.0, true, coords.support(), coords};
  const std::size_t want = static_cast<std::size_t>(m);
  const bool lattice_norm =
      !model.is_matrix() &&
      (space ? space->lattice_unconditional
             : model.space()->lattice_unconditional);
  const auto supp = coords.support();
  MTermError out;
  out.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<index_t>& B) {
    if (lattice_norm) {
      const double v = projection_error(model, space, f, coords, B);
      if (v < out.value) {
        out.value = v;
        out.set = B;
        out.approx = restrict_to(coords, B);
      }
      return;
    }
    auto [v, approx] = refine_coefficients(model, space, f, coords, B);
    if (v < out.value) {
      out.value = v;
      out.set = B;
      out.approx = std::move(approx);
    }
  };
  if (mode == SigmaMode::Exact) {
    if (binom(n, want) > 1e6)
      throw std::runtime_error("sigma exact budget exceeded: C(|supp|, m) > 1e6");
    for_each_subset(n, want, [&](const std::vector<std::size_t>& pick) {
      std::vector<index_t> B;
      B.reserve(want);
      for (std::size_t i : pick) B.push_back(supp[i]);
      consider(B);
    });
    out.certified = lattice_norm;
    return out;
  }
  for (const auto& B : heuristic_subsets(coords, m, true)) consider(B);
  return out;
}

}  // namespace greedylab
