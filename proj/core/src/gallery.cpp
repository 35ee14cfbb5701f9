#include "greedylab/gallery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "greedylab/detail/numio.hpp"
#include "greedylab/rng.hpp"

namespace greedylab {

namespace {

using detail::fmt_double;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Signs through x_n = (-1)^(n-1) e_n: eps_n on x_n lands as
// eps_n (-1)^(n-1) on e_n.  Zero entries are skipped.
SpVec alternating_combination(const std::vector<int>& eps) {
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] == 0) continue;
    pairs.emplace_back(index_t(i + 1), (i % 2 == 0 ? 1.0 : -1.0) * eps[i]);
  }
  return SpVec::from_pairs(std::move(pairs));
}

double harmonic(index_t N) {
  double h = 0.0;
  for (index_t k = 1; k <= N; ++k) h += 1.0 / double(k);
  return h;
}

SpVec harmonic_prefix(index_t L) {
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(std::size_t(L));
  for (index_t i = 1; i <= L; ++i) pairs.emplace_back(i, 1.0 / double(i));
  return SpVec::from_pairs(std::move(pairs));
}

std::vector<index_t> magnitude_prefix(const SpVec& f, index_t m) {
  std::vector<index_t> order = f.support();
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = std::fabs(f.coef(a)), mb = std::fabs(f.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  order.resize(std::size_t(m));
  std::sort(order.begin(), order.end());
  return order;
}

// Every greedy set, all cardinalities, capped; a boundary level past the
// enumeration budget degrades to the greedy chain prefix at that size.
std::vector<std::vector<index_t>> all_greedy_sets(const SpVec& f,
                                                  std::size_t cap) {
  std::vector<std::vector<index_t>> out;
  const index_t supp = index_t(f.support_size());
  for (index_t m = 0; m <= supp && out.size() < cap; ++m) {
    try {
      for (auto& A : enumerate_greedy_sets(f, m)) {
        out.push_back(std::move(A));
        if (out.size() >= cap) break;
      }
    } catch (const std::runtime_error&) {
      out.push_back(magnitude_prefix(f, m));
    }
  }
  return out;
}

}  // namespace

// ---- alternating basis of the p-variation space --------------------------

VpAlternatingReport vp_alternating_report(double p, index_t m_max) {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("vp exponent must lie in (0,1]");
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");

  const SpacePtr X = parse_space("vp:" + fmt_double(p));
  VpAlternatingReport rep;
  rep.p = p;
  rep.m_max = m_max;
  rep.phi_u.reserve(std::size_t(m_max));
  rep.phi_eps_l.reserve(std::size_t(m_max));
  rep.growth_lo = kInf;
  rep.growth_hi = 0.0;

  std::vector<int> eps;
  for (index_t m = 1; m <= m_max; ++m) {
    eps.assign(std::size_t(m), 1);
    const double up = norm(*X, alternating_combination(eps));
    for (std::size_t i = 1; i < eps.size(); i += 2) eps[i] = -1;
    const double low = norm(*X, alternating_combination(eps));
    rep.phi_u.push_back(up);
    rep.phi_eps_l.push_back(low);
    const double ratio = up / std::pow(double(m), 1.0 / p);
    rep.growth_lo = std::min(rep.growth_lo, ratio);
    rep.growth_hi = std::max(rep.growth_hi, ratio);
    rep.eps_l_sup = std::max(rep.eps_l_sup, low);
  }

  rep.exhaustive_m = std::min<index_t>(m_max, 12);
  rep.structured_extremal = true;
  for (index_t m = 1; m <= rep.exhaustive_m; ++m) {
    double lo = kInf, hi = 0.0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << m); ++mask) {
      eps.resize(std::size_t(m));
      for (index_t i = 0; i < m; ++i)
        eps[std::size_t(i)] = (mask >> i & 1) ? -1 : 1;
      const double v = norm(*X, alternating_combination(eps));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double u = rep.phi_u[std::size_t(m - 1)];
    const double l = rep.phi_eps_l[std::size_t(m - 1)];
    if (std::fabs(hi - u) > 1e-12 * u || std::fabs(lo - l) > 1e-12 * l)
      rep.structured_extremal = false;
  }

  // Unsigned democracy over one shared index universe: the gap structure
  // of A moves the norm, so sets, not just prefixes.
  const index_t u = rep.exhaustive_m;
  std::vector<double> size_hi(std::size_t(u) + 1, 0.0);
  std::vector<double> size_lo(std::size_t(u) + 1, kInf);
  for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << u); ++mask) {
    std::vector<std::pair<index_t, double>> pairs;
    for (index_t i = 0; i < u; ++i)
      if (mask >> i & 1)
        pairs.emplace_back(i + 1, i % 2 == 0 ? 1.0 : -1.0);
    const std::size_t k = std::size_t(std::popcount(mask));
    const double v = norm(*X, SpVec::from_pairs(std::move(pairs)));
    size_hi[k] = std::max(size_hi[k], v);
    size_lo[k] = std::min(size_lo[k], v);
  }
  rep.democracy_lb = 0.0;
  for (std::size_t k = 1; k <= std::size_t(u); ++k)
    rep.democracy_lb = std::max(rep.democracy_lb, size_hi[k] / size_lo[k]);
  rep.democracy_bound = std::pow(2.0, 1.0 / p);

  rep.note =
      "sign prefixes through this basis evaluate to 2^(1/p) under the "
      "difference formula; the flat constant 2 sometimes attached to this "
      "example matches only at p = 1";
  return rep;
}

// ---- constant-coefficient gap inside lp + lq ------------------------------

SpVec lplq_synthesize(const SpVec& coords) {
  std::map<index_t, std::pair<double, double>> byk;
  for (const auto& [n, c] : coords.entries) {
    auto& slot = byk[(n + 1) / 2];
    (n % 2 == 1 ? slot.first : slot.second) = c;
  }
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(2 * byk.size());
  for (const auto& [k, cc] : byk) {
    const double a1 = cc.first + 0.5 * cc.second;
    const double a2 = cc.first + cc.second;
    if (a1 != 0.0) pairs.emplace_back(2 * k - 1, a1);
    if (a2 != 0.0) pairs.emplace_back(2 * k, a2);
  }
  return SpVec::from_pairs(std::move(pairs));
}

LplqReport lplq_succ_not_lucc_report(double p, double q, index_t m_max) {
  if (!(p > 0.0) || !(p < q))
    throw std::invalid_argument("exponents must satisfy 0 < p < q");
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");

  const std::string second = std::isinf(q) ? "c0" : "lp:" + fmt_double(q);
  const SpacePtr X = parse_space("dsum(lp:" + fmt_double(p) + "," + second + ")");
  LplqReport rep;
  rep.p = p;
  rep.q = q;
  rep.m_max = m_max;
  rep.space_label = X->label;
  rep.f_exact = rep.h_exact = rep.hf_strictly_increasing = true;

  SpVec fc, gc, hc;
  double prev = 0.0;
  for (index_t m = 1; m <= m_max; ++m) {
    fc.set(2 * m - 1, -1.0);
    fc.set(2 * m, 2.0);
    gc.set(2 * m - 1, -1.0);
    gc.set(2 * m, 1.0);
    hc.set(2 * m - 1, -1.0);
    const double f = norm(*X, lplq_synthesize(fc));
    const double g = norm(*X, lplq_synthesize(gc));
    const double h = norm(*X, lplq_synthesize(hc));
    rep.f_norms.push_back(f);
    rep.g_norms.push_back(g);
    rep.h_norms.push_back(h);
    if (f != std::pow(double(m), 1.0 / q)) rep.f_exact = false;
    if (h != std::pow(double(m), 1.0 / p)) rep.h_exact = false;
    const double ratio = h / f;
    if (m > 1 && !(ratio > prev)) rep.hf_strictly_increasing = false;
    prev = ratio;
  }

  rep.gf_doubling_increasing = true;
  for (index_t m = 1; m <= m_max; m *= 2) {
    const double r = rep.g_norms[std::size_t(m - 1)] / rep.f_norms[std::size_t(m - 1)];
    if (!rep.gf_doubling.empty() && !(r > rep.gf_doubling.back()))
      rep.gf_doubling_increasing = false;
    rep.gf_doubling.push_back(r);
  }

  rep.sandwich_lo = std::pow(2.0, -1.0 - 1.0 / p);
  rep.sandwich_hi = std::max({1.0, std::pow(2.0, 1.0 - 1.0 / q),
                              3.0 * std::pow(2.0, -1.0 - 1.0 / p)});
  rep.ratio_min = kInf;
  rep.ratio_max = 0.0;
  const index_t univ = 10;
  for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << univ); ++mask) {
    std::vector<index_t> A;
    for (index_t i = 0; i < univ; ++i)
      if (mask >> i & 1) A.push_back(i + 1);
    const double scale = std::pow(double(A.size()), 1.0 / p);
    for (std::uint32_t smask = 0; smask < (std::uint32_t(1) << A.size()); ++smask) {
      SpVec coords;
      for (std::size_t i = 0; i < A.size(); ++i)
        coords.set(A[i], (smask >> i & 1) ? -1.0 : 1.0);
      const double r = norm(*X, lplq_synthesize(coords)) / scale;
      rep.ratio_min = std::min(rep.ratio_min, r);
      rep.ratio_max = std::max(rep.ratio_max, r);
      if (r < rep.sandwich_lo - 1e-9 || r > rep.sandwich_hi + 1e-9)
        ++rep.sandwich_violations;
      ++rep.sandwich_checked;
    }
  }
  return rep;
}

// ---- orthonormal-block model in R^(2n) ------------------------------------

BasisModel hilbert_block_basis(int n) {
  if (n < 2 || n > 32)
    throw std::invalid_argument("block dimension must lie in [2, 32]");
  const int d = 2 * n;
  const double root = std::sqrt(n - 0.25);
  // ambient coordinates (0-based): X_1 = [0, n-1), the a-plane = {n-1, n},
  // X_2 = [n+1, 2n).  Column (s,j) = a_s/n + the zero-sum frame coordinates
  // of e_j - (1,...,1)/n placed inside X_s; unit norm by construction.
  std::vector<std::vector<double>> cols;
  cols.reserve(std::size_t(d));
  for (int s = 1; s <= 2; ++s) {
    const int off = s == 1 ? 0 : n + 1;
    const double half = s == 1 ? 0.5 : -0.5;
    for (int j = 1; j <= n; ++j) {
      std::vector<double> col(std::size_t(d), 0.0);
      col[std::size_t(n - 1)] = root / n;
      col[std::size_t(n)] = half / n;
      for (int i = 1; i <= n - 1; ++i) {
        double dot = 0.0;
        if (j - 1 < i) dot = 1.0;
        else if (j - 1 == i) dot = -double(i);
        col[std::size_t(off + i - 1)] = dot / std::sqrt(double(i) * (i + 1));
      }
      cols.push_back(std::move(col));
    }
  }
  return BasisModel::matrix(std::move(cols));
}

HilbertBlockReport hilbert_block_report(int n, bool with_operator_norms) {
  const BasisModel model = hilbert_block_basis(n);
  HilbertBlockReport rep;
  rep.n = n;
  rep.with_operator_norms = with_operator_norms;
  const int d = 2 * n;
  const double root = std::sqrt(n - 0.25);

  SpVec block_sum[2];
  double margin = 0.0;
  for (int s = 1; s <= 2; ++s) {
    SpVec ones;
    for (int j = 1; j <= n; ++j) ones.set(index_t((s - 1) * n + j), 1.0);
    block_sum[s - 1] = model.synthesize(ones);
    SpVec target;
    target.set(index_t(n), root);
    target.set(index_t(n + 1), s == 1 ? 0.5 : -0.5);
    margin = std::max(margin, model.norm(add_scaled(block_sum[s - 1], -1.0, target)));
  }
  rep.block_sum_margin = margin;
  rep.a_norm = model.norm(block_sum[0]);
  rep.a_diff_norm = model.norm(add_scaled(block_sum[0], -1.0, block_sum[1]));

  rep.dual_sq_min = kInf;
  rep.dual_sq_max = 0.0;
  for (int i = 1; i <= d; ++i) {
    const double t = model.dual_norm(index_t(i));
    rep.dual_sq_min = std::min(rep.dual_sq_min, t * t);
    rep.dual_sq_max = std::max(rep.dual_sq_max, t * t);
  }
  rep.dual_sq_bound = double(n) / (n - 0.25) + 1.0;

  SpVec eps;
  for (int j = 1; j <= n; ++j) {
    eps.set(index_t(j), -1.0);
    eps.set(index_t(n + j), 1.0);
  }
  rep.eps_theta_norm = model.norm(model.synthesize(eps));

  rep.demo_min = kInf;
  rep.demo_max = 0.0;
  auto eval_set = [&](std::uint64_t mask) {
    SpVec ind;
    int k = 0;
    for (int b = 0; b < d; ++b)
      if (mask >> b & 1) {
        ind.set(index_t(b + 1), 1.0);
        ++k;
      }
    if (k == 0) return;
    const double v = model.norm(model.synthesize(ind));
    rep.demo_min = std::min(rep.demo_min, v * v / k);
    rep.demo_max = std::max(rep.demo_max, v * v / k);
    ++rep.demo_sets;
  };
  rep.demo_exhaustive = d <= 16;
  if (rep.demo_exhaustive) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << d); ++mask)
      eval_set(mask);
  } else {
    auto low_bits = [](int t) {
      return t >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << t) - 1;
    };
    for (int t = 1; t <= d; ++t) eval_set(low_bits(t));
    for (int b = 0; b < d; ++b) eval_set(std::uint64_t(1) << b);
    eval_set(low_bits(n));
    eval_set(low_bits(n) << n);
    Rng rng(sub_seed(0, "hilbert-democracy"));
    for (int draw = 0; draw < 4096; ++draw) {
      std::uint64_t mask = 0;
      for (int b = 0; b < d; ++b)
        if (rng.sign() > 0) mask |= std::uint64_t(1) << b;
      eval_set(mask);
    }
  }

  if (with_operator_norms) {
    const index_t k = n / 2;
    std::vector<index_t> A;
    for (index_t i = 1; i <= k; ++i) A.push_back(i);
    rep.op_set_size = k;
    rep.op_norm = model.projection_operator_norm(A);
    rep.op_analytic_lb = std::sqrt(double(k) - double(k) * double(k) / n);
    rep.op_target = std::sqrt(2.0) / 3.0 * std::sqrt(double(n));
  }
  return rep;
}

// ---- spread-and-spike witness ---------------------------------------------

KtWitnessReport kt_not_qg_witness(double q, index_t N) {
  if (!(q > 1.0) || std::isinf(q))
    throw std::invalid_argument("outer exponent must be finite and above 1");
  if (N < 2) throw std::invalid_argument("N must be at least 2");
  const bool closed = q == 2.0;
  if (!closed && N > 4096)
    throw std::runtime_error("per-rank summation for q != 2 caps at N = 4096");

  KtWitnessReport rep;
  rep.q = q;
  rep.N = N;
  rep.space_label =
      "kt(lorentz:p=1,q=" + fmt_double(q) + ",w=const:1 ; w=const:1)";
  const double hn = harmonic(N);

  // Spikes occupy ranks 1..N of the rearrangement with values 1/k, so
  // their lorentz mass is the harmonic sum for every q.  Block k then
  // holds N copies of 1/(k N) on ranks (k N, (k+1) N].
  double spikes = 0.0;
  for (index_t k = 1; k <= N; ++k)
    spikes += std::pow(1.0 / double(k), q) * std::pow(double(k), q - 1.0);
  double blocks = 0.0;
  for (index_t k = 1; k <= N; ++k) {
    const double val = 1.0 / (double(k) * double(N));
    double rsum;
    if (closed) {
      const double lo = double(k) * double(N) + 1.0;
      const double hi = double(k + 1) * double(N);
      rsum = (hi - lo + 1.0) * (lo + hi) / 2.0;
    } else {
      rsum = 0.0;
      for (index_t r = k * N + 1; r <= (k + 1) * N; ++r)
        rsum += std::pow(double(r), q - 1.0);
    }
    blocks += std::pow(val, q) * rsum;
  }
  rep.lorentz_h = std::pow(spikes, 1.0 / q);
  rep.lorentz_g = std::pow(spikes + blocks, 1.0 / q);

  // Run-level partial sums: block k climbs to 1/k and its spike takes the
  // sum back to zero, exactly so for power-of-two N.
  double running = 0.0, best = 0.0;
  for (index_t k = 1; k <= N; ++k) {
    running += double(N) * (1.0 / (double(k) * double(N)));
    best = std::max(best, std::fabs(running));
    running -= 1.0 / double(k);
    best = std::max(best, std::fabs(running));
  }
  rep.sw_g = best;

  rep.norm_f = std::max(hn, rep.lorentz_h);
  rep.norm_h = std::max(hn, rep.lorentz_h);
  rep.norm_g = std::max(rep.sw_g, rep.lorentz_g);
  rep.ratio = rep.norm_h / rep.norm_g;
  rep.dense_support = N * (N + 1);
  rep.witness =
      "block k: N copies of 1/(k N) on ((k-1)(N+1), (k-1)(N+1)+N], spike "
      "-1/k at k(N+1), k = 1..N; B = the spike positions";
  return rep;
}

SpVec kt_witness_vector(index_t N) {
  if (N < 2) throw std::invalid_argument("N must be at least 2");
  if (N * (N + 1) > (index_t(1) << 21))
    throw std::runtime_error("dense witness caps at 2^21 entries");
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(std::size_t(N * (N + 1)));
  for (index_t k = 1; k <= N; ++k) {
    const index_t base = (k - 1) * (N + 1);
    const double val = 1.0 / (double(k) * double(N));
    for (index_t t = 1; t <= N; ++t) pairs.emplace_back(base + t, val);
    pairs.emplace_back(k * (N + 1), -1.0 / double(k));
  }
  return SpVec::from_pairs(std::move(pairs));
}

std::vector<index_t> kt_witness_spikes(index_t N) {
  if (N < 2) throw std::invalid_argument("N must be at least 2");
  std::vector<index_t> B;
  B.reserve(std::size_t(N));
  for (index_t k = 1; k <= N; ++k) B.push_back(k * (N + 1));
  return B;
}

// ---- greedy projection bound in the weighted partial-sum norm -------------

namespace {

// Truncated C[s,r]: j up to 2^16, primitive index capped at 2^17, the sup
// taken over a fixed n grid.  The grid spots the sup to well past where
// the expression peaks for potential weights.
double goal_constant(const WeightSpec& w, double r) {
  const index_t M = index_t(1) << 17;
  const index_t J = M >> 1;
  w.ensure(M);
  static constexpr index_t grid[] = {1, 2, 4, 8, 16, 64, 256, 1024, 4096, 10000};
  double best = 0.0;
  for (index_t n : grid) {
    double acc = 0.0;
    for (index_t j = 1; j <= J; ++j) {
      const index_t idx = n + j - 1;
      if (idx > M) break;
      acc += std::pow(w.s(j), -r) * w.s(idx) / double(idx);
    }
    best = std::max(best, std::pow(w.s(n), r - 1.0) * acc);
  }
  return best;
}

// Convergence probe for the n = 1 inner series: ratio of the last two
// dyadic increments.  A geometric tail lands at 2^(1-alpha); the 0.88
// threshold separates the summable grid exponents from the borderline.
double tail_ratio(const WeightSpec& w, double r) {
  const index_t J = index_t(1) << 16;
  w.ensure(J);
  double p14 = 0.0, p15 = 0.0, acc = 0.0;
  for (index_t j = 1; j <= J; ++j) {
    acc += std::pow(w.s(j), 1.0 - r) / double(j);
    if (j == (index_t(1) << 14)) p14 = acc;
    if (j == (index_t(1) << 15)) p15 = acc;
  }
  const double d1 = p15 - p14, d2 = acc - p15;
  return d1 > 0.0 ? d2 / d1 : 1.0;
}

}  // namespace

KtBoundReport kt_qg_bound_check(double p, double q, int samples,
                                std::uint64_t seed, index_t dimension) {
  if (!(p > 1.0) || std::isinf(p))
    throw std::invalid_argument("inner exponent must lie in (1, inf)");
  if (!(q > 1.0)) throw std::invalid_argument("outer exponent must exceed 1");
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  if (dimension < 2) throw std::invalid_argument("dimension must be at least 2");

  KtBoundReport rep;
  rep.p = p;
  rep.q = q;
  rep.samples = samples;
  rep.seed = seed;
  rep.dimension = dimension;
  const WeightSpec w = WeightSpec::pot(1.0 / p);
  rep.weight_label = w.label();
  rep.r_grid = {1.1, 1.25, 1.5, 2.0};
  for (double r : rep.r_grid) {
    const double t = tail_ratio(w, r);
    rep.tail_ratios.push_back(t);
    if (t <= 0.88) rep.admissible_r.push_back(r);
  }
  if (rep.admissible_r.empty())
    throw std::runtime_error(
        "no admissible r in the scan grid: every inner series is still "
        "growing at the probe horizon");
  rep.r_used = rep.admissible_r.front();
  rep.c_value = goal_constant(w, rep.r_used);
  rep.bound_factor = 2.0 * (1.0 + rep.c_value);

  const SpacePtr swx = parse_space("sw:w=" + rep.weight_label);
  const SpacePtr weak = parse_space("lorentz:p=1,q=inf,w=" + rep.weight_label);
  Rng rng(sub_seed(seed, "kt-qg-bound"));
  rep.worst_margin = kInf;
  for (int i = 0; i < samples; ++i) {
    SpVec f;
    for (index_t n = 1; n <= dimension; ++n) {
      const double c = rng.sym();
      if (c != 0.0) f.set(n, c);
    }
    if (f.empty()) f.set(1, 1.0);
    const double rhs =
        rep.bound_factor * std::max(norm(*weak, f), norm(*swx, f));
    for (const auto& A : all_greedy_sets(f, 256)) {
      const double lhs = norm(*swx, restrict_to(f, A));
      ++rep.sets_checked;
      rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
      rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
      if (lhs > rhs * (1.0 + 1e-9)) ++rep.violations;
    }
  }
  return rep;
}

// ---- Garling norms of run-length encoded sequences ------------------------

double garling_runs_norm(double p, const WeightSpec& w,
                         const std::vector<GarlingRun>& runs) {
  if (!(p > 0.0) || std::isinf(p))
    throw std::invalid_argument("garling p must be positive and finite");
  index_t T = 0;
  for (const auto& run : runs) {
    if (run.length < 0) throw std::invalid_argument("run length must be >= 0");
    T += run.length;
  }
  if (T == 0) return 0.0;
  w.ensure(T);
  // f[t] = best weighted mass from slots t+1, t+2, ... over the remaining
  // runs; a run of value v and length L extends it by
  //   f[t] = max_{u in [t, t+L]} (|v|^p s(u) + f_rest[u]) - |v|^p s(t),
  // the window maximum kept by a shrinking deque, O(T) per run.
  const std::size_t sz = std::size_t(T) + 1;
  std::vector<double> f(sz, 0.0), g(sz);
  std::vector<index_t> dq(sz);
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
    const index_t L = it->length;
    if (L == 0) continue;
    const double vp = std::pow(std::fabs(it->value), p);
    for (index_t t = 0; t <= T; ++t) g[std::size_t(t)] = vp * w.s(t) + f[std::size_t(t)];
    std::size_t head = 0, tail = 0;
    for (index_t t = T; t >= 0; --t) {
      while (tail > head && g[std::size_t(dq[tail - 1])] <= g[std::size_t(t)])
        --tail;
      dq[tail++] = t;
      while (dq[head] > t + L) ++head;
      f[std::size_t(t)] = g[std::size_t(dq[head])] - vp * w.s(t);
    }
  }
  return std::pow(f[0], 1.0 / p);
}

// ---- l1 escape under a pinned Garling norm --------------------------------

GarlingEscapeReport garling_l1_escape(double p, int stages) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("escape needs 0 < p < 1");
  if (stages < 1) throw std::invalid_argument("need at least one stage");
  if (16 - 3 * (stages - 1) < 1)
    throw std::runtime_error(
        "construction budget: block lengths underflow past 6 stages");
  index_t total = 0;
  for (int j = 1; j <= stages; ++j)
    total += index_t(1) << (16 - 3 * (stages - j));
  if (total > 100000)
    throw std::runtime_error("construction budget: tuple cap 1e5 exceeded");

  GarlingEscapeReport rep;
  rep.p = p;
  rep.stages = stages;
  const WeightSpec w = WeightSpec::pot(1.0 - p);
  rep.weight_label = w.label();
  w.ensure(index_t(1) << 17);
  const double inv_p = 1.0 / p;

  rep.lambdas_above_half = true;
  for (int m = 1; m <= stages; ++m) {
    GarlingEscapeStage st;
    st.blocks = m;
    std::vector<GarlingRun> stack;
    for (int j = 1; j <= m; ++j) {
      const index_t k = index_t(1) << (16 - 3 * (m - j));
      const double base = stack.empty() ? 0.0 : garling_runs_norm(p, w, stack);
      const double tau = std::max(1.0, base * (1.0 + 1e-12));
      // Largest level at which the new block still leaves the stack norm
      // inside tau; the single-block norm c s(k)^(1/p) bounds the bracket.
      double lo = 0.0, hi = std::pow(w.s(k), -inv_p);
      std::vector<GarlingRun> cand(stack.size() + 1);
      std::copy(stack.begin(), stack.end(), cand.begin() + 1);
      for (int step = 0; step < 100; ++step) {
        const double c = 0.5 * (lo + hi);
        cand[0] = GarlingRun{c, k};
        if (garling_runs_norm(p, w, cand) <= tau) lo = c;
        else hi = c;
      }
      stack.insert(stack.begin(), GarlingRun{lo, k});
      st.lambdas.push_back(lo * std::pow(w.s(k), inv_p));
    }
    for (const auto& run : stack) st.lengths.push_back(run.length);
    st.stack_norm = garling_runs_norm(p, w, stack);
    std::vector<GarlingRun> h;
    h.reserve(stack.size());
    double mass = 0.0;
    for (const auto& run : stack) {
      h.push_back(GarlingRun{1.0 / double(run.length), run.length});
      mass += double(run.length) * h.back().value;
    }
    st.h_norm = garling_runs_norm(p, w, h);
    st.h_l1 = mass;
    st.lambda_min = *std::min_element(st.lambdas.begin(), st.lambdas.end());
    if (st.lambda_min < 0.5) rep.lambdas_above_half = false;
    rep.stage.push_back(std::move(st));
  }
  rep.escape_ratio = rep.stage.back().h_norm / rep.stage.front().h_norm;
  return rep;
}

// ---- block-averaging operator ---------------------------------------------

namespace {

void check_schedule(const std::vector<index_t>& eta) {
  if (eta.empty()) throw std::invalid_argument("schedule must be nonempty");
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] < 1)
      throw std::invalid_argument("schedule lengths must be positive");
    if (i > 0 && eta[i] <= eta[i - 1])
      throw std::invalid_argument("schedule must be strictly increasing");
  }
}

}  // namespace

SpVec t_eta_apply(const std::vector<index_t>& eta, const SpVec& f) {
  check_schedule(eta);
  if (f.empty()) return {};
  if (f.max_index() > index_t(eta.size()))
    throw std::invalid_argument("support of f sticks out of the schedule");
  index_t entries = 0;
  for (const auto& [k, c] : f.entries) entries += eta[std::size_t(k - 1)];
  if (entries > (index_t(1) << 20))
    throw std::runtime_error("image support exceeds the 2^20 cap");
  std::vector<index_t> offset(eta.size() + 1, 0);
  for (std::size_t i = 0; i < eta.size(); ++i) offset[i + 1] = offset[i] + eta[i];
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(std::size_t(entries));
  for (const auto& [k, c] : f.entries) {
    const index_t len = eta[std::size_t(k - 1)];
    const double val = c / double(len);
    for (index_t t = 1; t <= len; ++t)
      pairs.emplace_back(offset[std::size_t(k - 1)] + t, val);
  }
  return SpVec::from_pairs(std::move(pairs));
}

std::vector<index_t> t_eta_default_schedule(index_t len) {
  if (len < 1 || len > 40)
    throw std::invalid_argument("schedule length must lie in [1, 40]");
  std::vector<index_t> eta(std::size_t(len));
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = index_t(1) << (i + 1);
  return eta;
}

TEtaReport t_eta_check(double q, const std::vector<index_t>& eta, int samples,
                       std::uint64_t seed) {
  if (!(q > 0.0) || std::isinf(q))
    throw std::invalid_argument("outer exponent must be finite and positive");
  if (samples < 0) throw std::invalid_argument("samples must be >= 0");
  check_schedule(eta);

  TEtaReport rep;
  rep.q = q;
  rep.samples = samples;
  rep.seed = seed;
  rep.schedule_len = index_t(eta.size());
  for (std::size_t i = 0; i < eta.size() && i < 6; ++i) {
    if (i) rep.schedule += ',';
    rep.schedule += std::to_string(eta[i]);
  }
  if (eta.size() > 6) rep.schedule += ",...";

  const SpacePtr X = parse_space("lorentz:p=1,q=" + fmt_double(q) + ",w=const:1");
  auto ratio_of = [&](const SpVec& f) {
    const double den = norm(*X, f);
    return den > 0.0 ? norm(*X, t_eta_apply(eta, f)) / den : 0.0;
  };

  double best = 0.0;
  const index_t hmax = std::min<index_t>(8, rep.schedule_len);
  for (index_t L = 1; L <= hmax; ++L) {
    const double r = ratio_of(harmonic_prefix(L));
    rep.harmonic_ratios.push_back(r);
    best = std::max(best, r);
  }

  if (q >= 1.0) {
    Rng rng(sub_seed(seed, "t-eta-samples"));
    const index_t cap = std::min<index_t>(rep.schedule_len, 12);
    for (int i = 0; i < samples; ++i) {
      SpVec f;
      const index_t len = index_t(rng.below(std::uint64_t(cap))) + 1;
      for (index_t k = 1; k <= len; ++k) {
        if (rng.sign() < 0) continue;
        const double c = rng.sym();
        if (c != 0.0) f.set(k, c);
      }
      if (f.empty()) f.set(1, 1.0);
      best = std::max(best, ratio_of(f));
    }
  } else {
    for (index_t L = 4; L <= rep.schedule_len; ++L) {
      index_t supp = 0;
      for (index_t i = 0; i < L; ++i) supp += eta[std::size_t(i)];
      if (supp > 10000) break;
      const double r = ratio_of(harmonic_prefix(L));
      if (r > 2.0) {
        rep.witness_found = true;
        rep.witness_len = L;
        rep.witness_support = supp;
        rep.witness_ratio = r;
        break;
      }
    }
  }
  rep.max_ratio = best;
  rep.bounded = best <= 1.0 + 1e-9;
  return rep;
}

}  // namespace greedylab
