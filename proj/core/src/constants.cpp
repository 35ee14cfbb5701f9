#include "greedylab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "greedylab/geom.hpp"
#include "greedylab/rng.hpp"

namespace greedylab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindRow {
  ConstantKind kind;
  const char* name;
};

const KindRow kKinds[] = {
    {ConstantKind::K_su, "K_su"},       {ConstantKind::K_u, "K_u"},
    {ConstantKind::K_sc, "K_sc"},       {ConstantKind::K_lc, "K_lc"},
    {ConstantKind::K_pu, "K_pu"},       {ConstantKind::C_qg, "C_qg"},
    {ConstantKind::C_ql, "C_ql"},       {ConstantKind::C_ag, "C_ag"},
    {ConstantKind::C_g, "C_g"},         {ConstantKind::Delta, "Delta"},
    {ConstantKind::Delta_d, "Delta_d"}, {ConstantKind::Delta_s, "Delta_s"},
    {ConstantKind::Delta_sd, "Delta_sd"}, {ConstantKind::Gamma, "Gamma"},
    {ConstantKind::Lambda_u, "Lambda_u"}, {ConstantKind::Lambda_t, "Lambda_t"},
    {ConstantKind::Delta_b, "Delta_b"}, {ConstantKind::Delta_sb, "Delta_sb"},
};

double mag(double c) { return std::abs(c); }
int sgn(double c) { return (c > 0.0) - (c < 0.0); }

// space selects the measuring norm; null means the model's own.  The
// matrix variant owns its norm, so a space there is a caller error.
double measure_in(const BasisModel& model, const SpacePtr& space,
                  const SpVec& ambient) {
  if (space) {
    if (model.is_matrix())
      throw std::invalid_argument("matrix models measure in their own norm");
    return norm(*space, ambient);
  }
  return model.norm(ambient);
}

const SpaceSpec* resolve_spec(const BasisModel& model, const SpacePtr& space) {
  if (space) return space.get();
  if (!model.is_matrix()) return model.space().get();
  return nullptr;
}

// Ratio accumulator; keeps the witness pair realizing the maximum.
struct Best {
  double value = -kInf;
  SpVec lhs, rhs;
  double scale = 1.0;

  void offer(double v, const SpVec& l, const SpVec& r, double s = 1.0) {
    if (!(v > value)) return;
    value = v;
    lhs = l;
    rhs = r;
    scale = s;
  }
};

struct Ctx {
  const BasisModel& model;
  const SpacePtr& space;
  const TestFamily& fam;
  index_t d = 0;
  bool exhaustive_sets = false;
  std::vector<std::vector<index_t>> sets{};  // nonempty candidates
  std::vector<std::vector<std::vector<index_t>>> by_size{};  // [k], k = 0..d
  std::vector<SpVec> vectors{};  // coefficient-space candidates

  double N(const SpVec& ambient) const {
    return measure_in(model, space, ambient);
  }

  SpVec synth(const SpVec& coords) const { return model.synthesize(coords); }

  const SpaceSpec* spec() const { return resolve_spec(model, space); }

  bool lattice_norm() const {
    const SpaceSpec* s = spec();
    return s != nullptr && s->lattice_unconditional && !model.is_matrix();
  }

  int scap(int c) const { return std::min(c, fam.sign_cap); }
};

void dedupe(std::vector<std::vector<index_t>>& sets) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
}

// Strides aligned to the space structure expose single-part sets of
// interleaved sums and block-skipping sets of mixed spaces.
std::vector<index_t> structure_strides(const SpaceSpec* spec) {
  std::vector<index_t> st{2, 3};
  if (spec && spec->kind == SpaceSpec::Kind::Dsum)
    st.push_back(index_t(spec->parts.size()));
  if (spec && spec->kind == SpaceSpec::Kind::Mixed && !spec->blocks.empty())
    st.push_back(spec->blocks.front() + 1);
  std::sort(st.begin(), st.end());
  st.erase(std::unique(st.begin(), st.end()), st.end());
  return st;
}

void build_sets(Ctx& ctx, Rng& rng) {
  const index_t d = ctx.d;
  ctx.by_size.assign(std::size_t(d) + 1, {});
  ctx.by_size[0].push_back({});
  if (d <= 8) {
    ctx.exhaustive_sets = true;
    for (std::size_t mask = 1; mask < (std::size_t(1) << d); ++mask) {
      std::vector<index_t> A;
      for (index_t i = 0; i < d; ++i)
        if (mask & (std::size_t(1) << i)) A.push_back(i + 1);
      ctx.by_size[A.size()].push_back(A);
      ctx.sets.push_back(std::move(A));
    }
    return;
  }
  const auto strides = structure_strides(ctx.spec());
  for (index_t k = 1; k <= d; ++k) {
    auto& pool = ctx.by_size[std::size_t(k)];
    std::vector<index_t> A;
    for (index_t i = 1; i <= k; ++i) A.push_back(i);
    pool.push_back(A);
    A.clear();
    for (index_t i = d - k + 1; i <= d; ++i) A.push_back(i);
    pool.push_back(A);
    for (index_t start = 2; start + k - 1 <= d;
         start += std::max<index_t>(1, (d - k) / 3)) {
      A.clear();
      for (index_t i = start; i < start + k; ++i) A.push_back(i);
      pool.push_back(A);
    }
    for (index_t st : strides)
      for (index_t off = 1; off <= st && off + st * (k - 1) <= d; ++off) {
        A.clear();
        for (index_t i = 0; i < k; ++i) A.push_back(off + st * i);
        pool.push_back(A);
      }
    for (int rep = 0; rep < 12; ++rep) {
      std::vector<index_t> all(static_cast<std::size_t>(d));
      for (index_t i = 0; i < d; ++i) all[std::size_t(i)] = i + 1;
      for (index_t i = 0; i < k; ++i) {
        const std::size_t j =
            std::size_t(i) + std::size_t(rng.below(std::uint64_t(d - i)));
        std::swap(all[std::size_t(i)], all[j]);
      }
      A.assign(all.begin(), all.begin() + k);
      std::sort(A.begin(), A.end());
      pool.push_back(A);
    }
    dedupe(pool);
    for (const auto& s : pool) ctx.sets.push_back(s);
  }
}

void build_vectors(Ctx& ctx, Rng& rng) {
  const index_t d = ctx.d;
  auto push_profile = [&](auto&& coef, index_t stride) {
    for (int signs = 0; signs < 2; ++signs) {
      SpVec f;
      index_t idx = 1;
      for (index_t j = 1; idx <= d; ++j, idx += stride)
        f.set(idx, (signs && (j % 2 == 0) ? -1.0 : 1.0) * coef(j));
      ctx.vectors.push_back(std::move(f));
    }
  };
  for (index_t stride : {index_t(1), index_t(2)}) {
    push_profile([](index_t j) { return std::pow(2.0, -double(j)); }, stride);
    push_profile([](index_t j) { return std::pow(0.9, double(j)); }, stride);
    push_profile([](index_t j) { return 1.0 / double(j); }, stride);
    push_profile([](index_t j) { return 1.0 / std::sqrt(double(j)); }, stride);
    push_profile([](index_t) { return 1.0; }, stride);
  }
  // Plateau profiles keep exact ties so greedy-set enumeration branches.
  {
    SpVec f;
    for (index_t i = 1; i <= d; ++i) f.set(i, i <= (d + 1) / 2 ? 1.0 : 0.5);
    ctx.vectors.push_back(f);
    SpVec g;
    for (index_t i = 1; i <= d; ++i)
      g.set(i, i <= d / 3 ? 2.0 : (i <= 2 * d / 3 ? 1.0 : 0.25));
    ctx.vectors.push_back(g);
  }
  for (int rep = 0; rep < ctx.fam.random_draws; ++rep) {
    SpVec f;
    const index_t k = 1 + index_t(rng.below(std::uint64_t(d)));
    double last = 1.0;
    for (index_t j = 0; j < k; ++j) {
      double c = rng.sym() * std::pow(10.0, 2.0 * rng.unit() - 1.0);
      if (rng.below(3) == 0) c = rng.sign() * last;
      if (c != 0.0) last = mag(c);
      f.set(1 + index_t(rng.below(std::uint64_t(d))), c);
    }
    if (!f.empty()) ctx.vectors.push_back(std::move(f));
  }
}

Ctx build_ctx(const BasisModel& model, const SpacePtr& space,
              const TestFamily& fam) {
  Ctx ctx{model, space, fam};
  if (fam.dimension < 1 || fam.dimension > 60)
    throw std::invalid_argument("family dimension must lie in [1, 60]");
  ctx.d = fam.dimension;
  if (model.is_matrix()) ctx.d = std::min(ctx.d, model.dimension());
  Rng rs(sub_seed(fam.seed, "pool-sets"));
  build_sets(ctx, rs);
  Rng rv(sub_seed(fam.seed, "pool-vectors"));
  build_vectors(ctx, rv);
  return ctx;
}

SignPattern make_pattern(const std::vector<index_t>& A,
                         const std::vector<int>& signs) {
  std::vector<std::pair<index_t, int>> ps;
  ps.reserve(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) ps.emplace_back(A[i], signs[i]);
  return SignPattern::from_pairs(std::move(ps));
}

// Sign quantifier: exhaustive up to 2^exh_cap signs, otherwise all-plus,
// two alternations, half-split, and seeded random patterns.
template <typename Fn>
void for_signs(const std::vector<index_t>& A, int exh_cap, int draws, Rng& rng,
               Fn&& fn) {
  const std::size_t k = A.size();
  if (k == 0) {
    fn(std::vector<int>{});
    return;
  }
  if (k <= std::size_t(exh_cap)) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
      std::vector<int> s(k);
      for (std::size_t i = 0; i < k; ++i)
        s[i] = (mask & (std::size_t(1) << i)) ? -1 : 1;
      fn(s);
    }
    return;
  }
  std::vector<int> s(k, 1);
  fn(s);
  for (std::size_t i = 0; i < k; ++i) s[i] = (i % 2) ? -1 : 1;
  fn(s);
  for (std::size_t i = 0; i < k; ++i) s[i] = (A[i] % 2) ? 1 : -1;
  fn(s);
  for (std::size_t i = 0; i < k; ++i) s[i] = (i < k / 2) ? 1 : -1;
  fn(s);
  for (int rep = 0; rep < draws; ++rep) {
    for (std::size_t i = 0; i < k; ++i) s[i] = rng.sign();
    fn(s);
  }
}

// Subsets of a support list: everything when small, otherwise prefixes,
// suffixes and seeded draws.
std::vector<std::vector<index_t>> support_subsets(
    const std::vector<index_t>& supp, Rng& rng, int draws) {
  const std::size_t k = supp.size();
  std::vector<std::vector<index_t>> out;
  if (k <= 10) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
      std::vector<index_t> A;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t(1) << i)) A.push_back(supp[i]);
      out.push_back(std::move(A));
    }
    return out;
  }
  out.push_back({});
  for (std::size_t j = 1; j <= k; ++j) {
    out.emplace_back(supp.begin(), supp.begin() + j);
    out.emplace_back(supp.end() - j, supp.end());
  }
  for (int rep = 0; rep < draws; ++rep) {
    std::vector<index_t> A;
    for (index_t n : supp)
      if (rng.below(2)) A.push_back(n);
    out.push_back(std::move(A));
  }
  dedupe(out);
  return out;
}

bool disjoint_sets(const std::vector<index_t>& A,
                   const std::vector<index_t>& B) {
  auto a = A.begin();
  for (index_t n : B) {
    while (a != A.end() && *a < n) ++a;
    if (a != A.end() && *a == n) return false;
  }
  return true;
}

// Greedy sets of the coordinate vector c, one chain fallback per level
// when a tie boundary blows the enumeration cap.
std::vector<std::vector<index_t>> greedy_sets_capped(const SpVec& c,
                                                     std::size_t cap) {
  std::vector<index_t> order = c.support();
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = mag(c.coef(a)), mb = mag(c.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::vector<std::vector<index_t>> out;
  for (std::size_t m = 0; m <= order.size() && out.size() < cap; ++m) {
    std::vector<std::vector<index_t>> level;
    try {
      level = enumerate_greedy_sets(c, index_t(m));
    } catch (const std::runtime_error&) {
      std::vector<index_t> A(order.begin(), order.begin() + m);
      std::sort(A.begin(), A.end());
      level.push_back(std::move(A));
    }
    for (auto& A : level) {
      out.push_back(std::move(A));
      if (out.size() >= cap) break;
    }
  }
  return out;
}

// U and T built straight from coordinates; A must already be greedy.
SpVec trunc_u_coords(const SpVec& c, const std::vector<index_t>& A) {
  if (A.empty()) return SpVec{};
  double t = kInf;
  for (index_t n : A) t = std::min(t, mag(c.coef(n)));
  SpVec u;
  for (index_t n : A) {
    const double s = t * sgn(c.coef(n));
    if (s != 0.0) u.entries.emplace_back(n, s);
  }
  return u;
}

SpVec trunc_t_coords(const SpVec& c, const std::vector<index_t>& A) {
  if (A.empty()) return c;
  SpVec t = trunc_u_coords(c, A);
  auto it = A.begin();
  for (const auto& [n, v] : c.entries) {
    while (it != A.end() && *it < n) ++it;
    if (it != A.end() && *it == n) continue;
    t.set(n, v);
  }
  return t;
}

void search_K_su(Ctx& ctx, Rng& rng, Best& best) {
  for (const SpVec& c : ctx.vectors) {
    const SpVec fa = ctx.synth(c);
    const double nf = ctx.N(fa);
    if (!(nf > 0.0)) continue;
    for (const auto& A : support_subsets(c.support(), rng, 48)) {
      const SpVec sa = ctx.synth(restrict_to(c, A));
      best.offer(ctx.N(sa) / nf, sa, fa);
    }
  }
}

void search_K_u(Ctx& ctx, Rng& rng, Best& best) {
  for (const SpVec& c : ctx.vectors) {
    const SpVec fa = ctx.synth(c);
    const double nf = ctx.N(fa);
    if (!(nf > 0.0)) continue;
    const std::size_t k = c.support_size();
    auto offer_gamma = [&](const std::vector<double>& g) {
      SpVec mc;
      for (std::size_t i = 0; i < k; ++i) {
        const double v = c.entries[i].second * g[i];
        if (v != 0.0) mc.entries.emplace_back(c.entries[i].first, v);
      }
      const SpVec ma = ctx.synth(mc);
      best.offer(ctx.N(ma) / nf, ma, fa);
    };
    std::vector<double> g(k, 1.0);
    offer_gamma(g);
    for (std::size_t i = 0; i < k; ++i) g[i] = (i % 2) ? -1.0 : 1.0;
    offer_gamma(g);
    for (int rep = 0; rep < 8; ++rep) {
      for (auto& v : g) v = double(rng.sign());
      offer_gamma(g);
    }
    for (int rep = 0; rep < 12; ++rep) {
      for (auto& v : g) v = rng.sym();
      offer_gamma(g);
    }
    if (ctx.fam.levels.empty()) continue;
    const double top =
        *std::max_element(ctx.fam.levels.begin(), ctx.fam.levels.end());
    for (int rep = 0; rep < 8; ++rep) {
      for (auto& v : g) {
        const double level =
            ctx.fam.levels[rng.below(ctx.fam.levels.size())] / top;
        v = double(rng.sign()) * level;
      }
      offer_gamma(g);
    }
  }
}

void search_K_sc(Ctx& ctx, Rng& rng, Best& best) {
  for (const auto& A : ctx.sets) {
    const auto subs = support_subsets(A, rng, 16);
    for_signs(A, ctx.scap(5), 8, rng, [&](const std::vector<int>& s) {
      const SignPattern eps = make_pattern(A, s);
      const SpVec ia = ctx.synth(signed_indicator(A, eps));
      const double na = ctx.N(ia);
      if (!(na > 0.0)) return;
      for (const auto& B : subs) {
        if (B.empty()) continue;
        const SpVec ib = ctx.synth(signed_indicator(B, eps));
        best.offer(ctx.N(ib) / na, ib, ia);
      }
    });
  }
}

void search_K_lc(Ctx& ctx, Rng& rng, Best& best) {
  for (const auto& A : ctx.sets) {
    for_signs(A, ctx.scap(5), 6, rng, [&](const std::vector<int>& s) {
      const SignPattern eps = make_pattern(A, s);
      const SpVec ia = ctx.synth(signed_indicator(A, eps));
      const double na = ctx.N(ia);
      if (!(na > 0.0)) return;
      auto offer_coeffs = [&](const std::vector<double>& a) {
        SpVec g;
        for (std::size_t i = 0; i < A.size(); ++i)
          g.entries.emplace_back(A[i], double(s[i]) * a[i]);
        const SpVec ga = ctx.synth(g);
        best.offer(na / ctx.N(ga), ia, ga);
      };
      std::vector<double> a(A.size(), 1.0);
      offer_coeffs(a);
      if (!ctx.fam.levels.empty())
        for (int rep = 0; rep < 8; ++rep) {
          for (auto& v : a)
            v = std::max(1.0, ctx.fam.levels[rng.below(ctx.fam.levels.size())]);
          offer_coeffs(a);
        }
      for (int rep = 0; rep < 6; ++rep) {
        for (auto& v : a) v = 1.0 + 3.0 * rng.unit();
        offer_coeffs(a);
      }
      // One large coefficient, the rest at threshold.
      std::fill(a.begin(), a.end(), 1.0);
      a[rng.below(a.size())] = 4.0;
      offer_coeffs(a);
    });
  }
}

void search_K_pu(Ctx& ctx, Rng& rng, Best& best) {
  for (const auto& A : ctx.sets) {
    const std::size_t k = A.size();
    auto eval_pair = [&](const std::vector<double>& a,
                         const std::vector<double>& b) {
      SpVec ga, gb;
      for (std::size_t i = 0; i < k; ++i) {
        if (a[i] != 0.0) ga.entries.emplace_back(A[i], a[i]);
        gb.entries.emplace_back(A[i], b[i]);
      }
      const SpVec xa = ctx.synth(ga), xb = ctx.synth(gb);
      const double nb = ctx.N(xb);
      if (nb > 0.0) best.offer(ctx.N(xa) / nb, xa, xb);
    };
    std::vector<double> a(k), b(k);
    for_signs(A, ctx.scap(4), 4, rng, [&](const std::vector<int>& se) {
      for_signs(A, 0, 4, rng, [&](const std::vector<int>& sd) {
        // max |a| <= 1 <= min |b| by construction.
        for (int rep = 0; rep < 4; ++rep) {
          for (std::size_t i = 0; i < k; ++i) {
            double am = rep == 0 ? 1.0 : rng.unit();
            if (rep >= 2 && rng.below(3) == 0) am = 0.0;
            a[i] = double(se[i]) * am;
            b[i] = double(sd[i]) * (rep <= 1 ? 1.0 : 1.0 + 3.0 * rng.unit());
          }
          eval_pair(a, b);
        }
      });
    });
  }
}

void search_C_qg(Ctx& ctx, Rng&, Best& best) {
  for (const SpVec& c : ctx.vectors) {
    const SpVec fa = ctx.synth(c);
    const double nf = ctx.N(fa);
    if (!(nf > 0.0)) continue;
    const auto sets = greedy_sets_capped(c, 192);
    std::size_t pairs = 0;
    auto scan = [&] {
      for (const auto& A : sets) {
        for (const auto& B : sets) {
          if (B.size() >= A.size()) continue;
          if (!std::includes(A.begin(), A.end(), B.begin(), B.end())) continue;
          if (++pairs > 4096) return;
          std::vector<index_t> diff;
          std::set_difference(A.begin(), A.end(), B.begin(), B.end(),
                              std::back_inserter(diff));
          const SpVec sd = ctx.synth(restrict_to(c, diff));
          best.offer(ctx.N(sd) / nf, sd, fa);
        }
      }
    };
    scan();
  }
}

void search_C_ql(Ctx& ctx, Rng& rng, Best& best) {
  for (const auto& A : ctx.sets) {
    // Carrier candidates live on indices disjoint from A, coordinates
    // bounded by one.  Small sets from the front of the pool, a few
    // large ones from the back.
    std::vector<SpVec> carriers{SpVec{}};
    auto add_carriers = [&](const std::vector<index_t>& D) {
      carriers.push_back(indicator(D));
      SpVec alt;
      for (std::size_t i = 0; i < D.size(); ++i)
        alt.set(D[i], (i % 2) ? -1.0 : 1.0);
      carriers.push_back(std::move(alt));
      SpVec rnd;
      for (index_t n : D) rnd.set(n, rng.sym());
      if (!rnd.empty()) carriers.push_back(std::move(rnd));
    };
    int picked = 0;
    for (const auto& D : ctx.sets) {
      if (!disjoint_sets(A, D)) continue;
      add_carriers(D);
      if (++picked >= 6) break;
    }
    picked = 0;
    for (auto it = ctx.sets.rbegin(); it != ctx.sets.rend(); ++it) {
      if (!disjoint_sets(A, *it)) continue;
      add_carriers(*it);
      if (++picked >= 3) break;
    }
    for_signs(A, ctx.scap(4), 6, rng, [&](const std::vector<int>& s) {
      const SpVec one_c = signed_indicator(A, make_pattern(A, s));
      const SpVec one = ctx.synth(one_c);
      const double n1 = ctx.N(one);
      for (const SpVec& f : carriers) {
        const SpVec fa = ctx.synth(f);
        const double nf = f.empty() ? 0.0 : ctx.N(fa);
        const SpVec sum = ctx.synth(add(f, one_c));
        const double ns = ctx.N(sum);
        if (!(ns > 0.0)) continue;
        best.offer(std::max(nf, n1) / ns, nf > n1 ? fa : one, sum);
      }
    });
  }
}

// sigma_tilde per cardinality, cached across greedy sets of one vector.
class TildeCache {
 public:
  TildeCache(const BasisModel& model, const SpacePtr& space, const SpVec& f)
      : model_(model), space_(space), f_(f) {}

  const MTermError& at(index_t m) {
    auto it = cache_.find(m);
    if (it == cache_.end())
      it = cache_
               .emplace(m, sigma_tilde(model_, space_, f_, m, SigmaMode::Exact))
               .first;
    return it->second;
  }

 private:
  const BasisModel& model_;
  const SpacePtr& space_;
  const SpVec& f_;
  std::map<index_t, MTermError> cache_;
};

void search_C_ag(Ctx& ctx, Rng&, Best& best) {
  int used = 0;
  for (const SpVec& c : ctx.vectors) {
    if (c.support_size() > 12) continue;
    if (++used > 80) break;
    const SpVec fa = ctx.synth(c);
    TildeCache tilde(ctx.model, ctx.space, fa);
    for (const auto& A : greedy_sets_capped(c, 64)) {
      const SpVec rem = add_scaled(fa, -1.0, ctx.synth(restrict_to(c, A)));
      const auto& st = tilde.at(index_t(A.size()));
      if (!(st.value > 0.0)) continue;
      best.offer(ctx.N(rem) / st.value, rem,
                 add_scaled(fa, -1.0, ctx.synth(st.approx)));
    }
  }
}

void search_C_g(Ctx& ctx, Rng&, Best& best, std::string& note) {
  const bool cheap = ctx.lattice_norm();
  const std::size_t supp_cap = cheap ? 12 : 6;
  const int vec_cap = cheap ? 80 : 16;
  const index_t m_cap = cheap ? std::numeric_limits<index_t>::max() : 3;
  if (!cheap)
    note = "sigma refined, values are upper bounds; ratio stays a lower bound";
  int used = 0;
  for (const SpVec& c : ctx.vectors) {
    if (c.support_size() > supp_cap) continue;
    if (++used > vec_cap) break;
    const SpVec fa = ctx.synth(c);
    std::map<index_t, MTermError> cache;
    for (const auto& A : greedy_sets_capped(c, 48)) {
      const index_t m = index_t(A.size());
      if (m > m_cap) continue;
      auto it = cache.find(m);
      if (it == cache.end())
        it = cache
                 .emplace(m, sigma(ctx.model, ctx.space, fa, m, SigmaMode::Exact))
                 .first;
      const auto& sm = it->second;
      if (!(sm.value > 0.0)) continue;
      const SpVec rem = add_scaled(fa, -1.0, ctx.synth(restrict_to(c, A)));
      best.offer(ctx.N(rem) / sm.value, rem,
                 add_scaled(fa, -1.0, ctx.synth(sm.approx)));
    }
  }
}

void search_democracy(Ctx& ctx, Rng& rng, bool with_signs, bool disjoint,
                      Best& best) {
  for (index_t ka = 1; ka <= ctx.d; ++ka) {
    for (index_t kb = ka; kb <= ctx.d; ++kb) {
      for (const auto& A : ctx.by_size[std::size_t(ka)]) {
        for (const auto& B : ctx.by_size[std::size_t(kb)]) {
          if (disjoint && !disjoint_sets(A, B)) continue;
          if (!with_signs) {
            const SpVec ia = ctx.synth(indicator(A));
            const SpVec ib = ctx.synth(indicator(B));
            const double nb = ctx.N(ib);
            if (nb > 0.0) best.offer(ctx.N(ia) / nb, ia, ib);
            continue;
          }
          auto offer_signed = [&](const std::vector<int>& sa,
                                  const std::vector<int>& sb) {
            const SpVec ia =
                ctx.synth(signed_indicator(A, make_pattern(A, sa)));
            const SpVec ib =
                ctx.synth(signed_indicator(B, make_pattern(B, sb)));
            const double nb = ctx.N(ib);
            if (nb > 0.0) best.offer(ctx.N(ia) / nb, ia, ib);
          };
          std::vector<int> sa(A.size(), 1), sb(B.size(), 1);
          offer_signed(sa, sb);
          for (std::size_t i = 0; i < sa.size(); ++i) sa[i] = (i % 2) ? -1 : 1;
          offer_signed(sa, sb);
          for (std::size_t i = 0; i < sb.size(); ++i) sb[i] = (i % 2) ? -1 : 1;
          offer_signed(sa, sb);
          std::fill(sa.begin(), sa.end(), 1);
          offer_signed(sa, sb);
          for (int rep = 0; rep < 8; ++rep) {
            for (auto& v : sa) v = rng.sign();
            for (auto& v : sb) v = rng.sign();
            offer_signed(sa, sb);
          }
        }
      }
    }
  }
}

void search_Gamma(Ctx& ctx, Rng& rng, Best& best) {
  // Reduced per-size pools keep the four-way product tractable.
  std::vector<std::vector<std::vector<index_t>>> pool(std::size_t(ctx.d) + 1);
  for (index_t k = 1; k <= ctx.d; ++k) {
    const auto& all = ctx.by_size[std::size_t(k)];
    for (std::size_t i = 0; i < all.size() && i < 6; ++i)
      pool[std::size_t(k)].push_back(all[i]);
  }
  for (index_t ka = 1; ka <= ctx.d; ++ka)
    for (index_t kb = ka; kb <= ctx.d; ++kb)
      for (const auto& A : pool[std::size_t(ka)])
        for (const auto& B : pool[std::size_t(kb)]) {
          if (!disjoint_sets(A, B)) continue;
          std::vector<index_t> ab = A;
          ab.insert(ab.end(), B.begin(), B.end());
          std::sort(ab.begin(), ab.end());
          std::vector<SpVec> carriers{SpVec{}};
          int picked = 0;
          for (const auto& D : ctx.sets) {
            if (!disjoint_sets(ab, D)) continue;
            carriers.push_back(indicator(D));
            SpVec rnd;
            for (index_t n : D) rnd.set(n, rng.sym());
            if (!rnd.empty()) carriers.push_back(std::move(rnd));
            if (++picked >= 4) break;
          }
          auto offer_one = [&](const SpVec& f, const std::vector<int>& sa,
                               const std::vector<int>& sb) {
            const SpVec lhs =
                ctx.synth(add(f, signed_indicator(A, make_pattern(A, sa))));
            const SpVec rhs =
                ctx.synth(add(f, signed_indicator(B, make_pattern(B, sb))));
            const double nr = ctx.N(rhs);
            if (nr > 0.0) best.offer(ctx.N(lhs) / nr, lhs, rhs);
          };
          for (const SpVec& f : carriers) {
            std::vector<int> sa(A.size(), 1), sb(B.size(), 1);
            offer_one(f, sa, sb);
            for (std::size_t i = 0; i < sa.size(); ++i)
              sa[i] = (i % 2) ? -1 : 1;
            offer_one(f, sa, sb);
            for (std::size_t i = 0; i < sb.size(); ++i)
              sb[i] = (i % 2) ? -1 : 1;
            offer_one(f, sa, sb);
            for (int rep = 0; rep < 6; ++rep) {
              for (auto& v : sa) v = rng.sign();
              for (auto& v : sb) v = rng.sign();
              offer_one(f, sa, sb);
            }
          }
        }
}

void search_Lambda(Ctx& ctx, Rng&, bool truncated, Best& best) {
  for (const SpVec& c : ctx.vectors) {
    const SpVec fa = ctx.synth(c);
    const double nf = ctx.N(fa);
    if (!(nf > 0.0)) continue;
    for (const auto& A : greedy_sets_capped(c, 256)) {
      const SpVec tc = truncated ? trunc_t_coords(c, A) : trunc_u_coords(c, A);
      const SpVec ta = ctx.synth(tc);
      best.offer(ctx.N(ta) / nf, ta, fa);
    }
  }
}

bool inverse_weight_regular(const WeightSpec& w) {
  const index_t N = 4096;
  double acc = 0.0, sup_half = 0.0, sup_full = 0.0;
  for (index_t n = 1; n <= N; ++n) {
    acc += 1.0 / w.s(n);
    const double v = w.s(n) / double(n) * acc;
    sup_full = std::max(sup_full, v);
    if (n == N / 2) sup_half = sup_full;
  }
  return (sup_full - sup_half) <= 0.05 * sup_half;
}

// Fundamental function of the Banach envelope, closed forms only.  The
// dual of a quasi-Banach space is isometrically the dual of its envelope,
// so this is the factor the dual table pairs with.
std::optional<double> envelope_fundamental(const SpaceSpec& X, index_t m) {
  switch (X.kind) {
    case SpaceSpec::Kind::Lp:
      if (std::isinf(X.p)) return std::nullopt;
      if (X.p < 1.0) return double(m);
      return std::pow(double(m), 1.0 / X.p);
    case SpaceSpec::Kind::C0:
      return 1.0;
    case SpaceSpec::Kind::Lorentz:
      if (X.p != 1.0) return std::nullopt;
      return X.weight.s(m);
    default:
      return std::nullopt;
  }
}

// The bidemocracy product has no searchable form: the dual norm is out of
// reach, so both factors come from the closed-form tables and the product
// is maximized over the cardinality only.  Sign patterns change neither
// factor on the supported (symmetric) spaces, so the signed variant
// coincides with the plain one.
void search_Delta_b(Ctx& ctx, Best& best, std::string& note) {
  const SpaceSpec* spec = ctx.spec();
  if (spec == nullptr || !dual_fundamental(*spec, 1).has_value() ||
      !envelope_fundamental(*spec, 1).has_value())
    throw std::invalid_argument(
        "bidemocracy needs a dual fundamental table entry for the space");
  note = "closed-form pairing: envelope fundamental times dual fundamental";
  for (index_t m = 1; m <= ctx.d; ++m) {
    const double v =
        *envelope_fundamental(*spec, m) * *dual_fundamental(*spec, m) / double(m);
    if (v > best.value) {
      std::vector<index_t> A(static_cast<std::size_t>(m));
      for (index_t i = 0; i < m; ++i) A[std::size_t(i)] = i + 1;
      const SpVec ia = ctx.synth(indicator(A));
      best.offer(v, ia, ia, v);
    }
  }
}

void seed_trivial(ConstantKind kind, Ctx& ctx, Best& best) {
  const SpVec e1 = ctx.synth(indicator({1}));
  const double n1 = ctx.N(e1);
  switch (kind) {
    case ConstantKind::Delta_d:
    case ConstantKind::Delta_sd:
    case ConstantKind::Gamma: {
      if (ctx.d < 2) break;
      const SpVec e2 = ctx.synth(indicator({2}));
      const double n2 = ctx.N(e2);
      if (n2 > 0.0) best.offer(n1 / n2, e1, e2);
      if (n1 > 0.0) best.offer(n2 / n1, e2, e1);
      break;
    }
    case ConstantKind::Delta_b:
    case ConstantKind::Delta_sb:
      // the m = 1 table row is the trivial witness
      break;
    default:
      best.offer(1.0, e1, e1);
      break;
  }
}

std::string budget_string(const Ctx& ctx) {
  std::ostringstream os;
  os << "d=" << ctx.d
     << ";sets=" << (ctx.exhaustive_sets ? "exhaustive" : "structured") << "("
     << ctx.sets.size() << ");vecs=" << ctx.vectors.size()
     << ";draws=" << ctx.fam.random_draws << ";seed=" << ctx.fam.seed;
  return os.str();
}

}  // namespace

const char* constant_kind_name(ConstantKind kind) {
  for (const auto& row : kKinds)
    if (row.kind == kind) return row.name;
  throw std::logic_error("unknown constant kind");
}

ConstantKind parse_constant_kind(const std::string& name) {
  for (const auto& row : kKinds)
    if (name == row.name) return row.kind;
  throw std::invalid_argument("unknown constant kind: " + name);
}

const std::vector<ConstantKind>& all_constant_kinds() {
  static const std::vector<ConstantKind> kinds = [] {
    std::vector<ConstantKind> v;
    for (const auto& row : kKinds) v.push_back(row.kind);
    return v;
  }();
  return kinds;
}

ConstantEstimate estimate_constant(ConstantKind kind, const BasisModel& model,
                                   const SpacePtr& space,
                                   const TestFamily& family) {
  Ctx ctx = build_ctx(model, space, family);
  Rng rng(sub_seed(family.seed, constant_kind_name(kind)));
  Best best;
  std::string note;
  seed_trivial(kind, ctx, best);
  switch (kind) {
    case ConstantKind::K_su: search_K_su(ctx, rng, best); break;
    case ConstantKind::K_u: search_K_u(ctx, rng, best); break;
    case ConstantKind::K_sc: search_K_sc(ctx, rng, best); break;
    case ConstantKind::K_lc: search_K_lc(ctx, rng, best); break;
    case ConstantKind::K_pu: search_K_pu(ctx, rng, best); break;
    case ConstantKind::C_qg: search_C_qg(ctx, rng, best); break;
    case ConstantKind::C_ql: search_C_ql(ctx, rng, best); break;
    case ConstantKind::C_ag: search_C_ag(ctx, rng, best); break;
    case ConstantKind::C_g: search_C_g(ctx, rng, best, note); break;
    case ConstantKind::Delta:
      search_democracy(ctx, rng, false, false, best);
      break;
    case ConstantKind::Delta_d:
      search_democracy(ctx, rng, false, true, best);
      break;
    case ConstantKind::Delta_s:
      search_democracy(ctx, rng, true, false, best);
      break;
    case ConstantKind::Delta_sd:
      search_democracy(ctx, rng, true, true, best);
      break;
    case ConstantKind::Gamma: search_Gamma(ctx, rng, best); break;
    case ConstantKind::Lambda_u: search_Lambda(ctx, rng, false, best); break;
    case ConstantKind::Lambda_t: search_Lambda(ctx, rng, true, best); break;
    case ConstantKind::Delta_b: search_Delta_b(ctx, best, note); break;
    case ConstantKind::Delta_sb: search_Delta_b(ctx, best, note); break;
  }
  if (!std::isfinite(best.value))
    throw std::runtime_error("family too small for the kind");
  ConstantEstimate est;
  est.kind = kind;
  est.value = best.value;
  est.witness_lhs = best.lhs;
  est.witness_rhs = best.rhs;
  est.rhs_scale = best.scale;
  est.budget = budget_string(ctx);
  est.note = note;
  return est;
}

double recheck_estimate(const ConstantEstimate& est, const BasisModel& model,
                        const SpacePtr& space) {
  const double den =
      est.witness_rhs.empty() ? 1.0 : measure_in(model, space, est.witness_rhs);
  return est.rhs_scale * measure_in(model, space, est.witness_lhs) / den;
}

std::optional<double> dual_fundamental(const SpaceSpec& X, index_t m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  switch (X.kind) {
    case SpaceSpec::Kind::Lp:
      if (std::isinf(X.p)) return std::nullopt;
      if (X.p >= 1.0) return std::pow(double(m), 1.0 - 1.0 / X.p);
      return 1.0;
    case SpaceSpec::Kind::C0:
      return double(m);
    case SpaceSpec::Kind::Lorentz: {
      if (X.p != 1.0) return std::nullopt;
      static thread_local std::map<std::string, bool> verdicts;
      auto it = verdicts.find(X.weight.label());
      if (it == verdicts.end())
        it = verdicts
                 .emplace(X.weight.label(), inverse_weight_regular(X.weight))
                 .first;
      if (!it->second) return std::nullopt;
      return double(m) / X.weight.s(m);
    }
    default:
      return std::nullopt;
  }
}

DemocracyFunctions democracy_functions(const BasisModel& model,
                                       const SpacePtr& space, index_t m_max,
                                       SigmaMode mode) {
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  if (m_max > 4096)
    throw std::invalid_argument("m_max beyond the horizon budget");
  const SpaceSpec* spec = resolve_spec(model, space);
  auto N = [&](const SpVec& coords) {
    return measure_in(model, space, model.synthesize(coords));
  };
  DemocracyFunctions out;
  if (spec != nullptr && spec->symmetric && !model.is_matrix()) {
    out.exact = true;
    std::vector<index_t> A;
    for (index_t m = 1; m <= m_max; ++m) {
      A.push_back(m);
      const double v = N(indicator(A));
      out.phi_u.push_back(v);
      out.phi_l.push_back(v);
      out.phi_eps_u.push_back(v);
      out.phi_eps_l.push_back(v);
    }
    return out;
  }
  index_t horizon = 2 * m_max;
  if (model.is_matrix()) horizon = std::min(horizon, model.dimension());
  if (m_max > horizon)
    throw std::invalid_argument("m_max exceeds the model dimension");
  const bool exhaustive = mode == SigmaMode::Exact && horizon <= 16;
  Rng rng(sub_seed(0, "democracy-functions"));
  std::vector<std::vector<std::vector<index_t>>> pool(std::size_t(horizon) + 1);
  if (exhaustive) {
    for (std::size_t mask = 1; mask < (std::size_t(1) << horizon); ++mask) {
      std::vector<index_t> A;
      for (index_t i = 0; i < horizon; ++i)
        if (mask & (std::size_t(1) << i)) A.push_back(i + 1);
      pool[A.size()].push_back(std::move(A));
    }
  } else {
    const int draws = horizon > 64 ? 4 : 12;
    for (index_t k = 1; k <= horizon; ++k) {
      auto& sets = pool[std::size_t(k)];
      std::vector<index_t> A;
      for (index_t i = 1; i <= k; ++i) A.push_back(i);
      sets.push_back(A);
      A.clear();
      for (index_t i = horizon - k + 1; i <= horizon; ++i) A.push_back(i);
      sets.push_back(A);
      const index_t mid = (horizon - k) / 2 + 1;
      A.clear();
      for (index_t i = mid; i < mid + k; ++i) A.push_back(i);
      sets.push_back(A);
      // Parity combs matter: difference-type norms see them as extremes.
      for (index_t off : {index_t(1), index_t(2)})
        if (off + 2 * (k - 1) <= horizon) {
          A.clear();
          for (index_t i = 0; i < k; ++i) A.push_back(off + 2 * i);
          sets.push_back(A);
        }
      if (1 + 3 * (k - 1) <= horizon) {
        A.clear();
        for (index_t i = 0; i < k; ++i) A.push_back(1 + 3 * i);
        sets.push_back(A);
      }
      for (int rep = 0; rep < draws; ++rep) {
        std::vector<index_t> all(static_cast<std::size_t>(horizon));
        for (index_t i = 0; i < horizon; ++i) all[std::size_t(i)] = i + 1;
        for (index_t i = 0; i < k; ++i) {
          const std::size_t j =
              std::size_t(i) + std::size_t(rng.below(std::uint64_t(horizon - i)));
          std::swap(all[std::size_t(i)], all[j]);
        }
        A.assign(all.begin(), all.begin() + k);
        std::sort(A.begin(), A.end());
        sets.push_back(A);
      }
      dedupe(sets);
    }
  }
  std::vector<double> up(std::size_t(horizon) + 1, -kInf);
  std::vector<double> lo(std::size_t(horizon) + 1, kInf);
  std::vector<double> up_eps(std::size_t(horizon) + 1, -kInf);
  std::vector<double> lo_eps(std::size_t(horizon) + 1, kInf);
  const int sign_cap = 6;
  const int sign_draws = horizon > 64 ? 4 : 8;
  for (index_t k = 1; k <= horizon; ++k) {
    for (const auto& A : pool[std::size_t(k)]) {
      const double v = N(indicator(A));
      up[std::size_t(k)] = std::max(up[std::size_t(k)], v);
      lo[std::size_t(k)] = std::min(lo[std::size_t(k)], v);
      for_signs(A, sign_cap, sign_draws, rng, [&](const std::vector<int>& s) {
        const double ve = N(signed_indicator(A, make_pattern(A, s)));
        up_eps[std::size_t(k)] = std::max(up_eps[std::size_t(k)], ve);
        lo_eps[std::size_t(k)] = std::min(lo_eps[std::size_t(k)], ve);
      });
    }
  }
  std::vector<double> suff_l(std::size_t(horizon) + 2, kInf);
  std::vector<double> suff_le(std::size_t(horizon) + 2, kInf);
  for (index_t k = horizon; k >= 1; --k) {
    suff_l[std::size_t(k)] =
        std::min(suff_l[std::size_t(k) + 1], lo[std::size_t(k)]);
    suff_le[std::size_t(k)] =
        std::min(suff_le[std::size_t(k) + 1], lo_eps[std::size_t(k)]);
  }
  double run_u = 0.0, run_ue = 0.0;
  for (index_t m = 1; m <= m_max; ++m) {
    run_u = std::max(run_u, up[std::size_t(m)]);
    run_ue = std::max(run_ue, up_eps[std::size_t(m)]);
    out.phi_u.push_back(run_u);
    out.phi_eps_u.push_back(run_ue);
    out.phi_l.push_back(suff_l[std::size_t(m)]);
    out.phi_eps_l.push_back(suff_le[std::size_t(m)]);
  }
  return out;
}

SandwichReport embedding_sandwich_check(const BasisModel& model,
                                        const SpacePtr& space,
                                        const std::vector<SpVec>& samples) {
  const SpaceSpec* spec = resolve_spec(model, space);
  const double p = spec != nullptr ? spec->p_exponent : 1.0;
  const auto gc = geom_constants(p);
  SandwichReport rep;
  rep.left_constant = 4.0 * gc.A * gc.A;
  index_t m_max = 1;
  for (const SpVec& f : samples)
    m_max = std::max(m_max, index_t(model.coordinates(f).support_size()));
  const auto df =
      democracy_functions(model, space, m_max, SigmaMode::Heuristic);
  TestFamily lam_fam;
  lam_fam.dimension = std::min<index_t>(12, std::max<index_t>(4, m_max));
  rep.lambda_u =
      estimate_constant(ConstantKind::Lambda_u, model, space, lam_fam).value;
  rep.worst_left_margin = kInf;
  rep.worst_right_margin = kInf;
  for (const SpVec& f : samples) {
    if (f.empty()) continue;
    const double nf = measure_in(model, space, f);
    const auto star = nonincreasing_rearrangement(model.coordinates(f));
    double sum = 0.0, sup = 0.0;
    double prev = 0.0;
    for (std::size_t n = 0; n < star.size(); ++n) {
      const double phi_u = df.phi_eps_u[n];
      sum += std::pow(star[n], p) * (std::pow(phi_u, p) - prev);
      prev = std::pow(phi_u, p);
      sup = std::max(sup, star[n] * df.phi_eps_l[n]);
    }
    const double left_rhs = rep.left_constant * std::pow(sum, 1.0 / p);
    if (left_rhs - nf < rep.worst_left_margin) {
      rep.worst_left_margin = left_rhs - nf;
      rep.left_witness = f;
    }
    const double right_rhs = rep.lambda_u * nf;
    if (right_rhs - sup < rep.worst_right_margin) {
      rep.worst_right_margin = right_rhs - sup;
      rep.right_witness = f;
    }
  }
  return rep;
}

}  // namespace greedylab
