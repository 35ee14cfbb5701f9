#include "greedylab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "greedylab/rng.hpp"

namespace greedylab {
namespace {

constexpr std::size_t kPairBudget = std::size_t(1) << 20;

double mag(double c) { return std::abs(c); }
int sgn(double c) { return (c > 0.0) - (c < 0.0); }

// Support split into exact-magnitude levels, largest first, each level
// sorted by index.
std::vector<std::vector<index_t>> magnitude_levels(const SpVec& c) {
  std::vector<index_t> order = c.support();
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = mag(c.coef(a)), mb = mag(c.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::vector<std::vector<index_t>> levels;
  for (index_t n : order) {
    if (levels.empty() ||
        mag(c.coef(levels.back().front())) != mag(c.coef(n)))
      levels.emplace_back();
    levels.back().push_back(n);
  }
  return levels;
}

std::vector<index_t> level_subset(const std::vector<index_t>& level,
                                  std::uint32_t mask) {
  std::vector<index_t> out;
  for (std::size_t i = 0; i < level.size(); ++i)
    if (mask & (std::uint32_t(1) << i)) out.push_back(level[i]);
  return out;
}

// Every greedy set is a run of full levels plus one proper subset of the
// next level; the pairs below range over the nested combinations.  The
// result holds the distinct difference sets A2 ∖ A1.
std::set<std::vector<index_t>> chain_differences(
    const std::vector<std::vector<index_t>>& levels) {
  const std::size_t r = levels.size();
  for (const auto& level : levels)
    if (level.size() > 20)
      throw std::runtime_error("tie level beyond the nested-pair budget");
  std::size_t pairs = 0;
  auto bump = [&pairs] {
    if (++pairs > kPairBudget)
      throw std::runtime_error("tie level beyond the nested-pair budget");
  };
  std::set<std::vector<index_t>> diffs;
  auto note = [&diffs](std::vector<index_t> d) {
    if (d.empty()) return;
    std::sort(d.begin(), d.end());
    diffs.insert(std::move(d));
  };
  // Middle runs: mids[i][j] = union of levels i..j-1.
  std::vector<std::vector<std::vector<index_t>>> mids(r + 1);
  for (std::size_t i = 0; i <= r; ++i) {
    mids[i].assign(r + 1, {});
    for (std::size_t j = i + 1; j <= r; ++j) {
      mids[i][j] = mids[i][j - 1];
      mids[i][j].insert(mids[i][j].end(), levels[j - 1].begin(),
                        levels[j - 1].end());
    }
  }
  // Representations: (i, S) with S a proper subset of level i when i < r,
  // and the sentinel (r, empty) for the full support.
  for (std::size_t i = 0; i <= r; ++i) {
    const std::uint32_t ni =
        i < r ? (std::uint32_t(1) << levels[i].size()) - 1 : 1;
    for (std::uint32_t s = 0; s < ni; ++s) {
      // Same level: supersets of s inside level i.
      if (i < r) {
        const std::uint32_t full = ni;  // all-ones mask of level i
        const std::uint32_t free = full & ~s;
        // t = s | extra for every submask extra of the free positions,
        // keeping t a proper subset.
        for (std::uint32_t extra = free;; extra = (extra - 1) & free) {
          const std::uint32_t t = s | extra;
          if (t != full) {
            bump();
            if (extra != 0) note(level_subset(levels[i], extra));
          }
          if (extra == 0) break;
        }
      }
      // Higher levels j > i, including the full-support sentinel.
      for (std::size_t j = i + 1; j <= r; ++j) {
        const std::uint32_t nj =
            j < r ? (std::uint32_t(1) << levels[j].size()) - 1 : 1;
        const std::uint32_t si = i < r ? (std::uint32_t(1) << levels[i].size()) - 1 : 1;
        for (std::uint32_t t = 0; t < nj; ++t) {
          bump();
          std::vector<index_t> d = i < r ? level_subset(levels[i], si & ~s)
                                         : std::vector<index_t>{};
          d.insert(d.end(), mids[i + 1][j].begin(), mids[i + 1][j].end());
          if (j < r) {
            const auto tail = level_subset(levels[j], t);
            d.insert(d.end(), tail.begin(), tail.end());
          }
          note(std::move(d));
        }
      }
    }
  }
  return diffs;
}

double measure(const BasisModel& model, const SpVec& coords) {
  return model.norm(model.synthesize(coords));
}

double eval_chain0(const BasisModel& model, const SpVec& coords) {
  if (coords.empty()) return 0.0;
  double best = 0.0;
  for (const auto& d : chain_differences(magnitude_levels(coords)))
    best = std::max(best, measure(model, restrict_to(coords, d)));
  return best;
}

// U and T on coordinates; A must be a greedy set of c.
SpVec trunc_u_coords(const SpVec& c, const std::vector<index_t>& A) {
  if (A.empty()) return SpVec{};
  double t = std::numeric_limits<double>::infinity();
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

// Strictly greedy sets: the level prefixes, empty through full support.
std::vector<std::vector<index_t>> strict_prefixes(
    const std::vector<std::vector<index_t>>& levels) {
  std::vector<std::vector<index_t>> out{{}};
  std::vector<index_t> acc;
  for (const auto& level : levels) {
    acc.insert(acc.end(), level.begin(), level.end());
    std::sort(acc.begin(), acc.end());
    out.push_back(acc);
  }
  return out;
}

double eval_trunc1(const BasisModel& model, const SpVec& coords) {
  if (coords.empty()) return 0.0;
  double best = 0.0;
  for (const auto& A : strict_prefixes(magnitude_levels(coords)))
    best = std::max(best, eval_chain0(model, trunc_t_coords(coords, A)));
  return best;
}

struct AlmostPair {
  std::vector<index_t> A;
  SpVec z;  // coordinates, disjoint from the sample's support
};

void append_sign_blocks(std::vector<SpVec>& zs, index_t start, index_t k,
                        double t, Rng& rng) {
  auto push = [&](auto&& sign_at) {
    SpVec z;
    for (index_t i = 0; i < k; ++i)
      z.entries.emplace_back(start + i, t * double(sign_at(i)));
    zs.push_back(std::move(z));
  };
  if (k <= 6) {
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << k); ++mask)
      push([&](index_t i) { return (mask >> i) & 1 ? -1 : 1; });
    return;
  }
  push([](index_t) { return 1; });
  push([](index_t i) { return i % 2 ? -1 : 1; });
  push([k](index_t i) { return i < k / 2 ? 1 : -1; });
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int rep = 0; rep < 8; ++rep) {
    for (auto& v : s) v = rng.sign();
    push([&](index_t i) { return s[std::size_t(i)]; });
  }
}

// The search family anchored at c: the trivial pair plus every A of size
// up to the budget combined with sign blocks at level t = max|coord| on
// fresh indices.  Deterministic order, total size capped.
std::vector<AlmostPair> almost_family(const BasisModel& model,
                                      const SpVec& coords, index_t budget) {
  std::vector<AlmostPair> fam;
  fam.push_back({{}, SpVec{}});
  if (coords.empty()) return fam;
  const std::vector<index_t> supp = coords.support();
  double t = 0.0;
  for (const auto& [n, v] : coords.entries) t = std::max(t, mag(v));
  const index_t start = coords.max_index() + 1;
  const index_t kmax = std::min<index_t>(budget, index_t(supp.size()));
  if (model.is_matrix() && start + kmax - 1 > model.dimension())
    throw std::runtime_error("fresh block leaves the model's index range");
  Rng rng(sub_seed(0, "almost-a-signs"));
  for (index_t k = 1; k <= kmax; ++k) {
    std::vector<SpVec> zs;
    append_sign_blocks(zs, start, k, t, rng);
    // Combinations of the support, lexicographic.
    std::vector<std::size_t> pick(static_cast<std::size_t>(k));
    for (index_t i = 0; i < k; ++i) pick[std::size_t(i)] = std::size_t(i);
    while (true) {
      std::vector<index_t> A;
      A.reserve(std::size_t(k));
      for (std::size_t p : pick) A.push_back(supp[p]);
      for (const SpVec& z : zs) {
        fam.push_back({A, z});
        if (fam.size() >= kPairBudget) return fam;
      }
      // Next combination.
      std::size_t i = std::size_t(k);
      while (i > 0 && pick[i - 1] == supp.size() - (std::size_t(k) - i) - 1)
        --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < std::size_t(k); ++j)
        pick[j] = pick[j - 1] + 1;
    }
  }
  return fam;
}

double family_min(const BasisModel& model, const SpVec& coords,
                  const std::vector<AlmostPair>& fam) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [A, z] : fam) {
    SpVec h;
    auto it = A.begin();
    for (const auto& [n, v] : coords.entries) {
      while (it != A.end() && *it < n) ++it;
      if (it != A.end() && *it == n) continue;
      h.entries.emplace_back(n, v);
    }
    best = std::min(best, measure(model, add(h, z)));
  }
  return best;
}

// Greedy sets of every cardinality, with a chain fallback when a tie
// boundary blows the enumeration.
std::vector<std::vector<index_t>> greedy_sets_all(const SpVec& c,
                                                  std::size_t cap) {
  std::vector<index_t> order = c.support();
  std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    const double ma = mag(c.coef(a)), mb = mag(c.coef(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::vector<std::vector<index_t>> out;
  for (std::size_t m = 1; m <= order.size() && out.size() < cap; ++m) {
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

bool unconditional_lattice_base(const BasisModel& model) {
  if (model.is_matrix()) return false;
  return model.space()->lattice_unconditional;
}

}  // namespace

const char* renorm_kind_name(RenormKind kind) {
  switch (kind) {
    case RenormKind::Chain0: return "chain0";
    case RenormKind::Trunc1: return "trunc1";
    case RenormKind::AlmostA: return "almost_a";
  }
  throw std::logic_error("unknown renorm kind");
}

RenormKind parse_renorm_kind(const std::string& name) {
  if (name == "chain0") return RenormKind::Chain0;
  if (name == "trunc1") return RenormKind::Trunc1;
  if (name == "almost_a") return RenormKind::AlmostA;
  throw std::invalid_argument("unknown renorm kind: " + name);
}

double renorm_eval(const RenormedSpace& r, const SpVec& f) {
  const SpVec coords = r.base.coordinates(f);
  switch (r.kind) {
    case RenormKind::Chain0:
      return eval_chain0(r.base, coords);
    case RenormKind::Trunc1:
      return eval_trunc1(r.base, coords);
    case RenormKind::AlmostA:
      return family_min(r.base, coords, almost_family(r.base, coords, r.budget));
  }
  throw std::logic_error("unknown renorm kind");
}

RenormCheckReport renorm_isometry_check(const RenormedSpace& r,
                                        const std::vector<SpVec>& samples,
                                        double tol) {
  RenormCheckReport rep;
  rep.kind = r.kind;
  auto note = [&](const SpVec& f, const std::vector<index_t>& set, double lhs,
                  double rhs) {
    ++rep.comparisons;
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
    if (lhs > rhs + tol) {
      ++rep.violations;
      if (rep.witnesses.size() < 8) rep.witnesses.push_back({f, set, lhs, rhs});
    }
  };
  for (const SpVec& f : samples) {
    ++rep.samples;
    const SpVec coords = r.base.coordinates(f);
    if (coords.empty()) continue;
    switch (r.kind) {
      case RenormKind::Chain0: {
        const double rhs = eval_chain0(r.base, coords);
        for (const auto& d : chain_differences(magnitude_levels(coords)))
          note(f, d, eval_chain0(r.base, restrict_to(coords, d)), rhs);
        break;
      }
      case RenormKind::Trunc1: {
        const double rhs = eval_trunc1(r.base, coords);
        for (const auto& A : strict_prefixes(magnitude_levels(coords)))
          note(f, A, eval_trunc1(r.base, trunc_t_coords(coords, A)), rhs);
        break;
      }
      case RenormKind::AlmostA: {
        const auto fam = almost_family(r.base, coords, r.budget);
        const double rhs = family_min(r.base, coords, fam);
        rep.projection_branch = unconditional_lattice_base(r.base);
        for (const auto& B : greedy_sets_all(coords, 128)) {
          SpVec rest = coords;
          for (index_t n : B) rest.set(n, 0.0);
          note(f, B, family_min(r.base, rest, fam), rhs);
          if (rep.projection_branch)
            note(f, B, family_min(r.base, restrict_to(coords, B), fam), rhs);
        }
        break;
      }
    }
  }
  return rep;
}

}  // namespace greedylab
