#include "greedylab/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "greedylab/detail/numio.hpp"
#include "greedylab/rng.hpp"

namespace greedylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_norm(double p, const SpVec& f) {
  double acc = 0.0;
  if (std::isinf(p)) {
    for (const auto& [n, c] : f.entries) acc = std::max(acc, std::fabs(c));
    return acc;
  }
  for (const auto& [n, c] : f.entries) acc += std::pow(std::fabs(c), p);
  return std::pow(acc, 1.0 / p);
}

double sup_norm(const SpVec& f) {
  double acc = 0.0;
  for (const auto& [n, c] : f.entries) acc = std::max(acc, std::fabs(c));
  return acc;
}

double lorentz_norm(double p, double q, const WeightSpec& w, const SpVec& f) {
  std::vector<double> a = nonincreasing_rearrangement(f);
  if (a.empty()) return 0.0;
  w.ensure(index_t(a.size()));
  if (std::isinf(q)) {
    double best = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
      best = std::max(best, a[n] * std::pow(w.s(index_t(n + 1)), 1.0 / p));
    return best;
  }
  const double t = q / p - 1.0;
  double acc = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    double sw = t == 0.0 ? 1.0 : (t == 1.0 ? w.s(index_t(n + 1)) : std::pow(w.s(index_t(n + 1)), t));
    acc += std::pow(a[n], q) * sw * w.w(index_t(n + 1));
  }
  return std::pow(acc, 1.0 / q);
}

double marcin_norm(const WeightSpec& w, const SpVec& f) {
  std::vector<double> a = nonincreasing_rearrangement(f);
  w.ensure(index_t(a.size()));
  double run = 0.0, best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    run += a[k];
    best = std::max(best, run / w.s(index_t(k + 1)));
  }
  return best;
}

// Maximum of sum_j |a_{n_j}|^p w_j over increasing index subsequences
// n_1 < n_2 < ...  Slots are consumed in order; skipping a slot never
// helps because w is non-increasing, so at most |supp| weights matter.
double garling_norm(double p, const WeightSpec& w, const SpVec& f) {
  const std::size_t m = f.entries.size();
  if (m == 0) return 0.0;
  w.ensure(index_t(m));
  std::vector<double> best(m + 1, -1.0);
  best[0] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ci = std::pow(std::fabs(f.entries[i].second), p);
    for (std::size_t j = std::min(i + 1, m); j >= 1; --j)
      if (best[j - 1] >= 0.0)
        best[j] = std::max(best[j], best[j - 1] + ci * w.w(index_t(j)));
  }
  double top = 0.0;
  for (double v : best) top = std::max(top, v);
  return std::pow(top, 1.0 / p);
}

// (sum |a_n - a_{n-1}|^p)^{1/p} with a_0 = 0, summed past the support so
// the final drop to zero always contributes.
double vp_norm(double p, const SpVec& f) {
  if (f.empty()) return 0.0;
  double acc = 0.0, prev = 0.0;
  index_t prev_n = 0;
  for (const auto& [n, c] : f.entries) {
    if (prev_n != 0 && n != prev_n + 1) {
      acc += std::pow(std::fabs(prev), p);
      prev = 0.0;
    }
    acc += std::pow(std::fabs(c - prev), p);
    prev = c;
    prev_n = n;
  }
  acc += std::pow(std::fabs(prev), p);
  return std::pow(acc, 1.0 / p);
}

// sup_m |sum_{n<=m} a_n w_n|; partial sums are constant between support
// indices, so the support prefixes carry the sup.
double sw_norm(const WeightSpec& w, const SpVec& f) {
  double run = 0.0, best = 0.0;
  for (const auto& [n, c] : f.entries) {
    run += c * w.w(n);
    best = std::max(best, std::fabs(run));
  }
  return best;
}

double dsum_norm(const SpaceSpec& X, const SpVec& f) {
  const index_t K = index_t(X.parts.size());
  std::vector<SpVec> split(static_cast<std::size_t>(K));
  for (const auto& [n, c] : f.entries)
    split[std::size_t((n - 1) % K)].set((n - 1) / K + 1, c);
  double best = 0.0;
  for (std::size_t k = 0; k < split.size(); ++k)
    best = std::max(best, norm(*X.parts[k], split[k]));
  return best;
}

double mixed_norm(const SpaceSpec& X, const SpVec& f) {
  std::vector<double> acc(X.blocks.size(), 0.0);
  index_t total = 0;
  std::vector<index_t> ends;
  ends.reserve(X.blocks.size());
  for (index_t len : X.blocks) {
    total += len;
    ends.push_back(total);
  }
  for (const auto& [n, c] : f.entries) {
    if (n > total)
      throw std::invalid_argument("mixed norm: index " + std::to_string(n) +
                                  " exceeds the block structure");
    std::size_t b = std::size_t(
        std::lower_bound(ends.begin(), ends.end(), n) - ends.begin());
    acc[b] += std::pow(std::fabs(c), X.p);
  }
  double out = 0.0;
  for (double a : acc) out += std::pow(a, X.q / X.p);
  return std::pow(out, 1.0 / X.q);
}

// ---- parsing ----

struct Cursor {
  const std::string& t;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("space spec: " + what + " at position " +
                                std::to_string(pos));
  }
  void ws() {
    while (pos < t.size() && t[pos] == ' ') ++pos;
  }
  bool lit(std::string_view s) {
    if (t.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!lit(s)) fail("expected '" + std::string(s) + "'");
  }
  double number() {
    double x;
    auto [p, err] = std::from_chars(t.data() + pos, t.data() + t.size(), x);
    if (err != std::errc()) fail("expected a number");
    pos = std::size_t(p - t.data());
    return x;
  }
  double number_or_inf() {
    if (lit("inf")) return kInf;
    return number();
  }
  index_t integer() {
    index_t x;
    auto [p, err] = std::from_chars(t.data() + pos, t.data() + t.size(), x);
    if (err != std::errc()) fail("expected an integer");
    pos = std::size_t(p - t.data());
    return x;
  }
  bool digit_ahead() const {
    return pos < t.size() && t[pos] >= '0' && t[pos] <= '9';
  }
};

WeightSpec parse_weight_at(Cursor& c) {
  c.ws();
  std::size_t start = c.pos;
  if (c.lit("const:") || c.lit("pot:")) {
    c.number();
  } else if (c.lit("expl:[")) {
    std::size_t close = c.t.find(']', c.pos);
    if (close == std::string::npos) c.fail("expected ']' closing the weight");
    c.pos = close + 1;
  } else {
    c.fail("expected a weight (const:, pot: or expl:[...])");
  }
  return parse_weight(c.t.substr(start, c.pos - start));
}

std::string weight_field(const WeightSpec& w) { return "w=" + w.label(); }

std::string num_or_inf(double x) {
  return std::isinf(x) ? "inf" : detail::fmt_double(x);
}

SpacePtr parse_space_at(Cursor& c);

// Sampled certificate for q = inf rearrangement norms: the largest grid
// exponent whose r-triangle inequality survives random continuous pairs.
double sampled_exponent(const SpaceSpec& X) {
  Rng rng(sub_seed(0, "lorentz-qinf-exponent"));
  std::vector<SpVec> fs, gs;
  for (int trial = 0; trial < 200; ++trial) {
    SpVec f, g;
    int m = 1 + int(rng.below(16));
    for (int k = 0; k < m; ++k) {
      f.set(index_t(1 + rng.below(48)),
            rng.sym() * std::pow(10.0, 2.0 * rng.unit() - 1.0));
      g.set(index_t(1 + rng.below(48)),
            rng.sym() * std::pow(10.0, 2.0 * rng.unit() - 1.0));
    }
    if (f.empty() || g.empty()) continue;
    fs.push_back(f);
    gs.push_back(g);
  }
  for (double r : {0.99, 0.9, 0.75, 0.5, 0.25}) {
    bool ok = true;
    for (std::size_t i = 0; i < fs.size() && ok; ++i) {
      double lhs = std::pow(norm(X, add(fs[i], gs[i])), r);
      double rhs = std::pow(norm(X, fs[i]), r) + std::pow(norm(X, gs[i]), r);
      ok = lhs <= rhs * (1.0 + 1e-9);
    }
    if (ok) return r;
  }
  throw std::runtime_error("lorentz: no convexity exponent certified at q=inf");
}

SpacePtr finish(SpaceSpec X) { return std::make_shared<const SpaceSpec>(std::move(X)); }

SpacePtr parse_space_at(Cursor& c) {
  c.ws();
  SpaceSpec X;
  if (c.lit("lp:")) {
    X.kind = SpaceSpec::Kind::Lp;
    X.p = c.number_or_inf();
    if (!(X.p > 0.0)) c.fail("lp exponent must be positive");
    X.p_exponent = std::min(X.p, 1.0);
    X.lattice_unconditional = X.symmetric = true;
    X.label = "lp:" + num_or_inf(X.p);
    return finish(std::move(X));
  }
  if (c.lit("c0")) {
    X.kind = SpaceSpec::Kind::C0;
    X.p_exponent = 1.0;
    X.lattice_unconditional = X.symmetric = true;
    X.label = "c0";
    return finish(std::move(X));
  }
  if (c.lit("lorentz:")) {
    X.kind = SpaceSpec::Kind::Lorentz;
    c.expect("p=");
    X.p = c.number();
    c.expect(",q=");
    X.q = c.number_or_inf();
    c.expect(",w=");
    X.weight = parse_weight_at(c);
    if (!(X.p > 0.0) || std::isinf(X.p)) c.fail("lorentz p must be positive and finite");
    if (!(X.q > 0.0)) c.fail("lorentz q must be positive");
    if (!weight_report(X.weight, 1024).doubling)
      throw std::invalid_argument("lorentz: primitive weight is not doubling");
    X.lattice_unconditional = X.symmetric = true;
    X.label = "lorentz:p=" + detail::fmt_double(X.p) + ",q=" + num_or_inf(X.q) +
              "," + weight_field(X.weight);
    X.p_exponent = std::isinf(X.q) ? 0.0 : std::min(X.q, 1.0);
    if (std::isinf(X.q)) X.p_exponent = sampled_exponent(X);
    return finish(std::move(X));
  }
  if (c.lit("marcin:")) {
    X.kind = SpaceSpec::Kind::Marcin;
    c.expect("w=");
    X.weight = parse_weight_at(c);
    X.p_exponent = 1.0;
    X.lattice_unconditional = X.symmetric = true;
    X.label = "marcin:" + weight_field(X.weight);
    return finish(std::move(X));
  }
  if (c.lit("garling:")) {
    X.kind = SpaceSpec::Kind::Garling;
    c.expect("p=");
    X.p = c.number();
    c.expect(",w=");
    X.weight = parse_weight_at(c);
    if (!(X.p > 0.0) || std::isinf(X.p)) c.fail("garling p must be positive and finite");
    X.p_exponent = std::min(X.p, 1.0);
    X.lattice_unconditional = true;  // subsymmetric but not symmetric
    X.label = "garling:p=" + detail::fmt_double(X.p) + "," + weight_field(X.weight);
    return finish(std::move(X));
  }
  if (c.lit("vp:")) {
    X.kind = SpaceSpec::Kind::Vp;
    X.p = c.number();
    if (!(X.p > 0.0) || X.p > 1.0) c.fail("vp exponent must lie in (0,1]");
    X.p_exponent = X.p;
    X.label = "vp:" + detail::fmt_double(X.p);
    return finish(std::move(X));
  }
  if (c.lit("sw:")) {
    X.kind = SpaceSpec::Kind::Sw;
    c.expect("w=");
    X.weight = parse_weight_at(c);
    X.p_exponent = 1.0;
    X.label = "sw:" + weight_field(X.weight);
    return finish(std::move(X));
  }
  if (c.lit("kt(")) {
    X.kind = SpaceSpec::Kind::Kt;
    X.parts.push_back(parse_space_at(c));
    c.ws();
    c.expect(";");
    c.ws();
    c.expect("w=");
    X.weight = parse_weight_at(c);
    c.ws();
    c.expect(")");
    X.p_exponent = X.parts[0]->p_exponent;
    X.label = "kt(" + X.parts[0]->label + " ; " + weight_field(X.weight) + ")";
    return finish(std::move(X));
  }
  if (c.lit("dsum(")) {
    X.kind = SpaceSpec::Kind::Dsum;
    X.p_exponent = 1.0;
    X.lattice_unconditional = true;
    for (;;) {
      X.parts.push_back(parse_space_at(c));
      X.p_exponent = std::min(X.p_exponent, X.parts.back()->p_exponent);
      X.lattice_unconditional =
          X.lattice_unconditional && X.parts.back()->lattice_unconditional;
      c.ws();
      if (c.lit(")")) break;
      c.expect(",");
    }
    if (X.parts.size() < 2) c.fail("dsum needs at least two parts");
    X.label = "dsum(";
    for (std::size_t k = 0; k < X.parts.size(); ++k) {
      if (k) X.label += ',';
      X.label += X.parts[k]->label;
    }
    X.label += ')';
    return finish(std::move(X));
  }
  if (c.lit("mixed:")) {
    X.kind = SpaceSpec::Kind::Mixed;
    c.expect("q=");
    X.q = c.number();
    c.expect(",p=");
    X.p = c.number();
    c.expect(",blocks=");
    if (!(X.p > 0.0) || std::isinf(X.p) || !(X.q > 0.0) || std::isinf(X.q))
      c.fail("mixed exponents must be positive and finite");
    for (;;) {
      index_t len = c.integer();
      if (len < 1) c.fail("block lengths must be >= 1");
      X.blocks.push_back(len);
      std::size_t save = c.pos;
      if (c.lit(",") && c.digit_ahead()) continue;
      c.pos = save;
      break;
    }
    X.p_exponent = std::min({X.p, X.q, 1.0});
    X.lattice_unconditional = true;
    X.label = "mixed:q=" + detail::fmt_double(X.q) + ",p=" + detail::fmt_double(X.p) +
              ",blocks=";
    for (std::size_t k = 0; k < X.blocks.size(); ++k) {
      if (k) X.label += ',';
      X.label += std::to_string(X.blocks[k]);
    }
    return finish(std::move(X));
  }
  c.fail("expected a space kind");
}

}  // namespace

SpacePtr parse_space(const std::string& text) {
  Cursor c{text};
  SpacePtr X = parse_space_at(c);
  c.ws();
  if (c.pos != text.size()) c.fail("trailing characters");
  return X;
}

double norm(const SpaceSpec& X, const SpVec& f) {
  switch (X.kind) {
    case SpaceSpec::Kind::Lp:
      return lp_norm(X.p, f);
    case SpaceSpec::Kind::C0:
      return sup_norm(f);
    case SpaceSpec::Kind::Lorentz:
      return lorentz_norm(X.p, X.q, X.weight, f);
    case SpaceSpec::Kind::Marcin:
      return marcin_norm(X.weight, f);
    case SpaceSpec::Kind::Garling:
      return garling_norm(X.p, X.weight, f);
    case SpaceSpec::Kind::Vp:
      return vp_norm(X.p, f);
    case SpaceSpec::Kind::Sw:
      return sw_norm(X.weight, f);
    case SpaceSpec::Kind::Kt:
      return std::max(norm(*X.parts[0], f), sw_norm(X.weight, f));
    case SpaceSpec::Kind::Dsum:
      return dsum_norm(X, f);
    case SpaceSpec::Kind::Mixed:
      return mixed_norm(X, f);
  }
  return 0.0;  // unreachable
}

double fundamental_lorentz(double p, double q, const WeightSpec& w, index_t m) {
  if (m < 1) throw std::invalid_argument("fundamental_lorentz: m must be >= 1");
  if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("fundamental_lorentz: bad p");
  if (!(q > 0.0)) throw std::invalid_argument("fundamental_lorentz: bad q");
  w.ensure(m);
  if (std::isinf(q)) return std::pow(w.s(m), 1.0 / p);
  const double t = q / p - 1.0;
  double acc = 0.0;
  for (index_t n = 1; n <= m; ++n) acc += std::pow(w.s(n), t) * w.w(n);
  return std::pow(acc, 1.0 / q);
}

HardyReport hardy_check(const WeightSpec& w, double q, const std::vector<SpVec>& samples) {
  if (!(q > 1.0)) throw std::invalid_argument("hardy_check: q must exceed 1");
  HardyReport r;
  for (const SpVec& f : samples) {
    if (f.empty()) throw std::invalid_argument("hardy_check: empty sample");
    const index_t H = 8 * f.max_index();
    w.ensure(H);
    std::vector<double> dense(std::size_t(H), 0.0);
    for (const auto& [n, c] : f.entries) dense[std::size_t(n - 1)] = c;
    double run = 0.0;
    for (index_t n = 0; n < H; ++n) {
      run += dense[std::size_t(n)];
      dense[std::size_t(n)] = std::fabs(run) / double(n + 1);
    }
    std::sort(dense.begin(), dense.end(), std::greater<double>());
    double num = 0.0;
    for (index_t n = 0; n < H; ++n)
      num = std::max(num, dense[std::size_t(n)] * w.s(n + 1));
    double den = lorentz_norm(1.0, q, w, f);
    r.ratios.push_back(num / den);
  }
  r.max_ratio = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  r.increasing = r.ratios.size() >= 2;
  for (std::size_t i = 1; i < r.ratios.size(); ++i)
    if (r.ratios[i] <= r.ratios[i - 1]) r.increasing = false;
  return r;
}

std::vector<SpVec> hardy_harmonic_family(const std::vector<index_t>& lengths) {
  std::vector<SpVec> out;
  for (index_t L : lengths) {
    if (L < 1) throw std::invalid_argument("hardy_harmonic_family: length must be >= 1");
    SpVec f;
    f.entries.reserve(std::size_t(L));
    for (index_t k = 1; k <= L; ++k) f.entries.push_back({k, 1.0 / double(k)});
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace greedylab
