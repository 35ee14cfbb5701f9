#include "greedylab/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "greedylab/detail/numio.hpp"

namespace greedylab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

WeightSpec WeightSpec::constant(double c) {
  require(positive_finite(c), "weight const: value must be positive");
  WeightSpec w;
  w.kind_ = Kind::Const;
  w.c_ = c;
  return w;
}

WeightSpec WeightSpec::pot(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0,
          "weight pot: exponent must lie in (0,1]");
  WeightSpec w;
  w.kind_ = Kind::Pot;
  w.alpha_ = alpha;
  return w;
}

WeightSpec WeightSpec::expl(std::vector<double> head, double tail) {
  require(!head.empty(), "weight expl: head must be nonempty");
  require(positive_finite(tail), "weight expl: tail must be positive");
  for (std::size_t i = 0; i < head.size(); ++i) {
    require(positive_finite(head[i]), "weight expl: entries must be positive");
    if (i > 0)
      require(head[i] <= head[i - 1], "weight expl: head must be non-increasing");
  }
  require(tail <= head.back(), "weight expl: tail must not exceed the last head entry");
  WeightSpec w;
  w.kind_ = Kind::Expl;
  w.head_ = std::move(head);
  w.tail_ = tail;
  return w;
}

double WeightSpec::w(index_t n) const {
  if (n < 1) throw std::invalid_argument("WeightSpec::w: index must be >= 1");
  switch (kind_) {
    case Kind::Const:
      return c_;
    case Kind::Pot:
      return std::pow(double(n), alpha_ - 1.0);
    case Kind::Expl:
      return n <= index_t(head_.size()) ? head_[std::size_t(n - 1)] : tail_;
  }
  return 0.0;  // unreachable
}

void WeightSpec::ensure(index_t n) const {
  if (prefix_.empty()) prefix_.push_back(0.0);
  while (index_t(prefix_.size()) <= n)
    prefix_.push_back(prefix_.back() + w(index_t(prefix_.size())));
}

double WeightSpec::s(index_t n) const {
  if (n < 0) throw std::invalid_argument("WeightSpec::s: index must be >= 0");
  if (n == 0) return 0.0;
  ensure(n);
  return prefix_[std::size_t(n)];
}

std::string WeightSpec::label() const {
  using detail::fmt_double;
  switch (kind_) {
    case Kind::Const:
      return "const:" + fmt_double(c_);
    case Kind::Pot:
      return "pot:" + fmt_double(alpha_);
    case Kind::Expl: {
      std::string out = "expl:[";
      for (std::size_t i = 0; i < head_.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(head_[i]);
      }
      out += ";tail=" + fmt_double(tail_) + "]";
      return out;
    }
  }
  return {};  // unreachable
}

WeightSpec parse_weight(const std::string& text) {
  std::string t;
  t.reserve(text.size());
  for (char c : text)
    if (c != ' ') t += c;

  auto parse_num = [&](std::size_t pos, std::size_t stop) {
    double x;
    auto [p, err] = std::from_chars(t.data() + pos, t.data() + stop, x);
    if (err != std::errc() || std::size_t(p - t.data()) != stop)
      throw std::invalid_argument("weight spec: bad number at position " +
                                  std::to_string(pos));
    return x;
  };

  if (t.rfind("const:", 0) == 0) return WeightSpec::constant(parse_num(6, t.size()));
  if (t.rfind("pot:", 0) == 0) return WeightSpec::pot(parse_num(4, t.size()));
  if (t.rfind("expl:[", 0) == 0) {
    require(!t.empty() && t.back() == ']', "weight spec: expl must end with ']'");
    std::size_t semi = t.find(";tail=", 6);
    require(semi != std::string::npos, "weight spec: expl needs ';tail=<c>'");
    std::vector<double> head;
    std::size_t pos = 6;
    while (pos < semi) {
      std::size_t comma = std::min(t.find(',', pos), semi);
      head.push_back(parse_num(pos, comma));
      pos = comma + (comma < semi ? 1 : 0);
    }
    double tail = parse_num(semi + 6, t.size() - 1);
    return WeightSpec::expl(std::move(head), tail);
  }
  throw std::invalid_argument("weight spec: expected const:, pot: or expl:[ at position 0");
}

WeightReport weight_report(const WeightSpec& w, index_t N) {
  if (N < 16) throw std::invalid_argument("weight_report: N must be >= 16");
  w.ensure(N);
  WeightReport r;
  r.check_range = N;

  // doubling constant, with a stability comparison between the half range
  // and the full range
  double half_max = 0.0, full_max = 0.0;
  for (index_t m = 1; 2 * m <= N; ++m) {
    double ratio = w.s(2 * m) / w.s(m);
    full_max = std::max(full_max, ratio);
    if (2 * m <= N / 2) half_max = std::max(half_max, ratio);
  }
  r.doubling_c = full_max;
  r.doubling = full_max <= half_max * (1.0 + 1e-6);

  for (int b = 3; b <= 32 && r.urp_b == 0; ++b) {
    bool ok = true;
    for (index_t m = 1; b * m <= N && ok; ++m)
      ok = w.s(b * m) <= (b / 2.0) * w.s(m) + 1e-12 * w.s(m);
    if (ok) r.urp_b = b;
  }
  r.urp = r.urp_b != 0;

  for (int b = 2; b <= 32 && r.lrp_b == 0; ++b) {
    bool ok = true;
    for (index_t m = 1; b * m <= N && ok; ++m)
      ok = 2.0 * w.s(m) <= w.s(b * m) + 1e-12 * w.s(m);
    if (ok) r.lrp_b = b;
  }
  r.lrp = r.lrp_b != 0;

  // Dini ratios s_n / (n w_n).  Harmonic-type divergence adds a constant
  // increment per range doubling; a stabilizing sup adds a vanishing one.
  double sup_half = 0.0, sup_full = 0.0;
  for (index_t n = 1; n <= N; ++n) {
    double ratio = w.s(n) / (double(n) * w.w(n));
    sup_full = std::max(sup_full, ratio);
    if (n <= N / 2) sup_half = std::max(sup_half, ratio);
  }
  r.regular_sup = sup_full;
  r.regular_growing = sup_full > sup_half;
  r.regular = (sup_full - sup_half) <= 0.05 * sup_half;
  return r;
}

}  // namespace greedylab
