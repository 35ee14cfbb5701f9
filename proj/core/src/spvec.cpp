#include "greedylab/spvec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "greedylab/detail/numio.hpp"

namespace greedylab {

namespace {

constexpr index_t kMaxIndex = index_t(1) << 60;

[[noreturn]] void bad(const std::string& what, std::size_t pos) {
  throw std::invalid_argument(what + " at position " + std::to_string(pos));
}

}  // namespace

double SpVec::coef(index_t n) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), n,
                             [](const auto& e, index_t k) { return e.first < k; });
  return (it != entries.end() && it->first == n) ? it->second : 0.0;
}

void SpVec::set(index_t n, double c) {
  if (n < 1 || n > kMaxIndex) throw std::invalid_argument("SpVec index out of range");
  if (!std::isfinite(c)) throw std::invalid_argument("SpVec coefficient not finite");
  auto it = std::lower_bound(entries.begin(), entries.end(), n,
                             [](const auto& e, index_t k) { return e.first < k; });
  bool present = it != entries.end() && it->first == n;
  if (c == 0.0) {
    if (present) entries.erase(it);
  } else if (present) {
    it->second = c;
  } else {
    entries.insert(it, {n, c});
  }
}

std::vector<index_t> SpVec::support() const {
  std::vector<index_t> idx;
  idx.reserve(entries.size());
  for (const auto& [n, c] : entries) idx.push_back(n);
  return idx;
}

SpVec& SpVec::operator*=(double t) {
  if (t == 0.0) {
    entries.clear();
    return *this;
  }
  for (auto& [n, c] : entries) c *= t;
  return *this;
}

SpVec SpVec::from_pairs(std::vector<std::pair<index_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SpVec f;
  f.entries.reserve(pairs.size());
  for (const auto& [n, c] : pairs) {
    if (n < 1 || n > kMaxIndex) throw std::invalid_argument("SpVec index out of range");
    if (!std::isfinite(c)) throw std::invalid_argument("SpVec coefficient not finite");
    if (!f.entries.empty() && f.entries.back().first == n)
      throw std::invalid_argument("SpVec duplicate index " + std::to_string(n));
    if (c != 0.0) f.entries.push_back({n, c});
  }
  return f;
}

SpVec add(const SpVec& f, const SpVec& g) { return add_scaled(f, 1.0, g); }

SpVec add_scaled(const SpVec& f, double t, const SpVec& g) {
  SpVec out;
  out.entries.reserve(f.entries.size() + g.entries.size());
  std::size_t i = 0, j = 0;
  while (i < f.entries.size() || j < g.entries.size()) {
    index_t n;
    double c;
    if (j >= g.entries.size() ||
        (i < f.entries.size() && f.entries[i].first < g.entries[j].first)) {
      n = f.entries[i].first;
      c = f.entries[i].second;
      ++i;
    } else if (i >= f.entries.size() || g.entries[j].first < f.entries[i].first) {
      n = g.entries[j].first;
      c = t * g.entries[j].second;
      ++j;
    } else {
      n = f.entries[i].first;
      c = f.entries[i].second + t * g.entries[j].second;
      ++i;
      ++j;
    }
    if (c != 0.0) out.entries.push_back({n, c});
  }
  return out;
}

SpVec restrict_to(const SpVec& f, const std::vector<index_t>& idx) {
  std::vector<index_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  SpVec out;
  std::size_t i = 0;
  for (index_t n : sorted) {
    while (i < f.entries.size() && f.entries[i].first < n) ++i;
    if (i < f.entries.size() && f.entries[i].first == n)
      out.entries.push_back(f.entries[i]);
  }
  return out;
}

std::vector<double> nonincreasing_rearrangement(const SpVec& f) {
  std::vector<double> a;
  a.reserve(f.entries.size());
  for (const auto& [n, c] : f.entries) a.push_back(std::fabs(c));
  std::sort(a.begin(), a.end(), std::greater<double>());
  return a;
}

int SignPattern::at(index_t n) const {
  auto it = std::lower_bound(signs.begin(), signs.end(), n,
                             [](const auto& e, index_t k) { return e.first < k; });
  return (it != signs.end() && it->first == n) ? it->second : 0;
}

SignPattern SignPattern::from_pairs(std::vector<std::pair<index_t, int>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SignPattern eps;
  eps.signs.reserve(pairs.size());
  for (const auto& [n, s] : pairs) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1");
    if (!eps.signs.empty() && eps.signs.back().first == n)
      throw std::invalid_argument("SignPattern duplicate index " + std::to_string(n));
    eps.signs.push_back({n, s});
  }
  return eps;
}

SpVec indicator(const std::vector<index_t>& idx) {
  return signed_indicator(idx, SignPattern{});
}

SpVec signed_indicator(const std::vector<index_t>& idx, const SignPattern& eps) {
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(idx.size());
  for (index_t n : idx) {
    int s = eps.at(n);
    pairs.push_back({n, s == 0 ? 1.0 : double(s)});
  }
  return SpVec::from_pairs(std::move(pairs));
}

SpVec parse_vec(const std::string& text) {
  std::vector<std::pair<index_t, double>> pairs;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  skip_ws();
  if (pos == text.size()) return SpVec{};
  for (;;) {
    skip_ws();
    double c;
    auto [cp, cerr] = std::from_chars(text.data() + pos, text.data() + text.size(), c);
    if (cerr != std::errc()) bad("vector literal: expected coefficient", pos);
    pos = std::size_t(cp - text.data());
    if (pos >= text.size() || text[pos] != '@') bad("vector literal: expected '@'", pos);
    ++pos;
    index_t n;
    auto [ip, ierr] = std::from_chars(text.data() + pos, text.data() + text.size(), n);
    if (ierr != std::errc()) bad("vector literal: expected index", pos);
    pos = std::size_t(ip - text.data());
    if (n < 1 || n > kMaxIndex) bad("vector literal: index out of range", pos);
    pairs.push_back({n, c});
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != ',') bad("vector literal: expected ','", pos);
    ++pos;
  }
  return SpVec::from_pairs(std::move(pairs));
}

std::string format_vec(const SpVec& f) {
  std::string out;
  bool first = true;
  for (const auto& [n, c] : f.entries) {
    if (!first) out += ',';
    first = false;
    out += detail::fmt_double(c);
    out += '@';
    out += std::to_string(n);
  }
  return out;
}

}  // namespace greedylab
