#ifndef GREEDYLAB_SPVEC_HPP
#define GREEDYLAB_SPVEC_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace greedylab {

using index_t = std::int64_t;

// Finitely supported coefficient sequence over indices 1,2,3,...
// Entries are kept sorted by index and never store an exact zero, so
// support_size() is the true support cardinality and coef() off the
// support returns 0 exactly.
struct SpVec {
  std::vector<std::pair<index_t, double>> entries;

  bool empty() const { return entries.empty(); }
  std::size_t support_size() const { return entries.size(); }
  index_t max_index() const { return entries.empty() ? 0 : entries.back().first; }

  double coef(index_t n) const;
  void set(index_t n, double c);  // c == 0 erases the entry

  std::vector<index_t> support() const;

  SpVec& operator*=(double t);
  bool operator==(const SpVec&) const = default;

  // Rejects duplicate indices and indices < 1, drops zeros, sorts.
  static SpVec from_pairs(std::vector<std::pair<index_t, double>> pairs);
};

SpVec add(const SpVec& f, const SpVec& g);
SpVec add_scaled(const SpVec& f, double t, const SpVec& g);  // f + t*g
SpVec restrict_to(const SpVec& f, const std::vector<index_t>& idx);

// |coefficients| sorted descending; length = support size.
std::vector<double> nonincreasing_rearrangement(const SpVec& f);

// Sign assignment on a finite index set, every value +1 or -1.
struct SignPattern {
  std::vector<std::pair<index_t, int>> signs;

  int at(index_t n) const;  // 0 off the domain
  static SignPattern from_pairs(std::vector<std::pair<index_t, int>> pairs);
};

SpVec indicator(const std::vector<index_t>& idx);
// Indices missing from eps get +1.
SpVec signed_indicator(const std::vector<index_t>& idx, const SignPattern& eps);

// Literal form "<coef>@<index>,..." with indices >= 1 and no repeats.
// format_vec emits shortest round-trip decimals, so
// parse_vec(format_vec(f)) == f bit for bit.
SpVec parse_vec(const std::string& text);
std::string format_vec(const SpVec& f);

}  // namespace greedylab

#endif
