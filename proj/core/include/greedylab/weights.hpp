#ifndef GREEDYLAB_WEIGHTS_HPP
#define GREEDYLAB_WEIGHTS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "greedylab/spvec.hpp"

namespace greedylab {

// Positive non-increasing weight w_1 >= w_2 >= ... > 0 together with its
// primitive s_n = w_1 + ... + w_n.  Three generators:
//   const:<c>                  w_n = c
//   pot:<a>, 0 < a <= 1        w_n = n^(a-1)
//   expl:[w1,...;tail=<c>]     explicit head, constant tail
// Primitive values are cached; the cache only grows.  Instances are
// logically immutable but the lazy cache is not synchronized, so keep
// each instance on one thread.
class WeightSpec {
 public:
  enum class Kind { Const, Pot, Expl };

  static WeightSpec constant(double c);
  static WeightSpec pot(double alpha);
  static WeightSpec expl(std::vector<double> head, double tail);

  Kind kind() const { return kind_; }
  double w(index_t n) const;
  double s(index_t n) const;        // s(0) = 0
  void ensure(index_t n) const;     // extend the primitive cache
  std::string label() const;        // grammar text, parse_weight round-trips

 private:
  WeightSpec() = default;
  Kind kind_ = Kind::Const;
  double c_ = 1.0;
  double alpha_ = 1.0;
  std::vector<double> head_;
  double tail_ = 1.0;
  mutable std::vector<double> prefix_;  // prefix_[n] = s(n)
};

WeightSpec parse_weight(const std::string& text);

// Exhaustive verdicts over the primitive s up to index N.
//   doubling  s_{2m} <= C s_m with the minimal empirical C
//   urp       exists b in {3..32} with s_{bm} <= (b/2) s_m for all bm <= N
//   lrp       exists b in {2..32} with 2 s_m <= s_{bm} for all bm <= N
//   regular   sup_{n<=N} (1/(n w_n)) sum_{k<=n} w_k stabilizes
// Witness b fields are 0 when the property fails.  regular_growing records
// whether the running sup still rose in the last half of the range; a
// stabilizing sup can keep a true flag while creeping toward its limit, so
// the regular verdict compares increments, not the flag.
struct WeightReport {
  index_t check_range = 0;
  bool doubling = false;
  double doubling_c = 0.0;
  bool urp = false;
  int urp_b = 0;
  bool lrp = false;
  int lrp_b = 0;
  bool regular = false;
  double regular_sup = 0.0;
  bool regular_growing = false;
};

WeightReport weight_report(const WeightSpec& w, index_t N);  // N >= 16

}  // namespace greedylab

#endif
