#ifndef GREEDYLAB_SPACES_HPP
#define GREEDYLAB_SPACES_HPP

#include <memory>
#include <string>
#include <vector>

#include "greedylab/spvec.hpp"
#include "greedylab/weights.hpp"

namespace greedylab {

// One quasi-norm from the space zoo.  Built by parse_space, immutable
// afterwards.  p_exponent is the exponent the p-triangle inequality is
// declared at; for rearrangement norms with q < inf it follows the
// d_{p,q}(w) = d_{q,q}(grad s^{q/p}) reduction, for q = inf it is the
// largest grid value passing a sampled certificate.
struct SpaceSpec {
  enum class Kind { Lp, C0, Lorentz, Marcin, Garling, Vp, Sw, Kt, Dsum, Mixed };

  Kind kind = Kind::Lp;
  double p = 1.0;  // lp/lorentz/garling/vp/mixed inner exponent
  double q = 1.0;  // lorentz/mixed outer exponent, may be +inf
  WeightSpec weight = WeightSpec::constant(1.0);
  std::vector<std::shared_ptr<const SpaceSpec>> parts;  // kt: 1 inner, dsum: >= 2
  std::vector<index_t> blocks;                          // mixed block lengths

  double p_exponent = 1.0;
  bool lattice_unconditional = false;
  bool symmetric = false;
  std::string label;  // canonical grammar text, parse_space round-trips
};

using SpacePtr = std::shared_ptr<const SpaceSpec>;

// Grammar:
//   lp:<p>  (p in (0,inf], "inf" accepted) | c0
//   lorentz:p=<p>,q=<q|inf>,w=<W> | marcin:w=<W> | garling:p=<p>,w=<W>
//   vp:<p>  (p in (0,1]) | sw:w=<W>
//   kt(<space> ; w=<W>) | dsum(<space>,<space>,...) |
//   mixed:q=<q>,p=<p>,blocks=<n1,n2,...>
// with <W> = const:<c> | pot:<a> | expl:[w1,...;tail=<c>].
// Errors carry the offending position.
SpacePtr parse_space(const std::string& text);

double norm(const SpaceSpec& X, const SpVec& f);

// (sum_{n<=m} s_n^{q/p-1} w_n)^{1/q}; for q = inf, s_m^{1/p}.
double fundamental_lorentz(double p, double q, const WeightSpec& w, index_t m);

// Ratios ||A_d f||_{1,inf,w} / ||f||_{1,q,w} over the sample family, where
// (A_d f)_n = (1/n) sum_{k<=n} f_k, evaluated on an 8x support horizon.
// increasing = ratios strictly increase in the sample order, the signature
// of an unbounded Hardy operator along a doubling schedule.
struct HardyReport {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  bool increasing = false;
};

HardyReport hardy_check(const WeightSpec& w, double q, const std::vector<SpVec>& samples);

// Harmonic prefixes f_L = (1, 1/2, ..., 1/L), one per requested length.
// Under A_d these grow a logarithmic factor exactly when 1/s is not
// regular, which makes them the canonical hardy_check schedule.
std::vector<SpVec> hardy_harmonic_family(const std::vector<index_t>& lengths);

}  // namespace greedylab

#endif
