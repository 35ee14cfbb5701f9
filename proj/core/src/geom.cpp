#include "greedylab/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace greedylab {

GeomConstants geom_constants(double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geom_constants: p must lie in (0,1]");
  double A = std::pow(std::pow(2.0, p) - 1.0, -1.0 / p);
  return {p, A, std::pow(2.0, 1.0 / p) * A};
}

namespace {

// Golden-section refinement of a bracket [a,b] around a local minimum.
double golden(const auto& F, double a, double b) {
  constexpr double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = F(c), fd = F(d);
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = F(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = F(d);
    }
    if (b - a < 1e-15 * std::max(1.0, a)) break;
  }
  if (b - a > 1e-9 * std::max(a, 1e-9))
    throw std::runtime_error("eta_p: minimizer did not converge");
  return F(0.5 * (a + b));
}

}  // namespace

double eta_p(double p, double u) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("eta_p: p must lie in (0,1]");
  if (!(u > 0.0)) throw std::invalid_argument("eta_p: u must be positive");
  const double Apu = geom_constants(p).A * u;
  auto F = [p, Apu](double t) {
    return std::pow(1.0 - std::pow(t, p), -1.0 / p) *
           std::pow(1.0 - std::pow(1.0 + t / Apu, -p), -1.0 / p);
  };

  // Coarse scan on a log-spaced grid, then golden sections from the three
  // best grid neighborhoods.  The objective blows up at both endpoints and
  // is unimodal in every regime exercised here; the restarts guard against
  // a flat coarse minimum.
  constexpr int kGrid = 4001;
  const double lo = std::log(1e-9), hi = std::log(1.0 - 1e-9);
  std::vector<double> ts(kGrid), vals(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    ts[i] = std::exp(lo + (hi - lo) * i / (kGrid - 1));
    vals[i] = F(ts[i]);
  }
  std::array<int, 3> best = {0, 0, 0};
  {
    std::vector<int> order(kGrid);
    for (int i = 0; i < kGrid; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                      [&](int a, int b) { return vals[a] < vals[b]; });
    std::copy(order.begin(), order.begin() + 3, best.begin());
  }
  double result = vals[best[0]];
  for (int i : best) {
    double a = ts[std::max(0, i - 1)];
    double b = ts[std::min(kGrid - 1, i + 1)];
    result = std::min(result, golden(F, a, b));
  }
  if (!(result >= 1.0) || !std::isfinite(result))
    throw std::runtime_error("eta_p: minimizer returned an invalid value");
  return result;
}

}  // namespace greedylab
