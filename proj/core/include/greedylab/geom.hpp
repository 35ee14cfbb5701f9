#ifndef GREEDYLAB_GEOM_HPP
#define GREEDYLAB_GEOM_HPP

namespace greedylab {

// Convexity constants of a p-normed field, 0 < p <= 1.
//   A = (2^p - 1)^(-1/p),  B = 2^(1/p) * A.
struct GeomConstants {
  double p;
  double A;
  double B;
};

// Rejects p outside (0,1].
GeomConstants geom_constants(double p);

// min over 0<t<1 of (1-t^p)^(-1/p) * (1-(1+t/(A_p u))^(-p))^(-1/p).
// Bracketed 1-D minimization to relative tolerance 1e-9; always >= 1,
// nondecreasing in u.  Throws on out-of-range arguments and on
// non-convergence of the minimizer.
double eta_p(double p, double u);

}  // namespace greedylab

#endif
