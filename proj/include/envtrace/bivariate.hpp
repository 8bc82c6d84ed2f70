#pragma once

#include "envtrace/polynomial.hpp"

#include <vector>

namespace envtrace {

struct Box2 {
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
  double w_lo = -1.0;
  double w_hi = 1.0;
};

struct BivariatePoint {
  double alpha = 0.0;
  double w = 0.0;
  double residual = 0.0;  // max(|p|, |q|) at the point, double evaluation
};

struct BivariateSolution {
  std::vector<BivariatePoint> points;  // isolated common zeros, sorted by alpha
  // Set when p and q share a nonconstant factor: the zero set contains a
  // whole curve (the gcd's zero set) on which the caller must apply its
  // plateau handling; `points` then holds the cofactor system's zeros.
  bool shared_curve = false;
  Polynomial shared_factor{2};
};

// Greatest common divisor up to a scalar, normalized to primitive with a
// positive leading coefficient; returns 1 for coprime inputs.
Polynomial poly_gcd(const Polynomial& p, const Polynomial& q);

// Exact division; fails if `d` does not divide `p`.
Polynomial exact_divide(const Polynomial& p, const Polynomial& d);

// Resultant of p and q with respect to `elim_var`, a polynomial in the
// remaining variables. Computed by evaluation/interpolation with sample
// points that avoid leading-coefficient vanishing.
Polynomial resultant_wrt(const Polynomial& p, const Polynomial& q,
                         int elim_var);

// All isolated common real zeros of p(alpha, w) = q(alpha, w) = 0 inside the
// box. Shared nonconstant factors are divided out and flagged. Residuals of
// returned points are at most `tol` times the coefficient scale.
BivariateSolution solve_bivariate(const Polynomial& p, const Polynomial& q,
                                  const Box2& box, double tol = 1e-9);

}  // namespace envtrace
