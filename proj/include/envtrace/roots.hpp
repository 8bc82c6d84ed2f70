#pragma once

#include "envtrace/polynomial.hpp"
#include "envtrace/rational.hpp"

#include <vector>

namespace envtrace {

// A real root certified by an isolating interval: the polynomial has exactly
// one distinct root inside [lo, hi], and for odd multiplicity its sign
// differs at the endpoints. Width is at most the isolation tolerance unless
// the root is exact (lo == hi).
struct RealRoot {
  Rational lo;
  Rational hi;
  int multiplicity = 1;

  double mid() const { return to_double((lo + hi) / 2); }
};

struct RootsResult {
  // Set when the input polynomial is identically zero: the caller is in a
  // plateau case (every point is a root) and must handle it explicitly.
  bool identically_zero = false;
  std::vector<RealRoot> roots;  // sorted by interval, distinct
};

inline constexpr double kDefaultIsolationWidth = 1e-12;

// All distinct real roots of a univariate polynomial in [lo, hi], certified
// by Sturm-sequence sign counting on the square-free part and refined by
// bisection to `isolation_width`. Multiplicities come from the square-free
// decomposition. `var` selects which variable the polynomial lives in.
RootsResult real_roots_univariate(const Polynomial& p, int var,
                                  const Rational& lo, const Rational& hi,
                                  double isolation_width =
                                      kDefaultIsolationWidth);

// Fast double-precision variant for inner loops: all real roots of the
// dense-coefficient polynomial (coeffs[k] multiplies x^k) in [lo, hi],
// found by recursive derivative bracketing + bisection. Roots are
// approximate (~1e-13 relative); near-multiple roots may merge.
std::vector<double> real_roots_dense(const std::vector<double>& coeffs,
                                     double lo, double hi);

// Horner evaluation of a dense-coefficient polynomial.
double eval_dense(const std::vector<double>& coeffs, double x);

}  // namespace envtrace
