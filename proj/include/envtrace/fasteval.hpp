#pragma once

#include <vector>

#include "envtrace/landscape.hpp"

namespace envtrace {

// A bivariate polynomial flattened to double precision and organized by
// w-power: slice(alpha) produces the dense coefficients of the resulting
// univariate polynomial in w, after which grid sweeps run at Horner speed.
struct CompiledPoly {
  // alpha_coeffs[k] holds the dense (ascending) alpha-coefficients of the
  // w^k coefficient.
  std::vector<std::vector<double>> alpha_coeffs;

  static CompiledPoly from(const Polynomial& p);

  int w_degree() const { return static_cast<int>(alpha_coeffs.size()) - 1; }

  // Fills *out with the dense w-coefficients at this alpha.
  void slice(double alpha, std::vector<double>* out) const;

  double eval(double alpha, double w) const;
};

// General-d flattened term list (used where no per-variable structure helps).
struct CompiledTerms {
  std::vector<Monomial> monomials;
  std::vector<double> coefficients;

  static CompiledTerms from(const Polynomial& p);

  // x = (alpha, w_1, ..., w_d)
  double eval(const std::vector<double>& x) const;
};

// A landscape flattened for grid sweeps: pieces and boundaries in both the
// w-sliced (d = 1) and general term forms, plus the region sign table.
struct CompiledLandscape {
  int d = 1;
  LandscapeKind kind = LandscapeKind::polynomial;
  double alpha_lo = 0.0, alpha_hi = 1.0;
  std::vector<std::pair<double, double>> w_ranges;
  std::vector<std::vector<BoundarySign>> signs;       // per region
  std::vector<CompiledPoly> pieces_1d, boundaries_1d; // d == 1 only
  std::vector<CompiledTerms> pieces, boundaries;      // any d

  static CompiledLandscape compile(const Landscape& l);

  // First matching region at the point, or -1. No box check.
  int region_of(const std::vector<double>& x) const;

  // evaluate_landscape at double speed; returns the first matching region's
  // piece value, or -inf when nothing matches (callers on valid landscapes
  // never see that).
  double eval(const std::vector<double>& x) const;
};

}  // namespace envtrace
