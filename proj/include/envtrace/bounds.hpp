#pragma once

#include <string>

namespace envtrace {

// Closed-form ceilings on envelope complexity: how many discontinuities and
// strict interior local maxima u*(alpha) = sup_w f(alpha, w) can have, the
// induced oscillation ceiling 2*local_max + 3*disc + 2, and its log2 (the
// order of the pseudo-dimension bound it yields).
struct BoundFigures {
  double discontinuity_bound = 0.0;
  double local_max_bound = 0.0;
  double oscillation_bound = 0.0;
  double pdim_bound_order = 0.0;
  std::string formula_id;
};

// Maximum number of connected components of the zero set of one n-variate
// polynomial of the given degree: 2 * degree^n.
double warren_components(int degree, int nvars);

// Component-count ceiling for the sign arrangement of n_polys polynomials of
// the given degree in nvars variables: c * (n_polys * degree / nvars)^nvars.
// The constant c is caller-supplied (default 1) because the underlying bound
// is stated up to an unspecified constant. Requires n_polys >= nvars.
double warren_partition_bound(int n_polys, int degree, int nvars,
                              double c = 1.0);

// Ceilings for a single polynomial piece of the given total degree over a
// one-dimensional parameter: exact critical-curve analysis of the piece gives
//   discontinuities  <= (D-1)(D-2) + 4D   (alpha-extreme + box-edge events)
//   local maxima     <= D^2 + (D-1)(D-2) + 2D  (both stationarity systems
//                                               plus box-edge roots)
BoundFigures single_piece_bounds(int piece_degree);

// Ceilings for n_regions pieces cut by n_boundaries degree-<=D polynomials in
// d parameter dimensions, via arrangement counting with unit constants:
//   disc   = N*D^(4d+2)*F + N*M*(2D)^(2d+2)*F
//   locmax = N*D^(4d+3)*F
// where F = (e*M/(d+1))^(d+1), replaced by 1 when M = 0 (the factor counts
// boundary-subset choices and is vacuous without boundaries).
BoundFigures multi_piece_bounds(int n_regions, int n_boundaries, int d,
                                int degree);

}  // namespace envtrace
