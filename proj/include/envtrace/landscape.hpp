#pragma once

#include <string>
#include <utility>
#include <vector>

#include "envtrace/polynomial.hpp"
#include "envtrace/rational.hpp"

namespace envtrace {

// Axis-aligned domain: alpha ranges over [alpha_lo, alpha_hi] and w over the
// product of w_ranges. Endpoints are exact rationals so files round-trip.
struct DomainBox {
  Rational alpha_lo;
  Rational alpha_hi;
  std::vector<std::pair<Rational, Rational>> w_ranges;

  int d() const { return static_cast<int>(w_ranges.size()); }
  int nvars() const { return d() + 1; }

  // True when (alpha, w) lies in the box, with a tiny relative slack per axis
  // so grid endpoints computed in floating point are not rejected.
  bool contains(double alpha, const std::vector<double>& w) const;

  bool operator==(const DomainBox&) const = default;
};

// Relation a region requires against one boundary polynomial h: the region
// lies where h <= 0, where h >= 0, or anywhere (h irrelevant).
enum class BoundarySign { le, ge, free };

struct Region {
  std::vector<BoundarySign> signs;  // one entry per boundary
  Polynomial piece;                 // constant-kind pieces are degree-0

  bool operator==(const Region&) const = default;
};

enum class LandscapeKind { polynomial, constant };

// A piecewise function f(alpha, w) over a box: M boundary polynomials cut the
// box into regions, each carrying a polynomial (or constant) piece. Region
// membership is decided by the boundary sign conditions, first match wins;
// regions are closed, so boundary points may satisfy several regions and the
// file order is part of the format.
struct Landscape {
  DomainBox domain;
  LandscapeKind kind = LandscapeKind::polynomial;
  std::vector<Polynomial> boundaries;
  std::vector<Region> regions;
  int piece_degree = 0;     // max total degree over pieces
  int boundary_degree = 0;  // max total degree over boundaries (0 if none)

  int d() const { return domain.d(); }
  int nvars() const { return domain.nvars(); }
  int num_regions() const { return static_cast<int>(regions.size()); }
  int num_boundaries() const { return static_cast<int>(boundaries.size()); }

  bool operator==(const Landscape&) const = default;
};

// Recomputes the derived degree fields and checks every structural
// invariant, including the coverage probe; throws Error(input) on violation.
// load_landscape calls this; generators call it on freshly built values.
void validate_landscape(Landscape* l);

// Parses and validates a landscape from JSON text (see docs/landscape-schema
// in the README: version, domain, kind, boundaries, regions; all numbers are
// exact rational strings). Errors carry field paths.
Landscape load_landscape(const std::string& json_text);
Landscape load_landscape_file(const std::string& path);

// Serializes with exact rational strings; load(save(l)) == l.
std::string save_landscape(const Landscape& l);
void save_landscape_file(const Landscape& l, const std::string& path);

// Index of the first region whose sign conditions hold at (alpha, w), or -1
// when none matches. Comparisons are exact in double; pass slack > 0 to
// accept |h| <= slack * scale(h) as "on the boundary" (used by the coverage
// probe to absorb roundoff).
int region_at(const Landscape& l, double alpha, const std::vector<double>& w,
              double slack = 0.0);

// Value of the first matching region's piece. Throws Error(input) when the
// point is outside the box or no region covers it.
double evaluate_landscape(const Landscape& l, double alpha,
                          const std::vector<double>& w);

// Exact-arithmetic evaluation at a rational point (sign tests and piece
// evaluation all in rational arithmetic).
Rational evaluate_landscape_exact(const Landscape& l, const Rational& alpha,
                                  const std::vector<Rational>& w);

// A perturbed landscape together with the certified sup-norm envelope drift
// bound 2*tau*C, C = (d+1) * max coordinate magnitude of the box.
struct PerturbedLandscape {
  Landscape landscape;
  Rational drift_bound;
};

// Adds tau * (alpha + sum_z w_z) to every piece; boundaries unchanged. The
// tilt breaks degenerate ties between stationary points without moving the
// envelope more than drift_bound anywhere. Requires polynomial kind, tau > 0.
PerturbedLandscape perturb_landscape(const Landscape& l, const Rational& tau);

// Replaces every piece f by f - eta * ||w-Hessian of f||_F^2, penalizing
// sharp curvature in w; boundaries and the region table are preserved and
// piece degrees stay <= 2 * piece_degree. Requires polynomial kind, eta > 0.
Landscape flatness_surrogate(const Landscape& l, const Rational& eta);

}  // namespace envtrace
