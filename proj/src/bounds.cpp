#include "envtrace/bounds.hpp"

#include <cmath>

#include "envtrace/error.hpp"

namespace envtrace {

namespace {

void finish_composite_figures(BoundFigures* figures) {
  figures->oscillation_bound =
      2.0 * figures->local_max_bound + 3.0 * figures->discontinuity_bound + 2.0;
  figures->pdim_bound_order = std::log2(figures->oscillation_bound);
}

}  // namespace

double warren_components(int degree, int nvars) {
  if (degree < 1) fail_input("warren_components: degree must be >= 1");
  if (nvars < 1) fail_input("warren_components: nvars must be >= 1");
  return 2.0 * std::pow(static_cast<double>(degree), nvars);
}

double warren_partition_bound(int n_polys, int degree, int nvars, double c) {
  if (nvars < 1) fail_input("warren_partition_bound: nvars must be >= 1");
  if (n_polys < nvars) {
    fail_input("warren_partition_bound: requires n_polys >= nvars");
  }
  if (degree < 1) fail_input("warren_partition_bound: degree must be >= 1");
  double base = static_cast<double>(n_polys) * degree / nvars;
  return c * std::pow(base, nvars);
}

BoundFigures single_piece_bounds(int piece_degree) {
  if (piece_degree < 1) fail_input("single_piece_bounds: degree must be >= 1");
  const double d = piece_degree;
  BoundFigures figures;
  figures.formula_id = "single-piece-1d";
  figures.discontinuity_bound = (d - 1.0) * (d - 2.0) + 4.0 * d;
  figures.local_max_bound = d * d + (d - 1.0) * (d - 2.0) + 2.0 * d;
  finish_composite_figures(&figures);
  return figures;
}

BoundFigures multi_piece_bounds(int n_regions, int n_boundaries, int d,
                                int degree) {
  if (n_regions < 1) fail_input("multi_piece_bounds: n_regions must be >= 1");
  if (n_boundaries < 0) {
    fail_input("multi_piece_bounds: n_boundaries must be >= 0");
  }
  if (d < 1) fail_input("multi_piece_bounds: d must be >= 1");
  if (degree < 1) fail_input("multi_piece_bounds: degree must be >= 1");
  const double n = n_regions;
  const double m = n_boundaries;
  const double delta = degree;
  const double subset_factor =
      n_boundaries == 0 ? 1.0
                        : std::pow(std::exp(1.0) * m / (d + 1), d + 1);
  BoundFigures figures;
  figures.formula_id = "multi-piece-general";
  figures.discontinuity_bound =
      n * std::pow(delta, 4 * d + 2) * subset_factor +
      n * m * std::pow(2.0 * delta, 2 * d + 2) * subset_factor;
  figures.local_max_bound = n * std::pow(delta, 4 * d + 3) * subset_factor;
  finish_composite_figures(&figures);
  return figures;
}

}  // namespace envtrace
