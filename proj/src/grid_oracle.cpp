#include "envtrace/grid_oracle.hpp"

#include <cmath>
#include <limits>

#include "envtrace/error.hpp"
#include "envtrace/fasteval.hpp"
#include "envtrace/roots.hpp"

namespace envtrace {

namespace {

// Max over the w-grid at one alpha, d = 1 fast path: boundaries and the
// matching piece are evaluated from per-alpha dense w-coefficients.
double row_max_1d(const CompiledLandscape& c, double alpha, int resolution,
                  std::vector<std::vector<double>>* piece_scratch,
                  std::vector<std::vector<double>>* boundary_scratch) {
  auto& pieces = *piece_scratch;
  auto& bounds = *boundary_scratch;
  pieces.resize(c.pieces_1d.size());
  bounds.resize(c.boundaries_1d.size());
  for (std::size_t i = 0; i < c.pieces_1d.size(); ++i) {
    c.pieces_1d[i].slice(alpha, &pieces[i]);
  }
  for (std::size_t b = 0; b < c.boundaries_1d.size(); ++b) {
    c.boundaries_1d[b].slice(alpha, &bounds[b]);
  }
  const double w_lo = c.w_ranges[0].first;
  const double w_span = c.w_ranges[0].second - w_lo;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < resolution; ++j) {
    double w = w_lo + w_span * j / (resolution - 1);
    int winner = -1;
    for (std::size_t r = 0; r < c.signs.size() && winner < 0; ++r) {
      bool match = true;
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        BoundarySign s = c.signs[r][b];
        if (s == BoundarySign::free) continue;
        double h = eval_dense(bounds[b], w);
        if (s == BoundarySign::le ? h > 0.0 : h < 0.0) {
          match = false;
          break;
        }
      }
      if (match) winner = static_cast<int>(r);
    }
    if (winner < 0) continue;
    double v = eval_dense(pieces[static_cast<std::size_t>(winner)], w);
    if (v > best) best = v;
  }
  return best;
}

// General-d row max: odometer over the w-grid.
double row_max_general(const CompiledLandscape& c, double alpha,
                       int resolution) {
  const int d = c.d;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d) + 1);
  x[0] = alpha;
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (int z = 0; z < d; ++z) {
      const auto& [lo, hi] = c.w_ranges[static_cast<std::size_t>(z)];
      x[static_cast<std::size_t>(z) + 1] =
          lo + (hi - lo) * idx[static_cast<std::size_t>(z)] / (resolution - 1);
    }
    double v = c.eval(x);
    if (v > best) best = v;
    int z = d - 1;
    while (z >= 0 && ++idx[static_cast<std::size_t>(z)] == resolution) {
      idx[static_cast<std::size_t>(z)] = 0;
      --z;
    }
    if (z < 0) break;
  }
  return best;
}

GridTrace run(const Landscape& l, int resolution, bool parallel) {
  if (resolution < 2) fail_input("grid resolution must be >= 2");
  if (std::pow(static_cast<double>(resolution), l.d()) > 5e8) {
    fail_input("w-grid too large (" + std::to_string(resolution) + "^" +
               std::to_string(l.d()) + " points); lower the resolution");
  }
  const CompiledLandscape c = CompiledLandscape::compile(l);
  GridTrace trace;
  trace.alphas.resize(static_cast<std::size_t>(resolution));
  trace.values.resize(static_cast<std::size_t>(resolution));
  const double a_lo = c.alpha_lo;
  const double a_span = c.alpha_hi - c.alpha_lo;
  for (int k = 0; k < resolution; ++k) {
    trace.alphas[static_cast<std::size_t>(k)] =
        a_lo + a_span * k / (resolution - 1);
  }

  if (c.d == 1) {
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < resolution; ++k) {
      std::vector<std::vector<double>> piece_scratch, boundary_scratch;
      trace.values[static_cast<std::size_t>(k)] =
          row_max_1d(c, trace.alphas[static_cast<std::size_t>(k)], resolution,
                     &piece_scratch, &boundary_scratch);
    }
  } else {
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int k = 0; k < resolution; ++k) {
      trace.values[static_cast<std::size_t>(k)] =
          row_max_general(c, trace.alphas[static_cast<std::size_t>(k)],
                          resolution);
    }
  }
  return trace;
}

}  // namespace

GridTrace grid_oracle(const Landscape& l, int resolution) {
  return run(l, resolution, true);
}

GridTrace grid_oracle_serial(const Landscape& l, int resolution) {
  return run(l, resolution, false);
}

}  // namespace envtrace
