#pragma once

#include <vector>

#include "envtrace/landscape.hpp"

namespace envtrace {

// Dense envelope trace from brute force: for each alpha on the grid, the max
// of the landscape over the full w-grid. Deliberately independent of the
// tracer machinery so the two can cross-validate each other.
struct GridTrace {
  std::vector<double> alphas;
  std::vector<double> values;
};

// resolution points per axis (>= 2, endpoints included). Throws Error(input)
// when the w-grid would be unreasonably large (the guard that matters from
// d = 4 up). Parallel over alpha rows; bit-identical to grid_oracle_serial.
GridTrace grid_oracle(const Landscape& l, int resolution);

// Serial reference implementation, kept for testing the parallel kernel and
// for the kernel benchmark.
GridTrace grid_oracle_serial(const Landscape& l, int resolution);

}  // namespace envtrace
