#pragma once

#include <string>
#include <vector>

#include "envtrace/envelope.hpp"
#include "envtrace/landscape.hpp"

namespace envtrace {

// Rank report for the stationarity system at one solved point. The system
// stacks the Lagrangian gradient (piece gradient plus multipliers on the
// active boundaries and box faces) with the active constraint equations; a
// well-posed solve needs the Jacobian with respect to (w, lambda) to have
// full rank d + S, where S counts active constraints.
struct RegularityPointReport {
  StationarityPoint point;
  int required_rank = 0;
  int rank = 0;
  double min_singular = 0.0;  // smallest singular value kept by the rank
  bool deficient = false;
};

struct RegularityReport {
  std::vector<RegularityPointReport> points;
  bool all_regular = true;
  // Non-empty when deficient: suggests re-running on a tilted landscape.
  std::string recommendation;
};

RegularityReport check_regularity(const Landscape& l,
                                  const std::vector<StationarityPoint>& pts,
                                  double threshold = 1e-6);

}  // namespace envtrace
