#pragma once

#include <vector>

#include "envtrace/fasteval.hpp"
#include "envtrace/landscape.hpp"

namespace envtrace {

// Where a candidate maximizer of f(alpha, .) comes from: an interior root of
// the piece's w-derivative, a point on a region-bounding curve, a domain
// edge, or (constant pieces) a representative of a feasible cell.
enum class CandidateSource { critical, boundary, edge_low, edge_high, cell };

struct EnvelopeCandidate {
  double w = 0.0;
  double value = 0.0;
  int region = -1;
  CandidateSource source = CandidateSource::cell;
  int curve = -1;   // boundary index for boundary-sourced candidates
  int branch = 0;   // root index of the defining univariate at this alpha
};

struct PointwiseEnvelope {
  double value = 0.0;  // u*(alpha)
  EnvelopeCandidate winner;
  std::vector<EnvelopeCandidate> candidates;  // every feasible candidate
};

// u*(alpha) = max_w f(alpha, w) for a one-parameter landscape at one alpha,
// with the full candidate list: per region, the feasible w-axis is cut at
// boundary roots and box edges, and the piece is maximized over each cell
// (cell endpoints plus interior critical roots). Works for both kinds.
PointwiseEnvelope envelope_at(const CompiledLandscape& c, double alpha);

// Convenience wrappers that compile on the fly (fine for scattered calls;
// hot loops should compile once).
PointwiseEnvelope envelope_at(const Landscape& l, double alpha);
double envelope_value(const Landscape& l, double alpha);

}  // namespace envtrace
