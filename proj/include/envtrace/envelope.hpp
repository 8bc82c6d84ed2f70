#pragma once

#include <functional>
#include <string>
#include <vector>

#include "envtrace/landscape.hpp"
#include "envtrace/pointwise.hpp"

namespace envtrace {

const char* to_string(CandidateSource s);

// One maximizer arc of the envelope: over a span of alpha the pointwise
// maximizer follows a single smooth locus — an interior root of the piece's
// w-derivative, a region-bounding curve, a domain edge, or (constant kind)
// a feasible cell.
struct ArcDescriptor {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  int region = -1;
  CandidateSource source = CandidateSource::cell;
  int boundary_index = -1;        // for boundary-sourced arcs
  double witness_alpha = 0.0;     // a sampled point on the arc
  double witness_w = 0.0;
  double witness_residual = 0.0;  // |defining equation| at the witness
  bool monotonic = false;  // single-branch certificate over 100 span samples
};

enum class BreakpointKind { discontinuity, kink, arc_switch };

const char* to_string(BreakpointKind k);

struct Breakpoint {
  double alpha = 0.0;
  BreakpointKind kind = BreakpointKind::arc_switch;
  double left_limit = 0.0;  // one-sided limits of the envelope value
  double right_limit = 0.0;
};

// Maximal interval between consecutive breakpoints, with the winning arc and
// the value statistics the oscillation threshold sweep needs.
struct Segment {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  int arc = -1;  // index into EnvelopeProfile::arcs
  double min_value = 0.0;
  double max_value = 0.0;
  double left_limit = 0.0;   // one-sided envelope values at the segment ends
  double right_limit = 0.0;
  std::vector<double> interior_extreme_values;  // local extrema inside the
                                                // open segment, refined
};

struct EnvelopeSample {
  double alpha = 0.0;
  double value = 0.0;
  double w = 0.0;  // reported maximizer (first coordinate when d > 1)
  int region = -1;
  CandidateSource source = CandidateSource::cell;
  double residual = 0.0;  // stationarity residual (numeric tracer)
};

struct LocalMax {
  double alpha = 0.0;
  double value = 0.0;
  double residual = 0.0;  // stationarity-system residual at the maximizer
  bool at_breakpoint = false;
};

// A solved stationarity candidate annotated with its active constraint set,
// so the regularity check can rebuild the square system at the point.
struct StationarityPoint {
  double alpha = 0.0;
  std::vector<double> w;
  int region = -1;
  std::vector<int> active_boundaries;  // boundary indices with h_j = 0
  std::vector<int> active_edges;       // w-axis indices pinned at a box face
};

struct TraceConfig {
  int samples_per_interval = 48;  // winner-scan density between events
  int alpha_samples = 2001;       // dense trace length / numeric alpha grid
  int multistarts = 32;           // numeric ascents per alpha
  double tol = 1e-9;
  double breakpoint_merge = 1e-10;  // alpha merge radius for near-coincident
                                    // breakpoints
  double discontinuity_rel = 1e-7;  // jump threshold, times the value scale
  unsigned long long seed = 0x7261636bULL;  // numeric multistart stream
};

struct EnvelopeProfile {
  std::vector<ArcDescriptor> arcs;
  std::vector<Breakpoint> breakpoints;
  std::vector<Segment> segments;
  std::vector<EnvelopeSample> samples;
  std::vector<LocalMax> local_maxima;
  std::vector<StationarityPoint> stationarity_points;
  int b1 = 0;              // discontinuity count
  int b2 = 0;              // strict interior local-max count
  bool estimated = false;  // numeric tracer: counts are heuristic
  double value_scale = 1.0;  // max(1, sup |u*|): relative-threshold unit
};

// Exact envelope of a one-parameter polynomial landscape. Critical and
// boundary curves are cut at their alpha-extreme points, pairwise
// intersections, and domain-edge crossings; between those events the winner
// is tracked by a dense scan with bisection, and every candidate breakpoint
// is classified from one-sided limits (jump / derivative kink / arc switch,
// spurious candidates dropped). Strict interior local maxima come from
// per-arc stationarity systems solved in exact arithmetic, plus one-sided
// probes at the breakpoints; plateau components (where the piece is
// stationary along a whole curve) contribute values but no strict maxima.
EnvelopeProfile trace_envelope_1d(const Landscape& l,
                                  const TraceConfig& cfg = {});

// Envelope of a piecewise-constant landscape: piecewise constant in alpha
// with jumps at region alpha-extent endpoints. Exact for d = 1 via boundary
// curve analysis; estimated by grid probing for d >= 2. B2 is 0 by
// definition: a piecewise-constant envelope has plateaus, never strict
// maxima.
EnvelopeProfile trace_envelope_constant(const Landscape& l,
                                        const TraceConfig& cfg = {});

// Numeric envelope for any parameter dimension: per alpha-grid point,
// multistart coordinate ascent over the box, winner across regions, with a
// Lagrangian residual attached to each reported maximizer. Breakpoints and
// counts are inferred from grid jumps and flagged estimated.
EnvelopeProfile trace_envelope_numeric(const Landscape& l,
                                       const TraceConfig& cfg = {});
EnvelopeProfile trace_envelope_numeric_serial(const Landscape& l,
                                              const TraceConfig& cfg = {});

// Black-box variant of the numeric tracer for dual functions whose pieces
// are not polynomial: maximizes the callback f(alpha, w) over the box.
EnvelopeProfile trace_envelope_numeric(
    const std::function<double(double, const std::vector<double>&)>& f,
    const DomainBox& box, const TraceConfig& cfg = {});

// CSV emitters (RFC 4180, LF line endings, header row first).
std::string envelope_csv(const EnvelopeProfile& p);
std::string breakpoints_csv(const EnvelopeProfile& p);
std::string localmaxima_csv(const EnvelopeProfile& p);

}  // namespace envtrace
