#include "envtrace/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "envtrace/bivariate.hpp"
#include "envtrace/error.hpp"
#include "envtrace/roots.hpp"

namespace envtrace {

const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::critical: return "critical";
    case CandidateSource::boundary: return "boundary";
    case CandidateSource::edge_low: return "edge_low";
    case CandidateSource::edge_high: return "edge_high";
    case CandidateSource::cell: return "cell";
  }
  return "?";
}

const char* to_string(BreakpointKind k) {
  switch (k) {
    case BreakpointKind::discontinuity: return "discontinuity";
    case BreakpointKind::kink: return "kink";
    case BreakpointKind::arc_switch: return "arc_switch";
  }
  return "?";
}

namespace {

constexpr int kAlpha = 0;
constexpr int kW = 1;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Event collection: alpha values where the cell/arc structure can change.

struct EventContext {
  Box2 box;
  Rational alo, ahi, wlo, whi;
  std::vector<double> events;
};

void add_alpha_roots(const Polynomial& p, EventContext* ctx) {
  if (p.is_zero() || p.is_constant()) return;
  RootsResult r = real_roots_univariate(p, kAlpha, ctx->alo, ctx->ahi);
  if (r.identically_zero) return;
  for (const auto& root : r.roots) ctx->events.push_back(root.mid());
}

// General solver for a 2x2 polynomial system over the domain box, covering
// the degenerate shapes a resultant cannot: inputs that are effectively
// univariate describe full vertical/horizontal solution lines instead of
// isolated points.
struct SystemSolution {
  std::vector<BivariatePoint> points;
  std::vector<double> alpha_lines;  // vertical lines of solutions
  bool plateau = false;             // a shared curve component exists
  Polynomial shared{2};
};

void solve_system(const Polynomial& p0, const Polynomial& q0,
                  EventContext* ctx, SystemSolution* out) {
  if (p0.is_zero() || q0.is_zero() || p0.is_constant() || q0.is_constant())
    return;  // callers treat zero inputs as plateaus before calling
  int vp = -1, vq = -1;
  const bool up = p0.effective_univariate(&vp, kAlpha);
  const bool uq = q0.effective_univariate(&vq, kAlpha);
  if (up && uq) {
    if (vp == vq) {
      Polynomial g = poly_gcd(p0, q0);
      if (g.is_constant()) return;  // no common roots
      if (vp == kAlpha) {
        RootsResult r = real_roots_univariate(g, kAlpha, ctx->alo, ctx->ahi);
        if (!r.identically_zero)
          for (const auto& root : r.roots)
            out->alpha_lines.push_back(root.mid());
      } else {
        out->plateau = true;  // horizontal solution lines
        out->shared = g;
      }
      return;
    }
    const Polynomial& pa = vp == kAlpha ? p0 : q0;
    const Polynomial& pw = vp == kAlpha ? q0 : p0;
    RootsResult ra = real_roots_univariate(pa, kAlpha, ctx->alo, ctx->ahi);
    RootsResult rw = real_roots_univariate(pw, kW, ctx->wlo, ctx->whi);
    if (ra.identically_zero || rw.identically_zero) return;
    for (const auto& a : ra.roots)
      for (const auto& w : rw.roots)
        out->points.push_back({a.mid(), w.mid(), 0.0});
    return;
  }
  if (up) {
    if (vp == kAlpha) {
      RootsResult ra = real_roots_univariate(p0, kAlpha, ctx->alo, ctx->ahi);
      if (ra.identically_zero) return;
      for (const auto& a : ra.roots) {
        Polynomial slice = q0.substituted(kAlpha, (a.lo + a.hi) / 2);
        if (slice.is_zero()) {
          out->alpha_lines.push_back(a.mid());
          continue;
        }
        if (slice.is_constant()) continue;
        RootsResult rw = real_roots_univariate(slice, kW, ctx->wlo, ctx->whi);
        if (rw.identically_zero) continue;
        for (const auto& w : rw.roots)
          out->points.push_back({a.mid(), w.mid(), 0.0});
      }
    } else {
      RootsResult rw = real_roots_univariate(p0, kW, ctx->wlo, ctx->whi);
      if (rw.identically_zero) return;
      for (const auto& w : rw.roots) {
        Polynomial slice = q0.substituted(kW, (w.lo + w.hi) / 2);
        if (slice.is_zero()) {
          out->plateau = true;  // horizontal solution line
          continue;
        }
        if (slice.is_constant()) continue;
        RootsResult ra = real_roots_univariate(slice, kAlpha, ctx->alo, ctx->ahi);
        if (ra.identically_zero) continue;
        for (const auto& a : ra.roots)
          out->points.push_back({a.mid(), w.mid(), 0.0});
      }
    }
    return;
  }
  if (uq) {
    solve_system(q0, p0, ctx, out);
    return;
  }
  BivariateSolution s = solve_bivariate(p0, q0, ctx->box);
  for (const auto& pt : s.points) out->points.push_back(pt);
  if (s.shared_curve) {
    out->plateau = true;
    out->shared = s.shared_factor;
    int vs = -1;
    if (s.shared_factor.effective_univariate(&vs, kAlpha) && vs == kAlpha) {
      RootsResult r =
          real_roots_univariate(s.shared_factor, kAlpha, ctx->alo, ctx->ahi);
      if (!r.identically_zero)
        for (const auto& root : r.roots)
          out->alpha_lines.push_back(root.mid());
    }
  }
}

// alpha-extreme (fold) points and domain-edge crossings of one curve
// q(alpha, w) = 0. Components parallel to the axes get special handling: a
// factor in alpha alone is a vertical line (event at each root); a factor in
// w alone is a horizontal line, which has no alpha-extreme points — its
// effect on the envelope is constant in alpha and needs no interior event.
void curve_events(const Polynomial& q, EventContext* ctx, int depth = 0) {
  if (q.is_zero() || q.is_constant() || depth > 8) return;
  int var = -1;
  if (q.effective_univariate(&var, kAlpha)) {
    if (var == kAlpha) add_alpha_roots(q, ctx);
    return;
  }
  add_alpha_roots(q.substituted(kW, ctx->wlo), ctx);
  add_alpha_roots(q.substituted(kW, ctx->whi), ctx);
  Polynomial qw = q.partial(kW);
  if (qw.is_zero() || qw.is_constant()) return;  // no interior folds
  SystemSolution s;
  solve_system(q, qw, ctx, &s);
  for (const auto& pt : s.points) ctx->events.push_back(pt.alpha);
  for (double a : s.alpha_lines) ctx->events.push_back(a);
  // A shared factor is a component of multiple roots; recurse on it.
  if (s.plateau && !s.shared.is_zero())
    curve_events(s.shared, ctx, depth + 1);
}

// Intersection alphas of two distinct curves.
void intersection_events(const Polynomial& p, const Polynomial& q,
                         EventContext* ctx) {
  if (p.is_zero() || q.is_zero() || p.is_constant() || q.is_constant()) return;
  SystemSolution s;
  solve_system(p, q, ctx, &s);
  for (const auto& pt : s.points) ctx->events.push_back(pt.alpha);
  for (double a : s.alpha_lines) ctx->events.push_back(a);
  if (s.plateau && !s.shared.is_zero()) curve_events(s.shared, ctx);
}

// ---------------------------------------------------------------------------
// Winner scan between events.

struct WinnerSig {
  int region = -1;
  CandidateSource source = CandidateSource::cell;
  int curve = -1;
  bool operator==(const WinnerSig&) const = default;
};

WinnerSig sig_of(const PointwiseEnvelope& pe) {
  return {pe.winner.region, pe.winner.source, pe.winner.curve};
}

struct ScanPoint {
  double alpha = 0.0;
  double value = 0.0;
  double w = 0.0;
  WinnerSig sig;
};

ScanPoint probe(const CompiledLandscape& cl, double alpha) {
  PointwiseEnvelope pe = envelope_at(cl, alpha);
  return {alpha, pe.value, pe.winner.w, sig_of(pe)};
}

// Bisects a detected transition between two scan points down to width_goal.
// The midpoint is assigned to the side whose winner it matches (signature
// first, maximizer proximity as the tie-break), which also follows drifting
// maximizers correctly.
double locate_switch(const CompiledLandscape& cl, ScanPoint L, ScanPoint R,
                     double width_goal) {
  for (int it = 0; it < 90 && (R.alpha - L.alpha) > width_goal; ++it) {
    ScanPoint M = probe(cl, 0.5 * (L.alpha + R.alpha));
    bool like_left;
    if (M.sig == L.sig && !(M.sig == R.sig)) {
      like_left = true;
    } else if (M.sig == R.sig && !(M.sig == L.sig)) {
      like_left = false;
    } else {
      like_left = std::fabs(M.w - L.w) <= std::fabs(M.w - R.w);
    }
    (like_left ? L : R) = M;
  }
  return 0.5 * (L.alpha + R.alpha);
}

// ---------------------------------------------------------------------------
// Breakpoint classification from one-sided limits.

struct Classified {
  bool real = false;
  Breakpoint bp;
};

Classified classify_candidate(const CompiledLandscape& cl, double beta,
                              double delta, double scale, double span,
                              double wspan, const TraceConfig& cfg) {
  PointwiseEnvelope m2 = envelope_at(cl, beta - 2 * delta);
  PointwiseEnvelope m1 = envelope_at(cl, beta - delta);
  PointwiseEnvelope p1 = envelope_at(cl, beta + delta);
  PointwiseEnvelope p2 = envelope_at(cl, beta + 2 * delta);
  Classified c;
  c.bp.alpha = beta;
  // Linear extrapolation of each adjacent arc onto the candidate point.
  c.bp.left_limit = 2 * m1.value - m2.value;
  c.bp.right_limit = 2 * p1.value - p2.value;
  if (std::fabs(c.bp.left_limit - c.bp.right_limit) >
      cfg.discontinuity_rel * scale) {
    c.real = true;
    c.bp.kind = BreakpointKind::discontinuity;
    return c;
  }
  const double dL = (m1.value - m2.value) / delta;
  const double dR = (p2.value - p1.value) / delta;
  const double slope_scale =
      std::max({scale / span, std::fabs(dL), std::fabs(dR)});
  if (std::fabs(dL - dR) > 1e-4 * slope_scale) {
    c.real = true;
    c.bp.kind = BreakpointKind::kink;
    return c;
  }
  const double wL = 2 * m1.winner.w - m2.winner.w;
  const double wR = 2 * p1.winner.w - p2.winner.w;
  if (!(sig_of(m1) == sig_of(p1)) || std::fabs(wL - wR) > 1e-3 * wspan) {
    c.real = true;
    c.bp.kind = BreakpointKind::arc_switch;
    return c;
  }
  return c;  // continuous value, slope, and maximizer: not a breakpoint
}

// ---------------------------------------------------------------------------
// Golden-section refinement of a sample-bracketed extremum.

template <typename F>
std::pair<double, double> golden_max(const F& f, double a, double b,
                                     double width) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > width) {
    if (f1 >= f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// ---------------------------------------------------------------------------
// Strict local-max candidates from stationarity systems.

struct MaxCandidate {
  double alpha = 0.0;
  double w = 0.0;
  double residual = 0.0;
  bool from_breakpoint = false;
  int region = -1;
  std::vector<int> active_boundaries;
  std::vector<int> active_edges;
};

}  // namespace

EnvelopeProfile trace_envelope_1d(const Landscape& l, const TraceConfig& cfg) {
  if (l.kind != LandscapeKind::polynomial)
    fail_input("trace_envelope_1d: requires a polynomial-kind landscape");
  if (l.d() != 1)
    fail_input("trace_envelope_1d: requires exactly one maximization "
               "variable (got d=" + std::to_string(l.d()) + ")");

  CompiledLandscape cl = CompiledLandscape::compile(l);
  EventContext ctx;
  ctx.alo = l.domain.alpha_lo;
  ctx.ahi = l.domain.alpha_hi;
  ctx.wlo = l.domain.w_ranges[0].first;
  ctx.whi = l.domain.w_ranges[0].second;
  ctx.box = {to_double(ctx.alo), to_double(ctx.ahi), to_double(ctx.wlo),
             to_double(ctx.whi)};
  const double alo = ctx.box.alpha_lo, ahi = ctx.box.alpha_hi;
  const double span = ahi - alo;
  const double wspan = ctx.box.w_hi - ctx.box.w_lo;

  // -------------------------------------------------------------------
  // Phase A: structural events and stationarity candidates.
  std::vector<MaxCandidate> max_candidates;
  std::vector<double> stationary_alpha_lines;

  const int n_regions = static_cast<int>(l.regions.size());
  const int n_bounds = static_cast<int>(l.boundaries.size());
  for (int i = 0; i < n_regions; ++i) {
    const Polynomial& f = l.regions[i].piece;
    const Polynomial fw = f.partial(kW);
    const Polynomial fa = f.partial(kAlpha);
    curve_events(fw, &ctx);

    // Interior stationarity: f_w = 0 and f_alpha = 0. A shared solution
    // component is a plateau (the piece is constant along it) and
    // contributes no strict maxima; vertical solution lines still get their
    // alphas probed as potential maxima.
    {
      SystemSolution s;
      solve_system(fw, fa, &ctx, &s);
      for (const auto& pt : s.points)
        max_candidates.push_back(
            {pt.alpha, pt.w, pt.residual, false, i, {}, {}});
      for (double a : s.alpha_lines) stationary_alpha_lines.push_back(a);
      if (s.plateau && !s.shared.is_zero()) curve_events(s.shared, &ctx);
    }

    // Edge stationarity: roots of f_alpha along each domain edge.
    for (int e = 0; e < 2; ++e) {
      const Rational& wedge = e == 0 ? ctx.wlo : ctx.whi;
      Polynomial pe = fa.substituted(kW, wedge);
      if (pe.is_zero() || pe.is_constant()) continue;  // plateau or no roots
      RootsResult r = real_roots_univariate(pe, kAlpha, ctx.alo, ctx.ahi);
      if (r.identically_zero) continue;
      for (const auto& root : r.roots)
        max_candidates.push_back({root.mid(),
                                  e == 0 ? ctx.box.w_lo : ctx.box.w_hi,
                                  0.0,
                                  false,
                                  i,
                                  {},
                                  {e}});
    }

    // Boundary arcs: curve crossings plus constrained stationarity
    // f_alpha * h_w - f_w * h_alpha = 0 on h = 0.
    for (int j = 0; j < n_bounds; ++j) {
      if (l.regions[i].signs[j] == BoundarySign::free) continue;
      const Polynomial& h = l.boundaries[j];
      intersection_events(fw, h, &ctx);
      Polynomial cross = fa * h.partial(kW) - fw * h.partial(kAlpha);
      if (cross.is_zero() || cross.is_constant())
        continue;  // constant along the boundary (plateau) or never zero
      SystemSolution s;
      solve_system(h, cross, &ctx, &s);
      for (const auto& pt : s.points)
        max_candidates.push_back(
            {pt.alpha, pt.w, pt.residual, false, i, {j}, {}});
      for (double a : s.alpha_lines) stationary_alpha_lines.push_back(a);
      if (s.plateau && !s.shared.is_zero()) {
        // Plateau along (part of) the boundary: events only, no maxima.
        curve_events(s.shared, &ctx);
      }
    }
  }
  for (int j = 0; j < n_bounds; ++j) {
    curve_events(l.boundaries[j], &ctx);
    for (int k = j + 1; k < n_bounds; ++k)
      intersection_events(l.boundaries[j], l.boundaries[k], &ctx);
  }

  // Assemble the event grid.
  std::vector<double> events;
  events.push_back(alo);
  events.push_back(ahi);
  for (double e : ctx.events)
    if (e > alo && e < ahi) events.push_back(e);
  for (double e : stationary_alpha_lines)
    if (e > alo && e < ahi) events.push_back(e);
  std::sort(events.begin(), events.end());
  {
    std::vector<double> dedup;
    for (double e : events)
      if (dedup.empty() || e - dedup.back() > 1e-12 * span)
        dedup.push_back(e);
    dedup.back() = ahi;  // keep the exact domain end
    events.swap(dedup);
  }

  // -------------------------------------------------------------------
  // Phase B: dense winner scan with transition bisection.
  std::vector<double> switch_candidates;
  double rough_scale = 1.0;
  const int S = std::max(8, cfg.samples_per_interval);
  for (size_t k = 0; k + 1 < events.size(); ++k) {
    const double a0 = events[k], a1 = events[k + 1];
    const double len = a1 - a0;
    if (len < 1e-13 * span) continue;
    std::vector<ScanPoint> pts(S);
    for (int t = 0; t < S; ++t)
      pts[t] = probe(cl, a0 + (t + 0.5) * len / S);
    for (const ScanPoint& p : pts)
      rough_scale = std::max(rough_scale, std::fabs(p.value));
    for (int t = 0; t + 1 < S; ++t) {
      const double dv = std::fabs(pts[t + 1].value - pts[t].value);
      const double dw = std::fabs(pts[t + 1].w - pts[t].w);
      const double dv_prev = t > 0 ? std::fabs(pts[t].value - pts[t - 1].value)
                                   : std::numeric_limits<double>::max();
      const double dv_next = t + 2 < S
                                 ? std::fabs(pts[t + 2].value - pts[t + 1].value)
                                 : std::numeric_limits<double>::max();
      const double dw_prev = t > 0 ? std::fabs(pts[t].w - pts[t - 1].w)
                                   : std::numeric_limits<double>::max();
      const double dw_next = t + 2 < S ? std::fabs(pts[t + 2].w - pts[t + 1].w)
                                       : std::numeric_limits<double>::max();
      bool trigger = !(pts[t].sig == pts[t + 1].sig);
      // Maximizer hop: a jump in w* far above the drift of the neighbors.
      if (!trigger && dw > 0.02 * wspan &&
          dw > 6 * (std::min(dw_prev, dw_next) + 1e-12 * wspan))
        trigger = true;
      // Value jump well above neighboring increments.
      if (!trigger && dv > 1e-6 * rough_scale &&
          dv > 6 * (std::min(dv_prev, dv_next) + 1e-13 * rough_scale))
        trigger = true;
      // Slope kink: second difference above the smooth-arc level.
      if (!trigger && t > 0 && t + 2 < S) {
        const double d2 = std::fabs((pts[t + 2].value - pts[t + 1].value) -
                                    (pts[t + 1].value - pts[t].value));
        const double d2_prev = std::fabs((pts[t + 1].value - pts[t].value) -
                                         (pts[t].value - pts[t - 1].value));
        if (d2 > 1e-7 * rough_scale && d2 > 8 * (d2_prev + 1e-14 * rough_scale))
          trigger = true;
      }
      if (trigger)
        switch_candidates.push_back(
            locate_switch(cl, pts[t], pts[t + 1], 1e-13 * span));
    }
  }

  // -------------------------------------------------------------------
  // Phase C: classify candidates into real breakpoints.
  std::vector<double> candidates;
  for (size_t k = 1; k + 1 < events.size(); ++k) candidates.push_back(events[k]);
  for (double c : switch_candidates)
    if (c > alo && c < ahi) candidates.push_back(c);
  std::sort(candidates.begin(), candidates.end());
  // Cluster radius: the configured merge width, widened slightly so
  // one-sided probes never straddle a sibling candidate (root-isolation
  // twins land within ~1e-12 of each other).
  const double cluster_r = std::max(cfg.breakpoint_merge, 3e-8 * span);
  std::vector<double> merged;
  for (size_t k = 0; k < candidates.size();) {
    size_t e = k + 1;
    while (e < candidates.size() && candidates[e] - candidates[e - 1] < cluster_r)
      ++e;
    double sum = 0;
    for (size_t t = k; t < e; ++t) sum += candidates[t];
    merged.push_back(sum / (e - k));
    k = e;
  }

  std::vector<Breakpoint> breakpoints;
  for (size_t k = 0; k < merged.size(); ++k) {
    const double beta = merged[k];
    double gap = std::min(beta - alo, ahi - beta);
    if (k > 0) gap = std::min(gap, beta - merged[k - 1]);
    if (k + 1 < merged.size()) gap = std::min(gap, merged[k + 1] - beta);
    const double delta = std::max(std::min(1e-7 * span, 0.3 * gap), 1e-9 * span);
    Classified c =
        classify_candidate(cl, beta, delta, rough_scale, span, wspan, cfg);
    if (c.real) breakpoints.push_back(c.bp);
  }

  // -------------------------------------------------------------------
  // Phase D: segments, arcs, dense trace.
  EnvelopeProfile out;
  out.breakpoints = breakpoints;

  std::vector<double> seg_bounds;
  seg_bounds.push_back(alo);
  for (const Breakpoint& b : breakpoints) seg_bounds.push_back(b.alpha);
  seg_bounds.push_back(ahi);

  PointwiseEnvelope at_lo = envelope_at(cl, alo);
  PointwiseEnvelope at_hi = envelope_at(cl, ahi);
  out.samples.push_back({alo, at_lo.value, at_lo.winner.w, at_lo.winner.region,
                         at_lo.winner.source, 0.0});

  auto value_at = [&](double a) { return envelope_at(cl, a).value; };

  for (size_t k = 0; k + 1 < seg_bounds.size(); ++k) {
    const double s = seg_bounds[k], e = seg_bounds[k + 1];
    const double len = e - s;
    Segment seg;
    seg.alpha_lo = s;
    seg.alpha_hi = e;
    seg.left_limit = k == 0 ? at_lo.value : breakpoints[k - 1].right_limit;
    seg.right_limit =
        k + 1 == seg_bounds.size() - 1 ? at_hi.value : breakpoints[k].left_limit;

    const int n = std::clamp(
        static_cast<int>(cfg.alpha_samples * (len / span)) + 1, 9, 20001);
    std::vector<double> sa(n), sv(n);
    PointwiseEnvelope mid_pe = envelope_at(cl, s + 0.5 * len);
    for (int t = 0; t < n; ++t) {
      const double a = s + (t + 0.5) * len / n;
      PointwiseEnvelope pe = envelope_at(cl, a);
      sa[t] = a;
      sv[t] = pe.value;
      out.samples.push_back(
          {a, pe.value, pe.winner.w, pe.winner.region, pe.winner.source, 0.0});
    }
    seg.min_value = std::min(seg.left_limit, seg.right_limit);
    seg.max_value = std::max(seg.left_limit, seg.right_limit);
    for (double v : sv) {
      seg.min_value = std::min(seg.min_value, v);
      seg.max_value = std::max(seg.max_value, v);
    }
    // Interior extrema, golden-refined over the bracketing samples.
    for (int t = 1; t + 1 < n; ++t) {
      const bool is_max = sv[t] >= sv[t - 1] && sv[t] >= sv[t + 1] &&
                          (sv[t] > sv[t - 1] || sv[t] > sv[t + 1]);
      const bool is_min = sv[t] <= sv[t - 1] && sv[t] <= sv[t + 1] &&
                          (sv[t] < sv[t - 1] || sv[t] < sv[t + 1]);
      if (!is_max && !is_min) continue;
      std::pair<double, double> ext;
      if (is_max) {
        ext = golden_max(value_at, sa[t - 1], sa[t + 1], 1e-12 * span);
      } else {
        ext = golden_max([&](double a) { return -value_at(a); }, sa[t - 1],
                         sa[t + 1], 1e-12 * span);
        ext.second = -ext.second;
      }
      seg.interior_extreme_values.push_back(ext.second);
      seg.min_value = std::min(seg.min_value, ext.second);
      seg.max_value = std::max(seg.max_value, ext.second);
    }

    // Winning arc of the segment, with the single-branch certificate.
    ArcDescriptor arc;
    arc.alpha_lo = s;
    arc.alpha_hi = e;
    arc.region = mid_pe.winner.region;
    arc.source = mid_pe.winner.source;
    arc.boundary_index =
        mid_pe.winner.source == CandidateSource::boundary ? mid_pe.winner.curve
                                                          : -1;
    arc.witness_alpha = s + 0.5 * len;
    arc.witness_w = mid_pe.winner.w;
    if (arc.source == CandidateSource::critical && arc.region >= 0) {
      arc.witness_residual = std::fabs(l.regions[arc.region].piece.partial(kW)
                                           .eval({arc.witness_alpha, arc.witness_w}));
    } else if (arc.source == CandidateSource::boundary &&
               mid_pe.winner.curve >= 0) {
      arc.witness_residual = std::fabs(
          l.boundaries[mid_pe.winner.curve].eval({arc.witness_alpha,
                                                  arc.witness_w}));
    }
    const WinnerSig arc_sig = sig_of(mid_pe);
    arc.monotonic = true;
    int expected = -1;
    for (int t = 0; t < 100; ++t) {
      const double a = s + (t + 0.5) * len / 100;
      PointwiseEnvelope pe = envelope_at(cl, a);
      int count = 0;
      for (const EnvelopeCandidate& cand : pe.candidates)
        if (WinnerSig{cand.region, cand.source, cand.curve} == arc_sig) ++count;
      if (expected < 0) expected = count;
      if (count != expected) {
        arc.monotonic = false;
        break;
      }
    }
    seg.arc = static_cast<int>(out.arcs.size());
    out.arcs.push_back(arc);
    out.segments.push_back(std::move(seg));
  }
  out.samples.push_back({ahi, at_hi.value, at_hi.winner.w, at_hi.winner.region,
                         at_hi.winner.source, 0.0});

  out.value_scale = 1.0;
  for (const EnvelopeSample& smp : out.samples)
    out.value_scale = std::max(out.value_scale, std::fabs(smp.value));
  for (const Segment& seg : out.segments) {
    out.value_scale = std::max(out.value_scale, std::fabs(seg.min_value));
    out.value_scale = std::max(out.value_scale, std::fabs(seg.max_value));
  }

  // -------------------------------------------------------------------
  // Phase E: strict interior local maxima.
  for (double a : stationary_alpha_lines)
    max_candidates.push_back({a, 0.0, 0.0, true, -1, {}, {}});
  for (const Breakpoint& b : breakpoints)
    max_candidates.push_back({b.alpha, 0.0, 0.0, true, -1, {}, {}});

  auto gap_at = [&](double a) {
    double g = std::min(a - alo, ahi - a);
    for (const Breakpoint& b : breakpoints)
      if (std::fabs(b.alpha - a) > 1e-9 * span)
        g = std::min(g, std::fabs(b.alpha - a));
    return g;
  };

  std::vector<LocalMax> maxima;
  std::vector<MaxCandidate> accepted;
  std::sort(max_candidates.begin(), max_candidates.end(),
            [](const MaxCandidate& x, const MaxCandidate& y) {
              return x.alpha < y.alpha;
            });
  for (const MaxCandidate& mc : max_candidates) {
    const double margin_edge = 1e-12 * span;
    if (mc.alpha <= alo + margin_edge || mc.alpha >= ahi - margin_edge)
      continue;  // interior maxima only
    PointwiseEnvelope pe = envelope_at(cl, mc.alpha);
    const double v0 = pe.value;
    if (!mc.from_breakpoint) {
      // The stationary point must be the attained maximizer.
      double vc = cl.eval(std::vector<double>{mc.alpha, mc.w});
      if (!std::isfinite(vc) || std::fabs(vc - v0) > 1e-8 * out.value_scale)
        continue;
    }
    const double delta =
        std::max(std::min(1e-4 * span, 0.25 * gap_at(mc.alpha)), 4e-12 * span);
    bool strict = true;
    for (double dd : {delta, 2 * delta}) {
      for (double sgn : {-1.0, 1.0}) {
        const double x = mc.alpha + sgn * dd;
        if (x <= alo || x >= ahi) continue;
        if (envelope_at(cl, x).value + 1e-12 * out.value_scale >= v0) {
          strict = false;
          break;
        }
      }
      if (!strict) break;
    }
    if (!strict) continue;
    bool dup = false;
    for (const LocalMax& m : maxima)
      if (std::fabs(m.alpha - mc.alpha) < 1e-9 * span) {
        dup = true;
        break;
      }
    if (dup) continue;
    maxima.push_back({mc.alpha, v0, mc.residual, mc.from_breakpoint});
    accepted.push_back(mc);
  }
  out.local_maxima = std::move(maxima);
  out.b2 = static_cast<int>(out.local_maxima.size());
  out.b1 = 0;
  for (const Breakpoint& b : out.breakpoints)
    if (b.kind == BreakpointKind::discontinuity) ++out.b1;

  // Stationarity exports for the regularity check: every solved candidate
  // that matched the envelope value (the accepted maxima plus near-winners).
  for (const MaxCandidate& mc : max_candidates) {
    if (mc.from_breakpoint) continue;
    double vc = cl.eval(std::vector<double>{mc.alpha, mc.w});
    if (!std::isfinite(vc)) continue;
    double v0 = envelope_at(cl, mc.alpha).value;
    if (std::fabs(vc - v0) > 1e-8 * out.value_scale) continue;
    StationarityPoint sp;
    sp.alpha = mc.alpha;
    sp.w = {mc.w};
    sp.region = mc.region;
    sp.active_boundaries = mc.active_boundaries;
    sp.active_edges = mc.active_edges;
    out.stationarity_points.push_back(std::move(sp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV emitters.

std::string envelope_csv(const EnvelopeProfile& p) {
  std::string out = "alpha,ustar,winner_region,winner_source\n";
  for (const EnvelopeSample& s : p.samples) {
    out += fmt_double(s.alpha);
    out += ',';
    out += fmt_double(s.value);
    out += ',';
    out += std::to_string(s.region);
    out += ',';
    out += to_string(s.source);
    out += '\n';
  }
  return out;
}

std::string breakpoints_csv(const EnvelopeProfile& p) {
  std::string out = "alpha,kind,left_limit,right_limit\n";
  for (const Breakpoint& b : p.breakpoints) {
    out += fmt_double(b.alpha);
    out += ',';
    out += to_string(b.kind);
    out += ',';
    out += fmt_double(b.left_limit);
    out += ',';
    out += fmt_double(b.right_limit);
    out += '\n';
  }
  return out;
}

std::string localmaxima_csv(const EnvelopeProfile& p) {
  std::string out = "alpha,value,residual\n";
  for (const LocalMax& m : p.local_maxima) {
    out += fmt_double(m.alpha);
    out += ',';
    out += fmt_double(m.value);
    out += ',';
    out += fmt_double(m.residual);
    out += '\n';
  }
  return out;
}

}  // namespace envtrace
