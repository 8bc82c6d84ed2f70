#include "envtrace/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "envtrace/bivariate.hpp"
#include "envtrace/error.hpp"
#include "envtrace/roots.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace envtrace {

namespace {

constexpr int kAlpha = 0;
constexpr int kW = 1;

void add_alpha_roots_const(const Polynomial& p, const Rational& lo,
                           const Rational& hi, std::vector<double>* events) {
  if (p.is_zero() || p.is_constant()) return;
  RootsResult r = real_roots_univariate(p, kAlpha, lo, hi);
  if (r.identically_zero) return;
  for (const auto& root : r.roots) events->push_back(root.mid());
}

// Structural alphas of one boundary curve: folds, vertical lines, and
// domain-edge crossings. Region alpha-extent endpoints are always of this
// form (a region's extent ends where some bounding curve turns around or
// leaves the box).
void const_curve_events(const Polynomial& q, const Box2& box,
                        const Rational& alo, const Rational& ahi,
                        const Rational& wlo, const Rational& whi,
                        std::vector<double>* events, int depth = 0) {
  if (q.is_zero() || q.is_constant() || depth > 8) return;
  int var = -1;
  if (q.effective_univariate(&var, kAlpha)) {
    if (var == kAlpha) add_alpha_roots_const(q, alo, ahi, events);
    return;  // horizontal lines: constant in alpha
  }
  add_alpha_roots_const(q.substituted(kW, wlo), alo, ahi, events);
  add_alpha_roots_const(q.substituted(kW, whi), alo, ahi, events);
  Polynomial qw = q.partial(kW);
  if (qw.is_zero() || qw.is_constant()) return;
  int vw = -1;
  if (qw.effective_univariate(&vw, kAlpha)) {
    if (vw == kAlpha) {
      add_alpha_roots_const(qw, alo, ahi, events);
    } else {
      RootsResult rw = real_roots_univariate(qw, kW, wlo, whi);
      if (!rw.identically_zero)
        for (const auto& root : rw.roots)
          add_alpha_roots_const(q.substituted(kW, (root.lo + root.hi) / 2),
                                alo, ahi, events);
    }
    return;
  }
  BivariateSolution s = solve_bivariate(q, qw, box);
  for (const auto& pt : s.points) events->push_back(pt.alpha);
  if (s.shared_curve)
    const_curve_events(s.shared_factor, box, alo, ahi, wlo, whi, events,
                       depth + 1);
}

EnvelopeProfile trace_constant_exact_1d(const Landscape& l,
                                        const TraceConfig& cfg) {
  CompiledLandscape cl = CompiledLandscape::compile(l);
  const Rational alo_r = l.domain.alpha_lo, ahi_r = l.domain.alpha_hi;
  const Rational wlo_r = l.domain.w_ranges[0].first;
  const Rational whi_r = l.domain.w_ranges[0].second;
  const double alo = to_double(alo_r), ahi = to_double(ahi_r);
  const double span = ahi - alo;
  Box2 box{alo, ahi, to_double(wlo_r), to_double(whi_r)};

  std::vector<double> events;
  for (size_t j = 0; j < l.boundaries.size(); ++j) {
    const_curve_events(l.boundaries[j], box, alo_r, ahi_r, wlo_r, whi_r,
                       &events);
    for (size_t k = j + 1; k < l.boundaries.size(); ++k) {
      const Polynomial* p = &l.boundaries[j];
      const Polynomial* q = &l.boundaries[k];
      int vp = -1, vq = -1;
      const bool up = p->effective_univariate(&vp, kAlpha);
      const bool uq = q->effective_univariate(&vq, kAlpha);
      if (up && vp == kAlpha) continue;  // vertical line: alphas already in
      if (uq && vq == kAlpha) continue;
      if (up && uq) continue;  // two horizontal lines never pinch a cell
      if (up || uq) {
        // Horizontal line crossing a curve: pinch alphas are the curve's
        // roots along the line.
        if (uq) {
          std::swap(p, q);
        }
        RootsResult rw = real_roots_univariate(*p, kW, wlo_r, whi_r);
        if (!rw.identically_zero)
          for (const auto& root : rw.roots)
            add_alpha_roots_const(q->substituted(kW, (root.lo + root.hi) / 2),
                                  alo_r, ahi_r, &events);
        continue;
      }
      BivariateSolution s = solve_bivariate(*p, *q, box);
      for (const auto& pt : s.points) events.push_back(pt.alpha);
    }
  }
  std::vector<double> grid;
  grid.push_back(alo);
  for (double e : events)
    if (e > alo && e < ahi) grid.push_back(e);
  grid.push_back(ahi);
  std::sort(grid.begin(), grid.end());
  {
    std::vector<double> dedup;
    for (double e : grid)
      if (dedup.empty() || e - dedup.back() > 1e-12 * span) dedup.push_back(e);
    dedup.back() = ahi;
    grid.swap(dedup);
  }

  // Interval values; a piecewise-constant envelope is flat between events.
  // Verify flatness with a few samples per interval; any in-interval change
  // means a structural alpha slipped the event net, so bisect it in.
  std::vector<double> ivals;
  for (size_t k = 0; k + 1 < grid.size();) {
    const double a0 = grid[k], a1 = grid[k + 1];
    const int S = 9;
    double v0 = envelope_at(cl, a0 + 0.5 * (a1 - a0) / S).value;
    bool flat = true;
    for (int t = 1; t < S; ++t) {
      double vt = envelope_at(cl, a0 + (t + 0.5) * (a1 - a0) / S).value;
      if (std::fabs(vt - v0) > 1e-12 * std::max(1.0, std::fabs(v0))) {
        // locate the change and split the interval
        double lo = a0 + (t - 0.5) * (a1 - a0) / S;
        double hi = a0 + (t + 0.5) * (a1 - a0) / S;
        for (int it = 0; it < 80 && hi - lo > 1e-13 * span; ++it) {
          double m = 0.5 * (lo + hi);
          if (std::fabs(envelope_at(cl, m).value - v0) <=
              1e-12 * std::max(1.0, std::fabs(v0)))
            lo = m;
          else
            hi = m;
        }
        grid.insert(grid.begin() + static_cast<long>(k) + 1,
                    0.5 * (lo + hi));
        flat = false;
        break;
      }
    }
    if (flat) {
      ivals.push_back(v0);
      ++k;
    }
  }

  EnvelopeProfile out;
  out.value_scale = 1.0;
  for (double v : ivals)
    out.value_scale = std::max(out.value_scale, std::fabs(v));

  // Merge equal-valued neighbors; every kept boundary is a jump.
  std::vector<double> seg_lo{alo};
  std::vector<double> seg_val{ivals.empty() ? 0.0 : ivals[0]};
  for (size_t k = 1; k < ivals.size(); ++k) {
    if (std::fabs(ivals[k] - seg_val.back()) >
        cfg.discontinuity_rel * out.value_scale) {
      Breakpoint bp;
      bp.alpha = grid[k];
      bp.kind = BreakpointKind::discontinuity;
      bp.left_limit = seg_val.back();
      bp.right_limit = ivals[k];
      out.breakpoints.push_back(bp);
      seg_lo.push_back(grid[k]);
      seg_val.push_back(ivals[k]);
    }
  }
  seg_lo.push_back(ahi);

  for (size_t k = 0; k + 1 < seg_lo.size(); ++k) {
    const double s = seg_lo[k], e = seg_lo[k + 1];
    Segment seg;
    seg.alpha_lo = s;
    seg.alpha_hi = e;
    seg.min_value = seg.max_value = seg.left_limit = seg.right_limit =
        seg_val[k];
    const int n = std::clamp(
        static_cast<int>(cfg.alpha_samples * ((e - s) / span)) + 1, 5, 20001);
    PointwiseEnvelope mid_pe = envelope_at(cl, s + 0.5 * (e - s));
    for (int t = 0; t < n; ++t) {
      const double a = s + (t + 0.5) * (e - s) / n;
      out.samples.push_back({a, seg_val[k], mid_pe.winner.w,
                             mid_pe.winner.region, mid_pe.winner.source, 0.0});
    }
    ArcDescriptor arc;
    arc.alpha_lo = s;
    arc.alpha_hi = e;
    arc.region = mid_pe.winner.region;
    arc.source = mid_pe.winner.source;
    arc.witness_alpha = s + 0.5 * (e - s);
    arc.witness_w = mid_pe.winner.w;
    arc.monotonic = true;  // a plateau meets each alpha line in one value
    seg.arc = static_cast<int>(out.arcs.size());
    out.arcs.push_back(arc);
    out.segments.push_back(std::move(seg));
  }

  out.b1 = static_cast<int>(out.breakpoints.size());
  out.b2 = 0;  // plateaus carry no strict local maxima, by definition
  return out;
}

EnvelopeProfile trace_constant_grid(const Landscape& l,
                                    const TraceConfig& cfg) {
  CompiledLandscape cl = CompiledLandscape::compile(l);
  const int d = l.d();
  const double alo = to_double(l.domain.alpha_lo);
  const double ahi = to_double(l.domain.alpha_hi);
  const double span = ahi - alo;
  const int res =
      std::clamp(static_cast<int>(std::pow(3.0e5, 1.0 / d)), 9, 129);
  const int n = std::max(cfg.alpha_samples, 33);

  std::vector<double> lo(static_cast<size_t>(d)), step(static_cast<size_t>(d));
  for (int z = 0; z < d; ++z) {
    lo[static_cast<size_t>(z)] = to_double(l.domain.w_ranges[z].first);
    step[static_cast<size_t>(z)] =
        (to_double(l.domain.w_ranges[z].second) - lo[static_cast<size_t>(z)]) /
        (res - 1);
  }

  std::vector<double> vals(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    std::vector<double> x(static_cast<size_t>(d) + 1);
    x[0] = alo + (k + 0.5) * span / n;
    std::vector<int> idx(static_cast<size_t>(d), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      for (int z = 0; z < d; ++z)
        x[static_cast<size_t>(z) + 1] =
            lo[static_cast<size_t>(z)] +
            idx[static_cast<size_t>(z)] * step[static_cast<size_t>(z)];
      double v = cl.eval(x);
      if (v > best) best = v;
      int z = 0;
      while (z < d && ++idx[static_cast<size_t>(z)] == res) {
        idx[static_cast<size_t>(z)] = 0;
        ++z;
      }
      if (z == d) break;
    }
    vals[static_cast<size_t>(k)] = best;
  }

  EnvelopeProfile out;
  out.estimated = true;
  out.value_scale = 1.0;
  for (double v : vals)
    if (std::isfinite(v)) out.value_scale = std::max(out.value_scale, std::fabs(v));

  std::vector<size_t> seg_start{0};
  for (size_t k = 1; k < vals.size(); ++k) {
    if (std::fabs(vals[k] - vals[k - 1]) > 1e-9 * out.value_scale) {
      Breakpoint bp;
      bp.alpha = alo + (static_cast<double>(k)) * span / n;  // cell border
      bp.kind = BreakpointKind::discontinuity;
      bp.left_limit = vals[k - 1];
      bp.right_limit = vals[k];
      out.breakpoints.push_back(bp);
      seg_start.push_back(k);
    }
  }
  seg_start.push_back(vals.size());

  for (size_t k = 0; k + 1 < seg_start.size(); ++k) {
    Segment seg;
    seg.alpha_lo =
        k == 0 ? alo : alo + static_cast<double>(seg_start[k]) * span / n;
    seg.alpha_hi = k + 2 == seg_start.size()
                       ? ahi
                       : alo + static_cast<double>(seg_start[k + 1]) * span / n;
    seg.min_value = seg.max_value = seg.left_limit = seg.right_limit =
        vals[seg_start[k]];
    ArcDescriptor arc;
    arc.alpha_lo = seg.alpha_lo;
    arc.alpha_hi = seg.alpha_hi;
    arc.source = CandidateSource::cell;
    arc.witness_alpha = 0.5 * (seg.alpha_lo + seg.alpha_hi);
    arc.monotonic = true;
    seg.arc = static_cast<int>(out.arcs.size());
    out.arcs.push_back(arc);
    out.segments.push_back(seg);
  }
  for (size_t k = 0; k < vals.size(); ++k)
    out.samples.push_back({alo + (k + 0.5) * span / n, vals[k], 0.0, -1,
                           CandidateSource::cell, 0.0});
  out.b1 = static_cast<int>(out.breakpoints.size());
  out.b2 = 0;
  return out;
}

}  // namespace

EnvelopeProfile trace_envelope_constant(const Landscape& l,
                                        const TraceConfig& cfg) {
  if (l.kind != LandscapeKind::constant)
    fail_input("trace_envelope_constant: requires a constant-kind landscape");
  if (l.d() == 1) return trace_constant_exact_1d(l, cfg);
  return trace_constant_grid(l, cfg);
}

}  // namespace envtrace
