#include "envtrace/envelope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "envtrace/error.hpp"
#include "envtrace/fasteval.hpp"
#include "envtrace/random.hpp"

namespace envtrace {

namespace {

using Objective = std::function<double(double, const std::vector<double>&)>;

constexpr double kGolden = 0.6180339887498949;

struct BoxD {
  double alpha_lo = 0.0, alpha_hi = 1.0;
  std::vector<double> lo, hi;
  int d() const { return static_cast<int>(lo.size()); }
  double width(int z) const {
    return hi[static_cast<size_t>(z)] - lo[static_cast<size_t>(z)];
  }
};

BoxD to_boxd(const DomainBox& dom) {
  BoxD b;
  b.alpha_lo = to_double(dom.alpha_lo);
  b.alpha_hi = to_double(dom.alpha_hi);
  for (const auto& r : dom.w_ranges) {
    b.lo.push_back(to_double(r.first));
    b.hi.push_back(to_double(r.second));
  }
  return b;
}

// Maximize along one axis: coarse scan, then golden-section inside the best
// scan cell. Scanning first keeps multimodal slices honest; golden alone
// would latch onto whichever bump brackets the start.
template <typename F>
double axis_max(const F& f1, double lo, double hi, int scan_pts, double seed_x,
                double seed_v, double* out_v) {
  double bx = seed_x, bv = seed_v;
  if (hi - lo <= 0) {
    *out_v = bv;
    return bx;
  }
  for (int t = 0; t < scan_pts; ++t) {
    double x = lo + (hi - lo) * t / (scan_pts - 1);
    double v = f1(x);
    if (v > bv) {
      bv = v;
      bx = x;
    }
  }
  double cell = (hi - lo) / (scan_pts - 1);
  double a = std::max(lo, bx - cell), b = std::min(hi, bx + cell);
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double v1 = f1(x1), v2 = f1(x2);
  for (int it = 0; it < 48 && b - a > 1e-13 * (hi - lo + 1.0); ++it) {
    if (v1 < v2) {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + kGolden * (b - a);
      v2 = f1(x2);
    } else {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - kGolden * (b - a);
      v1 = f1(x1);
    }
  }
  double xm = 0.5 * (a + b), vm = f1(xm);
  if (vm > bv) {
    bv = vm;
    bx = xm;
  }
  *out_v = bv;
  return bx;
}

// Coordinate ascent from one start point with a shrinking search radius.
double ascend(const Objective& f, double alpha, const BoxD& box,
              std::vector<double>* w) {
  const int d = box.d();
  double val = f(alpha, *w);
  double shrink = 1.0;
  int stale = 0;
  for (int sweep = 0; sweep < 24; ++sweep) {
    double before = val;
    for (int z = 0; z < d; ++z) {
      const size_t zz = static_cast<size_t>(z);
      double r = 0.5 * shrink * box.width(z);
      double slo = std::max(box.lo[zz], (*w)[zz] - r);
      double shi = std::min(box.hi[zz], (*w)[zz] + r);
      auto f1 = [&](double x) {
        double old = (*w)[zz];
        (*w)[zz] = x;
        double v = f(alpha, *w);
        (*w)[zz] = old;
        return v;
      };
      double nv = val;
      double nx = axis_max(f1, slo, shi, sweep == 0 ? 33 : 9, (*w)[zz], val,
                           &nv);
      (*w)[zz] = nx;
      val = nv;
    }
    if (val - before <= 1e-14 * std::max(1.0, std::fabs(val))) {
      shrink *= 0.3;
      if (++stale >= 2 && shrink < 1e-10) break;
    } else {
      stale = 0;
    }
  }
  return val;
}

struct PointResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> w;
};

PointResult maximize_at(const Objective& f, double alpha, const BoxD& box,
                        const TraceConfig& cfg, std::uint64_t salt,
                        const std::vector<double>* warm, int n_random) {
  const int d = box.d();
  std::vector<std::vector<double>> starts;
  if (warm != nullptr) starts.push_back(*warm);
  std::vector<double> center(static_cast<size_t>(d));
  for (int z = 0; z < d; ++z)
    center[static_cast<size_t>(z)] =
        0.5 * (box.lo[static_cast<size_t>(z)] + box.hi[static_cast<size_t>(z)]);
  starts.push_back(center);
  Rng rng(Rng::mix(cfg.seed, salt));
  for (int s = 0; s < n_random; ++s) {
    std::vector<double> w(static_cast<size_t>(d));
    for (int z = 0; z < d; ++z)
      w[static_cast<size_t>(z)] = rng.next_range(
          box.lo[static_cast<size_t>(z)], box.hi[static_cast<size_t>(z)]);
    starts.push_back(std::move(w));
  }
  PointResult best;
  for (auto& w : starts) {
    std::vector<double> cand = w;
    double v = ascend(f, alpha, box, &cand);
    if (v > best.value) {
      best.value = v;
      best.w = std::move(cand);
    }
  }
  return best;
}

struct ActiveSet {
  std::vector<int> edges;       // axis indices pinned at a face
  std::vector<int> boundaries;  // landscape boundary indices with h ~ 0
};

ActiveSet active_at(double alpha, const std::vector<double>& w,
                    const BoxD& box, const Landscape* l) {
  ActiveSet act;
  for (int z = 0; z < box.d(); ++z) {
    const size_t zz = static_cast<size_t>(z);
    double tol = 1e-9 * std::max(1.0, box.width(z));
    if (w[zz] - box.lo[zz] <= tol || box.hi[zz] - w[zz] <= tol)
      act.edges.push_back(z);
  }
  if (l != nullptr) {
    std::vector<double> x(w.size() + 1);
    x[0] = alpha;
    std::copy(w.begin(), w.end(), x.begin() + 1);
    for (size_t j = 0; j < l->boundaries.size(); ++j) {
      double hv = l->boundaries[j].eval(x);
      double hscale = 1.0;
      for (const auto& t : l->boundaries[j].terms())
        hscale = std::max(hscale, std::fabs(to_double(t.second)));
      if (std::fabs(hv) <= 1e-7 * hscale)
        act.boundaries.push_back(static_cast<int>(j));
    }
  }
  return act;
}

// Residual of the first-order condition: distance from the finite-difference
// gradient to the cone spanned by active constraint normals (least squares,
// signs unconstrained). Interior points reduce to the plain gradient norm.
double kkt_residual(const Objective& f, double alpha,
                    const std::vector<double>& w, const BoxD& box,
                    const Landscape* l, const ActiveSet& act) {
  const int d = box.d();
  Eigen::VectorXd g(d);
  std::vector<double> wp = w;
  for (int z = 0; z < d; ++z) {
    const size_t zz = static_cast<size_t>(z);
    double h = 1e-6 * std::max(1.0, box.width(z));
    double xl = std::max(box.lo[zz], w[zz] - h);
    double xh = std::min(box.hi[zz], w[zz] + h);
    wp[zz] = xh;
    double fh = f(alpha, wp);
    wp[zz] = xl;
    double fl = f(alpha, wp);
    wp[zz] = w[zz];
    g(z) = xh > xl ? (fh - fl) / (xh - xl) : 0.0;
  }
  const int m =
      static_cast<int>(act.edges.size() + act.boundaries.size());
  Eigen::VectorXd res = g;
  if (m > 0) {
    Eigen::MatrixXd A(d, m);
    int col = 0;
    for (int z : act.edges) {
      A.col(col).setZero();
      A(z, col) = 1.0;
      ++col;
    }
    if (l != nullptr) {
      std::vector<double> x(w.size() + 1);
      x[0] = alpha;
      std::copy(w.begin(), w.end(), x.begin() + 1);
      for (int j : act.boundaries) {
        for (int z = 0; z < d; ++z)
          A(z, col) =
              l->boundaries[static_cast<size_t>(j)].partial(z + 1).eval(x);
        ++col;
      }
    }
    Eigen::VectorXd lam =
        A.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(g);
    res = g - A * lam;
  }
  double vnorm = res.lpNorm<Eigen::Infinity>();
  return vnorm / std::max(1.0, std::fabs(f(alpha, w)));
}

double median_abs(std::vector<double> v) {
  if (v.empty()) return 0.0;
  for (double& x : v) x = std::fabs(x);
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  return v[mid];
}

EnvelopeProfile trace_numeric_core(const Objective& f, const DomainBox& dom,
                                   const TraceConfig& cfg, bool parallel,
                                   const Landscape* l) {
  if (dom.d() < 1) fail_input("numeric tracer needs at least one w axis");
  BoxD box = to_boxd(dom);
  const int d = box.d();
  const int n = std::max(cfg.alpha_samples, 33);
  const double span = box.alpha_hi - box.alpha_lo;
  const double step = span / (n - 1);

  std::vector<double> vals(static_cast<size_t>(n));
  std::vector<std::vector<double>> wins(static_cast<size_t>(n));

  // Fixed-size chunks keep warm starts deterministic: each chunk's first
  // alpha runs the full multistart budget, later ones reuse the previous
  // maximizer plus a reduced random budget. Identical results in serial and
  // parallel runs, because chunk boundaries do not depend on thread count.
  const int chunk = 64;
  const int n_chunks = (n + chunk - 1) / chunk;
  const int full_rand = std::max(2, cfg.multistarts - 1);
  const int warm_rand = std::max(2, cfg.multistarts / 4 - 1);

  auto run_chunk = [&](int c) {
    const int k0 = c * chunk;
    const int k1 = std::min(n, k0 + chunk);
    const std::vector<double>* warm = nullptr;
    for (int k = k0; k < k1; ++k) {
      double alpha = box.alpha_lo + step * k;
      PointResult r =
          maximize_at(f, alpha, box, cfg, static_cast<std::uint64_t>(k),
                      warm, warm ? warm_rand : full_rand);
      vals[static_cast<size_t>(k)] = r.value;
      wins[static_cast<size_t>(k)] = std::move(r.w);
      warm = &wins[static_cast<size_t>(k)];
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    for (int c = 0; c < n_chunks; ++c) run_chunk(c);
  }

  EnvelopeProfile out;
  out.estimated = true;
  out.value_scale = 1.0;
  for (double v : vals)
    if (std::isfinite(v)) out.value_scale = std::max(out.value_scale, std::fabs(v));
  const double scale = out.value_scale;

  // Detection grids: first differences flag jumps, second differences flag
  // kinks, maximizer hops flag arc switches. Thresholds are median-scaled so
  // smooth curvature does not trip them.
  std::vector<double> diffs(static_cast<size_t>(n - 1));
  for (int k = 0; k + 1 < n; ++k)
    diffs[static_cast<size_t>(k)] =
        vals[static_cast<size_t>(k + 1)] - vals[static_cast<size_t>(k)];
  std::vector<double> second(static_cast<size_t>(std::max(0, n - 2)));
  for (int k = 1; k + 1 < n; ++k)
    second[static_cast<size_t>(k - 1)] =
        diffs[static_cast<size_t>(k)] - diffs[static_cast<size_t>(k - 1)];
  std::vector<double> whop(static_cast<size_t>(n - 1), 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    double h = 0.0;
    for (int z = 0; z < d; ++z) {
      const size_t zz = static_cast<size_t>(z);
      h = std::max(h, std::fabs(wins[static_cast<size_t>(k + 1)][zz] -
                                wins[static_cast<size_t>(k)][zz]) /
                          std::max(1e-12, box.width(z)));
    }
    whop[static_cast<size_t>(k)] = h;
  }
  const double med_d = median_abs(diffs);
  const double med_s = median_abs(second);
  const double med_w = median_abs(whop);
  const double jump_thr = std::max(12.0 * med_d + 1e-12 * scale, 1e-5 * scale);
  const double kink_thr = std::max(12.0 * med_s + 1e-12 * scale, 1e-6 * scale);
  const double whop_thr = std::max(12.0 * med_w, 0.02);

  struct Trigger {
    int k;
    int kind;  // 0 jump, 1 kink, 2 switch
    double strength;
  };
  std::vector<Trigger> trig;
  for (int k = 0; k + 1 < n; ++k) {
    const size_t kk = static_cast<size_t>(k);
    double dj = std::fabs(diffs[kk]);
    double sk = (k >= 1 && k + 1 < n) ? std::fabs(second[kk - 1]) : 0.0;
    if (dj > jump_thr)
      trig.push_back({k, 0, dj / jump_thr});
    else if (sk > kink_thr)
      trig.push_back({k, 1, sk / kink_thr});
    else if (whop[kk] > whop_thr)
      trig.push_back({k, 2, whop[kk] / whop_thr});
  }
  // Collapse runs of adjacent triggers to the strongest representative.
  std::vector<Trigger> kept;
  for (size_t i = 0; i < trig.size();) {
    size_t jx = i;
    size_t best = i;
    while (jx + 1 < trig.size() && trig[jx + 1].k - trig[jx].k <= 2) {
      ++jx;
      if (trig[jx].strength > trig[best].strength ||
          (trig[jx].kind < trig[best].kind)) {
        if (trig[jx].kind <= trig[best].kind ||
            trig[jx].strength > 4.0 * trig[best].strength)
          best = jx;
      }
    }
    kept.push_back(trig[best]);
    i = jx + 1;
  }

  for (const Trigger& t : kept) {
    const size_t kk = static_cast<size_t>(t.k);
    Breakpoint bp;
    if (t.kind == 0) {
      bp.kind = BreakpointKind::discontinuity;
      bp.alpha = box.alpha_lo + step * (t.k + 0.5);
      bp.left_limit = vals[kk];
      bp.right_limit = vals[kk + 1];
    } else {
      bp.kind = t.kind == 1 ? BreakpointKind::kink : BreakpointKind::arc_switch;
      bp.alpha = box.alpha_lo + step * (t.k + 0.5);
      bp.left_limit = bp.right_limit = 0.5 * (vals[kk] + vals[kk + 1]);
    }
    out.breakpoints.push_back(bp);
  }
  out.b1 = 0;
  for (const auto& bp : out.breakpoints)
    if (bp.kind == BreakpointKind::discontinuity) ++out.b1;

  // Segment the grid at breakpoints.
  std::vector<int> cut{0};
  {
    size_t bi = 0;
    for (int k = 0; k < n; ++k) {
      double a = box.alpha_lo + step * k;
      while (bi < out.breakpoints.size() && out.breakpoints[bi].alpha < a) {
        cut.push_back(k);
        ++bi;
      }
    }
    while (bi++ < out.breakpoints.size()) cut.push_back(n - 1);
  }
  cut.push_back(n);

  for (size_t s = 0; s + 1 < cut.size(); ++s) {
    int k0 = cut[s], k1 = cut[s + 1] - 1;
    if (k1 < k0) k1 = k0;
    Segment seg;
    seg.alpha_lo = s == 0 ? box.alpha_lo : out.breakpoints[s - 1].alpha;
    seg.alpha_hi =
        s + 2 == cut.size() ? box.alpha_hi : out.breakpoints[s].alpha;
    seg.left_limit = vals[static_cast<size_t>(k0)];
    seg.right_limit = vals[static_cast<size_t>(k1)];
    seg.min_value = std::numeric_limits<double>::infinity();
    seg.max_value = -seg.min_value;
    for (int k = k0; k <= k1; ++k) {
      seg.min_value = std::min(seg.min_value, vals[static_cast<size_t>(k)]);
      seg.max_value = std::max(seg.max_value, vals[static_cast<size_t>(k)]);
    }
    for (int k = k0 + 1; k < k1; ++k) {
      const size_t kk = static_cast<size_t>(k);
      bool mx = vals[kk] > vals[kk - 1] && vals[kk] > vals[kk + 1];
      bool mn = vals[kk] < vals[kk - 1] && vals[kk] < vals[kk + 1];
      if (mx || mn) seg.interior_extreme_values.push_back(vals[kk]);
    }
    ArcDescriptor arc;
    arc.alpha_lo = seg.alpha_lo;
    arc.alpha_hi = seg.alpha_hi;
    int km = (k0 + k1) / 2;
    const size_t kmm = static_cast<size_t>(km);
    arc.witness_alpha = box.alpha_lo + step * km;
    arc.witness_w = wins[kmm].empty() ? 0.0 : wins[kmm][0];
    ActiveSet act = active_at(arc.witness_alpha, wins[kmm], box, l);
    if (!act.boundaries.empty()) {
      arc.source = CandidateSource::boundary;
      arc.boundary_index = act.boundaries.front();
    } else if (!act.edges.empty()) {
      const size_t ez = static_cast<size_t>(act.edges.front());
      bool low = wins[kmm][ez] - box.lo[ez] <= box.hi[ez] - wins[kmm][ez];
      arc.source =
          low ? CandidateSource::edge_low : CandidateSource::edge_high;
    } else {
      arc.source = CandidateSource::critical;
    }
    if (l != nullptr) {
      CompiledLandscape cl = CompiledLandscape::compile(*l);
      std::vector<double> x(wins[kmm].size() + 1);
      x[0] = arc.witness_alpha;
      std::copy(wins[kmm].begin(), wins[kmm].end(), x.begin() + 1);
      arc.region = cl.region_of(x);
    }
    arc.witness_residual =
        kkt_residual(f, arc.witness_alpha, wins[kmm], box, l, act);
    double hop_max = 0.0;
    for (int k = k0; k < k1; ++k)
      hop_max = std::max(hop_max, whop[static_cast<size_t>(k)]);
    arc.monotonic = hop_max < 0.02;
    seg.arc = static_cast<int>(out.arcs.size());
    out.arcs.push_back(arc);
    out.segments.push_back(std::move(seg));
  }

  // Samples, one per grid point, annotated with region/source/residual.
  CompiledLandscape cl;
  if (l != nullptr) cl = CompiledLandscape::compile(*l);
  for (int k = 0; k < n; ++k) {
    const size_t kk = static_cast<size_t>(k);
    EnvelopeSample smp;
    smp.alpha = box.alpha_lo + step * k;
    smp.value = vals[kk];
    smp.w = wins[kk].empty() ? 0.0 : wins[kk][0];
    ActiveSet act = active_at(smp.alpha, wins[kk], box, l);
    if (l != nullptr) {
      std::vector<double> x(wins[kk].size() + 1);
      x[0] = smp.alpha;
      std::copy(wins[kk].begin(), wins[kk].end(), x.begin() + 1);
      smp.region = cl.region_of(x);
    }
    smp.source = !act.boundaries.empty() ? CandidateSource::boundary
                 : !act.edges.empty()
                     ? (wins[kk][static_cast<size_t>(act.edges.front())] -
                                box.lo[static_cast<size_t>(
                                    act.edges.front())] <=
                            box.hi[static_cast<size_t>(act.edges.front())] -
                                wins[kk][static_cast<size_t>(act.edges.front())]
                            ? CandidateSource::edge_low
                            : CandidateSource::edge_high)
                     : CandidateSource::critical;
    smp.residual = kkt_residual(f, smp.alpha, wins[kk], box, l, act);
    out.samples.push_back(smp);
  }

  // Strict grid maxima; the estimated counterpart of the exact b2.
  for (int k = 1; k + 1 < n; ++k) {
    const size_t kk = static_cast<size_t>(k);
    if (vals[kk] > vals[kk - 1] + 1e-12 * scale &&
        vals[kk] > vals[kk + 1] + 1e-12 * scale) {
      LocalMax lm;
      lm.alpha = box.alpha_lo + step * k;
      lm.value = vals[kk];
      lm.residual = out.samples[kk].residual;
      for (const auto& bp : out.breakpoints)
        if (std::fabs(bp.alpha - lm.alpha) <= 2.0 * step)
          lm.at_breakpoint = true;
      out.local_maxima.push_back(lm);
      if (!lm.at_breakpoint) {
        ActiveSet act = active_at(lm.alpha, wins[kk], box, l);
        StationarityPoint sp;
        sp.alpha = lm.alpha;
        sp.w = wins[kk];
        sp.region = out.samples[kk].region;
        sp.active_boundaries = act.boundaries;
        sp.active_edges = act.edges;
        out.stationarity_points.push_back(std::move(sp));
      }
    }
  }
  out.b2 = static_cast<int>(out.local_maxima.size());
  return out;
}

Objective wrap_landscape(const CompiledLandscape& cl) {
  return [&cl](double alpha, const std::vector<double>& w) {
    thread_local std::vector<double> x;
    x.assign(w.size() + 1, 0.0);
    x[0] = alpha;
    std::copy(w.begin(), w.end(), x.begin() + 1);
    return cl.eval(x);
  };
}

}  // namespace

EnvelopeProfile trace_envelope_numeric(const Landscape& l,
                                       const TraceConfig& cfg) {
  CompiledLandscape cl = CompiledLandscape::compile(l);
  return trace_numeric_core(wrap_landscape(cl), l.domain, cfg, true, &l);
}

EnvelopeProfile trace_envelope_numeric_serial(const Landscape& l,
                                              const TraceConfig& cfg) {
  CompiledLandscape cl = CompiledLandscape::compile(l);
  return trace_numeric_core(wrap_landscape(cl), l.domain, cfg, false, &l);
}

EnvelopeProfile trace_envelope_numeric(
    const std::function<double(double, const std::vector<double>&)>& f,
    const DomainBox& domain, const TraceConfig& cfg) {
  return trace_numeric_core(f, domain, cfg, true, nullptr);
}

}  // namespace envtrace
