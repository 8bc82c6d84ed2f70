// Acceptance harness: numbered end-to-end checks over the full pipeline,
// selected with --criterion <N> (or "all"). Each criterion prints exactly
// one line, "criterion N: PASS — detail" or "criterion N: FAIL — detail",
// and the process exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "envtrace/activation.hpp"
#include "envtrace/bounds.hpp"
#include "envtrace/datadriven.hpp"
#include "envtrace/envelope.hpp"
#include "envtrace/families.hpp"
#include "envtrace/gcn.hpp"
#include "envtrace/grid_oracle.hpp"
#include "envtrace/landscape.hpp"
#include "envtrace/oscillation.hpp"
#include "envtrace/pointwise.hpp"
#include "envtrace/random.hpp"
#include "envtrace/rational.hpp"

using namespace envtrace;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Conformance suites. Suite 1: random single-piece polynomial landscapes,
// 200 per degree in {2,3,4,5}. Suite 2: 200 random piecewise-constant
// landscapes with up to 8 connected regions.

constexpr int kSuite1PerDegree = 200;
constexpr int kSuite2Count = 200;

std::vector<std::pair<int, Landscape>> suite1() {
  std::vector<std::pair<int, Landscape>> out;
  out.reserve(4 * kSuite1PerDegree);
  for (int degree = 2; degree <= 5; ++degree)
    for (int i = 0; i < kSuite1PerDegree; ++i)
      out.emplace_back(degree, random_single_piece(
                                   degree, Rng::mix(0xACC1, degree * 1000 + i)));
  return out;
}

std::vector<Landscape> suite2() {
  std::vector<Landscape> out;
  out.reserve(kSuite2Count);
  for (int i = 0; i < kSuite2Count; ++i)
    out.push_back(random_constant_regions(2 + i % 7, Rng::mix(0xACC2, i)));
  return out;
}

EnvelopeProfile trace_either(const Landscape& l) {
  return l.kind == LandscapeKind::constant ? trace_envelope_constant(l)
                                           : trace_envelope_1d(l);
}

// Linear interpolation over a profile's dense sample trace.
double profile_value(const EnvelopeProfile& p, double alpha) {
  const auto& s = p.samples;
  if (s.empty()) return 0.0;
  if (alpha <= s.front().alpha) return s.front().value;
  if (alpha >= s.back().alpha) return s.back().value;
  auto it = std::lower_bound(
      s.begin(), s.end(), alpha,
      [](const EnvelopeSample& a, double x) { return a.alpha < x; });
  const EnvelopeSample& hi = *it;
  const EnvelopeSample& lo = *(it - 1);
  double span = hi.alpha - lo.alpha;
  if (!(span > 0)) return std::max(lo.value, hi.value);
  double f = (alpha - lo.alpha) / span;
  return lo.value + f * (hi.value - lo.value);
}

// ---------------------------------------------------------------------------
// criterion 1: envelope complexity of random single pieces stays within the
// closed-form degree ceilings, 800 landscapes in under five minutes.

Outcome criterion1() {
  auto t0 = Clock::now();
  int violations = 0, traced = 0;
  int worst_b1 = 0, worst_b2 = 0;
  for (const auto& [degree, l] : suite1()) {
    EnvelopeProfile p = trace_envelope_1d(l);
    BoundFigures fig = single_piece_bounds(degree);
    if (p.b1 > fig.discontinuity_bound || p.b2 > fig.local_max_bound)
      ++violations;
    worst_b1 = std::max(worst_b1, p.b1);
    worst_b2 = std::max(worst_b2, p.b2);
    ++traced;
  }
  double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = violations == 0 && elapsed < 300.0;
  o.detail = std::to_string(traced) + " landscapes, " +
             std::to_string(violations) + " ceiling violations, worst B1=" +
             std::to_string(worst_b1) + " B2=" + std::to_string(worst_b2) +
             ", " + fmt(elapsed) + " s";
  return o;
}

// criterion 2: piecewise-constant envelopes jump at most twice per region.

Outcome criterion2() {
  int violations = 0, traced = 0, worst_b1 = 0;
  for (const Landscape& l : suite2()) {
    EnvelopeProfile p = trace_envelope_constant(l);
    if (p.b1 > 2 * l.num_regions()) ++violations;
    worst_b1 = std::max(worst_b1, p.b1);
    ++traced;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(traced) + " landscapes, " +
             std::to_string(violations) + " violations of B1 <= 2N, worst B1=" +
             std::to_string(worst_b1);
  return o;
}

// criterion 3: traced envelopes agree with a dense brute-force grid oracle
// away from breakpoints, to 1e-3 plus one Lipschitz grid step.

Outcome criterion3() {
  std::vector<Landscape> all;
  for (auto& [degree, l] : suite1()) all.push_back(std::move(l));
  for (Landscape& l : suite2()) all.push_back(std::move(l));

  const int kRes = 2001;
  int violations = 0;
  double worst_excess = 0.0;
  long compared = 0;
  for (const Landscape& l : all) {
    EnvelopeProfile p = trace_either(l);
    GridTrace g = grid_oracle(l, kRes);
    double step = g.alphas[1] - g.alphas[0];

    std::vector<char> far(g.alphas.size(), 1);
    for (std::size_t i = 0; i < g.alphas.size(); ++i)
      for (const Breakpoint& b : p.breakpoints)
        if (std::fabs(g.alphas[i] - b.alpha) <= 10.0 * step) {
          far[i] = 0;
          break;
        }

    // Lipschitz estimate from the oracle's own difference quotients,
    // restricted to the far-from-breakpoint region it is applied on.
    double lip = 0.0;
    for (std::size_t i = 1; i < g.alphas.size(); ++i)
      if (far[i] && far[i - 1])
        lip = std::max(lip, std::fabs(g.values[i] - g.values[i - 1]) / step);
    double tol = 1e-3 + lip * step;

    for (std::size_t i = 0; i < g.alphas.size(); ++i) {
      if (!far[i]) continue;
      double diff = std::fabs(profile_value(p, g.alphas[i]) - g.values[i]);
      ++compared;
      if (diff > tol) {
        ++violations;
        worst_excess = std::max(worst_excess, diff - tol);
      }
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(all.size()) + " landscapes, " +
             std::to_string(compared) + " grid points compared, " +
             std::to_string(violations) + " outside tolerance" +
             (violations ? " (worst excess " + fmt(worst_excess) + ")" : "");
  return o;
}

// criterion 4: every traced profile respects the oscillation ceiling
// 2*B2 + 3*B1 + 2 (step profiles additionally oscillate at most B1 times),
// and the two-welled quartic fixture oscillates exactly 4 times.

Outcome criterion4() {
  int violations = 0, profiles = 0;
  for (const auto& [degree, l] : suite1()) {
    EnvelopeProfile p = trace_envelope_1d(l);
    if (!check_oscillation_ceiling(count_oscillations(p)).ok) ++violations;
    ++profiles;
  }
  for (const Landscape& l : suite2()) {
    EnvelopeProfile p = trace_envelope_constant(l);
    OscillationReport r = count_oscillations(p);
    if (!check_oscillation_ceiling(r).ok) ++violations;
    if (r.oscillations > p.b1) ++violations;
    ++profiles;
  }

  // u*(alpha) = alpha(alpha-1)(alpha-2)(alpha-3) over [0, 3]
  const char* quartic_doc = R"({
    "version": 1,
    "domain": {"alpha": ["0", "3"], "w": [["-1", "1"]]},
    "kind": "polynomial",
    "boundaries": [],
    "regions": [{"signs": [], "piece": "a^4 - 6*a^3 + 11*a^2 - 6*a - w1^2"}]
  })";
  OscillationReport quartic =
      count_oscillations(trace_envelope_1d(load_landscape(quartic_doc)));

  Outcome o;
  o.pass = violations == 0 && quartic.oscillations == 4;
  o.detail = std::to_string(profiles) + " profiles, " +
             std::to_string(violations) +
             " ceiling violations, quartic fixture oscillations=" +
             std::to_string(quartic.oscillations) + " (want 4)";
  return o;
}

// criterion 5: the alpha*w - w^3/3 fixture reproduces its frozen goldens.

Outcome criterion5() {
  const char* doc = R"({
    "version": 1,
    "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
    "kind": "polynomial",
    "boundaries": [],
    "regions": [{"signs": [], "piece": "a*w1 - 1/3*w1^3"}]
  })";
  Landscape l = load_landscape(doc);
  EnvelopeProfile p = trace_envelope_1d(l);
  CompiledLandscape cl = CompiledLandscape::compile(l);

  bool one_kink = p.breakpoints.size() == 1 &&
                  p.breakpoints[0].kind == BreakpointKind::kink;
  double bp_alpha = one_kink ? p.breakpoints[0].alpha : -1.0;
  double at_quarter = envelope_at(cl, 0.25).value;
  double at_zero = envelope_at(cl, 0.0).value;
  double at_one = envelope_at(cl, 1.0).value;

  bool pass = one_kink && std::fabs(bp_alpha - 0.25) <= 1e-6 &&
              std::fabs(at_quarter - 1.0 / 12.0) <= 1e-6 &&
              std::fabs(at_zero - 1.0 / 3.0) <= 1e-9 &&
              std::fabs(at_one - 2.0 / 3.0) <= 1e-9;

  // independent confirmation: the dense grid oracle sees the same values
  GridTrace g = grid_oracle(l, 2001);
  auto oracle_at = [&](double alpha) {
    std::size_t i = static_cast<std::size_t>(
        std::lround(alpha * static_cast<double>(g.alphas.size() - 1)));
    return g.values[i];
  };
  pass = pass && std::fabs(oracle_at(0.25) - 1.0 / 12.0) <= 1e-3 &&
         std::fabs(oracle_at(0.0) - 1.0 / 3.0) <= 1e-3 &&
         std::fabs(oracle_at(1.0) - 2.0 / 3.0) <= 1e-3;

  Outcome o;
  o.pass = pass;
  o.detail = std::string("breakpoints=") + std::to_string(p.breakpoints.size()) +
             (one_kink ? " (kink at " + fmt(bp_alpha) + ")" : "") +
             ", u*(0.25)=" + fmt(at_quarter) + ", u*(0)=" + fmt(at_zero) +
             ", u*(1)=" + fmt(at_one);
  return o;
}

// criterion 6: the tuning gap on the synthetic cubic family decays like
// roughly 1/sqrt(m): fitted log-log slope in [-0.7, -0.3] with monotone
// nonincreasing mean gaps, inside ten minutes.

Outcome criterion6() {
  auto t0 = Clock::now();
  GapCurve c =
      gap_curve(synthetic_cubic_distribution(), {4, 16, 64, 256}, 30, 42);
  double elapsed = seconds_since(t0);

  bool monotone = true;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    if (c.points[i].mean_gap > c.points[i - 1].mean_gap) monotone = false;
  bool slope_ok = c.slope_fit >= -0.7 && c.slope_fit <= -0.3;

  std::string gaps;
  for (const GapCurvePoint& p : c.points) {
    if (!gaps.empty()) gaps += "/";
    gaps += fmt(p.mean_gap);
  }
  Outcome o;
  o.pass = monotone && slope_ok && elapsed < 600.0;
  o.detail = "slope=" + fmt(c.slope_fit) + " (want [-0.7,-0.3]), mean gaps " +
             gaps + (monotone ? " monotone" : " NOT monotone") + ", " +
             fmt(elapsed) + " s";
  return o;
}

// criterion 7: the certified shattering lower bound never crosses the
// oscillation-derived upper bound on any family, and the class that ignores
// its instances pins the empirical dimension at exactly 1.

struct FamilyPool {
  std::string name;
  std::vector<std::vector<double>> values;  // one row per instance
  double pdim_upper_bound = 0.0;            // max over instances, c = 2
};

FamilyPool landscape_family_pool(const std::string& name,
                                 const InstanceDistribution& dist,
                                 int instances, std::uint64_t seed) {
  FamilyPool pool;
  pool.name = name;
  const int kGrid = 1025;
  for (int i = 0; i < instances; ++i) {
    Landscape l = dist.generator(Rng::mix(seed, i));
    EnvelopeProfile p = trace_either(l);
    pool.pdim_upper_bound =
        std::max(pool.pdim_upper_bound, pdim_upper(count_oscillations(p)));
    std::vector<double> row(kGrid);
    double lo = to_double(l.domain.alpha_lo);
    double hi = to_double(l.domain.alpha_hi);
    for (int k = 0; k < kGrid; ++k)
      row[static_cast<std::size_t>(k)] =
          profile_value(p, lo + (hi - lo) * k / (kGrid - 1));
    pool.values.push_back(std::move(row));
  }
  return pool;
}

Outcome criterion7() {
  std::vector<FamilyPool> pools;

  InstanceDistribution mixed_poly;
  mixed_poly.generator = [](std::uint64_t s) {
    return random_single_piece(2 + static_cast<int>(s % 4), s);
  };
  pools.push_back(landscape_family_pool("single-piece", mixed_poly, 10, 71));

  InstanceDistribution constant;
  constant.generator = [](std::uint64_t s) {
    return random_constant_regions(2 + static_cast<int>(s % 7), s);
  };
  pools.push_back(landscape_family_pool("piecewise-constant", constant, 10, 72));

  pools.push_back(landscape_family_pool(
      "synthetic-cubic", synthetic_cubic_distribution(), 10, 73));

  InstanceDistribution act;
  act.generator = [](std::uint64_t s) {
    return build_activation_landscape(gen_activation_spec(s));
  };
  pools.push_back(landscape_family_pool("activation", act, 10, 74));

  // graph instances: sampled dual sweeps instead of traced landscapes
  {
    FamilyPool gcn;
    gcn.name = "gcn";
    const int kGrid = 1025;
    std::vector<double> alphas(kGrid);
    for (int k = 0; k < kGrid; ++k)
      alphas[static_cast<std::size_t>(k)] =
          0.125 + (4.0 - 0.125) * k / (kGrid - 1);
    for (int i = 0; i < 10; ++i) {
      GcnInstance inst = gen_gcn_instance(Rng::mix(75, i));
      std::vector<double> losses = gcn_dual_sweep(inst, alphas);
      for (double& v : losses) v = 1.0 - v;  // utility convention
      gcn.pdim_upper_bound =
          std::max(gcn.pdim_upper_bound, pdim_upper(count_oscillations(losses)));
      gcn.values.push_back(std::move(losses));
    }
    pools.push_back(std::move(gcn));
  }

  bool pass = true;
  std::string detail;
  for (const FamilyPool& pool : pools) {
    ShatterResult r = shattering_lower_bound(pool.values, 8);
    bool ok = r.pdim_lower <= pool.pdim_upper_bound + 1e-9;
    pass = pass && ok;
    if (!detail.empty()) detail += ", ";
    detail += pool.name + " " + std::to_string(r.pdim_lower) +
              "<=" + fmt(pool.pdim_upper_bound) + (ok ? "" : " VIOLATED");
  }

  // the instance-blind class: every instance shares one dual function
  const char* cubic_doc = R"({
    "version": 1,
    "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
    "kind": "polynomial",
    "boundaries": [],
    "regions": [{"signs": [], "piece": "a*w1 - 1/3*w1^3"}]
  })";
  DualPool blind = sample_dual_pool(
      deterministic_distribution(load_landscape(cubic_doc)), 8, 7);
  ShatterResult fixed = shattering_lower_bound(blind, 4);
  pass = pass && fixed.pdim_lower == 1;
  detail += ", instance-blind " + std::to_string(fixed.pdim_lower) + " (want 1)";

  Outcome o;
  o.pass = pass;
  o.detail = detail;
  return o;
}

// criterion 8: sampled GCN dual losses are step functions of the graph
// hyperparameter with piece counts inside the closed-form ceiling, and the
// two-node opposite-label fixture is exactly constant.

Outcome criterion8() {
  const int kInstances = 50;
  const int kGrid = 10001;
  std::vector<double> alphas(kGrid);
  for (int k = 0; k < kGrid; ++k)
    alphas[static_cast<std::size_t>(k)] =
        0.125 + (4.0 - 0.125) * k / (kGrid - 1);

  int violations = 0;
  int worst_pieces = 0;
  for (int i = 0; i < kInstances; ++i) {
    GcnInstance inst = gen_gcn_instance(Rng::mix(0x6163, i));
    std::vector<double> sweep = gcn_dual_sweep(inst, alphas);
    std::set<double> distinct(sweep.begin(), sweep.end());
    int jumps = 0;
    for (std::size_t k = 1; k < sweep.size(); ++k)
      if (sweep[k] != sweep[k - 1]) ++jumps;
    double ceiling = gcn_component_bound(inst);
    if (static_cast<double>(distinct.size()) > ceiling + 1.0 ||
        static_cast<double>(jumps) > ceiling)
      ++violations;
    worst_pieces = std::max(worst_pieces, jumps + 1);
  }

  // two nodes, opposite labels, symmetric distances: constant dual loss
  GcnInstance sym;
  sym.n = 2;
  sym.X.resize(2, 1);
  sym.X << 1.0, -1.0;
  sym.delta = Eigen::MatrixXd::Zero(2, 2);
  sym.delta(0, 1) = sym.delta(1, 0) = 1.0;
  sym.labeled = {0, 1};
  sym.labels = {0, 1};
  std::vector<double> sweep = gcn_dual_sweep(sym, alphas);
  double spread = *std::max_element(sweep.begin(), sweep.end()) -
                  *std::min_element(sweep.begin(), sweep.end());

  Outcome o;
  o.pass = violations == 0 && spread == 0.0;
  o.detail = std::to_string(kInstances) + " instances, " +
             std::to_string(violations) +
             " ceiling violations, worst piece count " +
             std::to_string(worst_pieces) + ", symmetric-fixture spread " +
             fmt(spread);
  return o;
}

// criterion 9: tilting every piece by tau moves the envelope by at most the
// reported drift ceiling, measured in sup norm on a dense grid.

Outcome criterion9() {
  const int kRes = 2001;
  int violations = 0;
  double worst_ratio = 0.0;  // measured drift / allowed drift
  for (const auto& [degree, l] : suite1()) {
    GridTrace u = grid_oracle(l, kRes);
    for (const Rational& tau : {Rational(1, 1000), Rational(1, 100)}) {
      PerturbedLandscape tilted = perturb_landscape(l, tau);
      GridTrace v = grid_oracle(tilted.landscape, kRes);
      double sup = 0.0;
      for (std::size_t i = 0; i < u.values.size(); ++i)
        sup = std::max(sup, std::fabs(u.values[i] - v.values[i]));
      double allowed = to_double(tilted.drift_bound);
      if (sup > allowed + 1e-9) ++violations;
      if (allowed > 0) worst_ratio = std::max(worst_ratio, sup / allowed);
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = "800 landscapes x 2 tilts, " + std::to_string(violations) +
             " drift violations, worst measured/allowed " + fmt(worst_ratio);
  return o;
}

// criterion 10: the width-1 activation landscape is the forward pass, and
// the two-point mirrored fixture loses exactly 1/2 under pure relu.

Outcome criterion10() {
  Rng rng(0xAC7u);
  int checked = 0;
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    ActivationSpec spec = gen_activation_spec(rng.next_u64());
    Landscape l = build_activation_landscape(spec);
    double offset = to_double(activation_offset(spec));
    Rng pts(rng.next_u64());
    for (int k = 0; k < 100; ++k) {
      double alpha = pts.next_u01();
      double w = -2.0 + 4.0 * pts.next_u01();
      double structural = evaluate_landscape(l, alpha, {w});
      double direct = offset - activation_loss(spec, alpha, {w});
      worst = std::max(worst, std::fabs(structural - direct));
      ++checked;
    }
  }

  ActivationSpec pair;
  pair.o1 = PiecewiseActivation::relu();
  pair.o2 = PiecewiseActivation::identity();
  pair.data = {{Rational(1), Rational(1)}, {Rational(-1), Rational(1)}};
  Landscape l = build_activation_landscape(pair);
  double best_loss =
      to_double(activation_offset(pair)) - envelope_value(l, 1.0);

  Outcome o;
  o.pass = worst <= 1e-10 && std::fabs(best_loss - 0.5) <= 1e-3;
  o.detail = std::to_string(checked) + " points, worst |structural-direct|=" +
             fmt(worst) + ", mirrored-pair best loss " + fmt(best_loss) +
             " (want 0.5)";
  return o;
}

Outcome run_criterion(int n) {
  switch (n) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
    default: {
      Outcome o;
      o.detail = "unknown criterion";
      return o;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = "all";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      which = argv[++i];
  }
  std::vector<int> selected;
  if (which == "all") {
    for (int n = 1; n <= 10; ++n) selected.push_back(n);
  } else {
    int n = std::atoi(which.c_str());
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: acceptance [--criterion <1-10|all>]\n");
      return 2;
    }
    selected.push_back(n);
  }

  bool all_pass = true;
  for (int n : selected) {
    Outcome o = run_criterion(n);
    std::printf("criterion %d: %s — %s\n", n, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
