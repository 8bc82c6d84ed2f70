#include "envtrace/datadriven.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <utility>

#include "json.hpp"

#include "envtrace/error.hpp"
#include "envtrace/families.hpp"
#include "envtrace/fasteval.hpp"
#include "envtrace/pointwise.hpp"
#include "envtrace/random.hpp"
#include "envtrace/rational.hpp"

namespace envtrace {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One traced training / held-out instance. For one-dimensional landscapes
// the dual utility is evaluated exactly at any alpha via the compiled
// pointwise maximizer; for wider boxes only the numeric tracer's sample
// grid is available and values in between are interpolated.
struct TracedInstance {
  CompiledLandscape cl;
  EnvelopeProfile profile;
  bool pointwise = false;
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
};

bool trace_instance(const Landscape& l, int grid_points, TracedInstance* out) {
  try {
    out->alpha_lo = to_double(l.domain.alpha_lo);
    out->alpha_hi = to_double(l.domain.alpha_hi);
    if (l.d() == 1) {
      TraceConfig cfg;
      cfg.alpha_samples = 129;  // structure comes from events, not samples
      out->profile = l.kind == LandscapeKind::constant
                         ? trace_envelope_constant(l, cfg)
                         : trace_envelope_1d(l, cfg);
      out->cl = CompiledLandscape::compile(l);
      out->pointwise = true;
    } else {
      TraceConfig cfg;
      cfg.alpha_samples = std::max(grid_points, 65);
      out->profile = trace_envelope_numeric(l, cfg);
      out->pointwise = false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

double instance_value(const TracedInstance& t, double alpha) {
  if (t.pointwise) return envelope_at(t.cl, alpha).value;
  const auto& s = t.profile.samples;
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

struct EvalPool {
  std::vector<TracedInstance> items;
  int skipped = 0;
  bool all_pointwise = true;
};

EvalPool trace_pool(const InstanceDistribution& dist, std::uint64_t base_seed,
                    int count, int grid_points, bool parallel) {
  std::vector<TracedInstance> slots(static_cast<std::size_t>(count));
  std::vector<char> ok(static_cast<std::size_t>(count), 0);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int i = 0; i < count; ++i) {
    try {
      Landscape l = dist.generator(Rng::mix(base_seed, i));
      ok[static_cast<std::size_t>(i)] =
          trace_instance(l, grid_points, &slots[static_cast<std::size_t>(i)]);
    } catch (const Error&) {
      ok[static_cast<std::size_t>(i)] = 0;
    }
  }
  EvalPool pool;
  pool.items.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (!ok[static_cast<std::size_t>(i)]) {
      ++pool.skipped;
      continue;
    }
    pool.all_pointwise &= slots[static_cast<std::size_t>(i)].pointwise;
    pool.items.push_back(std::move(slots[static_cast<std::size_t>(i)]));
  }
  return pool;
}

// Mean dual utility over the pool at one alpha, summed in instance order so
// serial and parallel callers agree bit-for-bit.
double pool_mean(const EvalPool& pool, double alpha) {
  double sum = 0.0;
  for (const TracedInstance& t : pool.items) sum += instance_value(t, alpha);
  return sum / static_cast<double>(pool.items.size());
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

void sort_unique(std::vector<double>* xs) {
  std::sort(xs->begin(), xs->end());
  xs->erase(std::unique(xs->begin(), xs->end()), xs->end());
}

// Candidate alphas for the empirical argmax: every traced breakpoint, every
// interior local maximizer, and the domain endpoints. Grid mode (and any
// pool with a sampled, non-pointwise instance) uses a uniform grid instead.
std::vector<double> candidate_alphas(const EvalPool& pool,
                                     const TuningConfig& cfg) {
  double lo = pool.items.front().alpha_lo;
  double hi = pool.items.front().alpha_hi;
  if (cfg.mode == AlphaEval::grid || !pool.all_pointwise)
    return linspace(lo, hi, std::max(2, cfg.grid_points));
  std::vector<double> cands{lo, hi};
  for (const TracedInstance& t : pool.items) {
    for (const Breakpoint& b : t.profile.breakpoints) cands.push_back(b.alpha);
    for (const LocalMax& x : t.profile.local_maxima) cands.push_back(x.alpha);
  }
  sort_unique(&cands);
  return cands;
}

// Argmax with ties broken toward smaller alpha: first strict improvement in
// ascending candidate order wins.
std::pair<double, double> argmax_over(
    const std::vector<double>& alphas,
    const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {alphas[best], values[best]};
}

std::vector<double> pool_means(const EvalPool& pool,
                               const std::vector<double>& alphas,
                               bool parallel) {
  std::vector<double> means(alphas.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0;
       i < static_cast<std::ptrdiff_t>(alphas.size()); ++i)
    means[static_cast<std::size_t>(i)] =
        pool_mean(pool, alphas[static_cast<std::size_t>(i)]);
  return means;
}

double heldout_stderr(const EvalPool& pool, double alpha, double mean) {
  std::size_t n = pool.items.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (const TracedInstance& t : pool.items) {
    double d = instance_value(t, alpha) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
}

double slope_of_log_log(const std::vector<GapCurvePoint>& pts) {
  std::vector<std::pair<double, double>> xy;
  for (const GapCurvePoint& p : pts)
    if (p.mean_gap > 0.0 && std::isfinite(p.mean_gap))
      xy.emplace_back(std::log(static_cast<double>(p.m)),
                      std::log(p.mean_gap));
  if (xy.size() < 2) return 0.0;
  double xbar = 0.0, ybar = 0.0;
  for (auto& [x, y] : xy) {
    xbar += x;
    ybar += y;
  }
  xbar /= static_cast<double>(xy.size());
  ybar /= static_cast<double>(xy.size());
  double num = 0.0, den = 0.0;
  for (auto& [x, y] : xy) {
    num += (x - xbar) * (y - ybar);
    den += (x - xbar) * (x - xbar);
  }
  return den > 0.0 ? num / den : 0.0;
}

GapCurve gap_curve_core(const InstanceDistribution& dist,
                        const std::vector<int>& m_list, int trials,
                        std::uint64_t seed, const TuningConfig& cfg,
                        bool parallel) {
  if (m_list.empty()) fail_input("gap_curve: empty m list");
  for (int m : m_list)
    if (m < 1) fail_input("gap_curve: every m must be at least 1");
  if (trials < 10) fail_input("gap_curve: need at least 10 trials");

  std::uint64_t train_base = Rng::mix(Rng::mix(seed, cfg.salt), 1);
  std::uint64_t held_base = Rng::mix(Rng::mix(seed, cfg.salt), 2);

  int m_max = *std::max_element(m_list.begin(), m_list.end());
  int heldout = cfg.heldout_factor * m_max;
  EvalPool held = trace_pool(dist, held_base, heldout, cfg.grid_points,
                             parallel);
  if (held.items.empty())
    fail_degenerate("gap_curve: every held-out instance failed to trace");

  double alo = held.items.front().alpha_lo;
  double ahi = held.items.front().alpha_hi;
  std::vector<double> star_grid = linspace(alo, ahi, std::max(3, cfg.star_grid));
  std::vector<double> star_means = pool_means(held, star_grid, parallel);
  std::vector<double> dev_grid = linspace(alo, ahi, 33);
  std::vector<double> dev_held = pool_means(held, dev_grid, parallel);

  int n_m = static_cast<int>(m_list.size());
  int n_flat = n_m * trials;
  std::vector<double> hat_alpha(static_cast<std::size_t>(n_flat));
  std::vector<double> trial_dev(static_cast<std::size_t>(n_flat));

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int flat = 0; flat < n_flat; ++flat) {
    int k = flat / trials;  // m index
    int m = m_list[static_cast<std::size_t>(k)];
    EvalPool train = trace_pool(dist, Rng::mix(train_base, flat), m,
                                cfg.grid_points, false);
    std::size_t fi = static_cast<std::size_t>(flat);
    if (train.items.empty()) {
      hat_alpha[fi] = alo;
      trial_dev[fi] = 0.0;
      continue;
    }
    std::vector<double> cands = candidate_alphas(train, cfg);
    std::vector<double> means = pool_means(train, cands, false);
    hat_alpha[fi] = argmax_over(cands, means).first;
    double dev = 0.0;
    for (std::size_t g = 0; g < dev_grid.size(); ++g)
      dev = std::max(dev,
                     std::abs(pool_mean(train, dev_grid[g]) - dev_held[g]));
    trial_dev[fi] = dev;
  }

  // Reference optimum over the star grid united with every trial's argmax,
  // ties toward smaller alpha.
  std::vector<double> star_cands = star_grid;
  star_cands.insert(star_cands.end(), hat_alpha.begin(), hat_alpha.end());
  sort_unique(&star_cands);
  std::vector<double> star_cand_means(star_cands.size());
  for (std::size_t i = 0; i < star_cands.size(); ++i) {
    auto it = std::lower_bound(star_grid.begin(), star_grid.end(),
                               star_cands[i]);
    star_cand_means[i] =
        (it != star_grid.end() && *it == star_cands[i])
            ? star_means[static_cast<std::size_t>(it - star_grid.begin())]
            : pool_mean(held, star_cands[i]);
  }
  auto [alpha_star, star_value] = argmax_over(star_cands, star_cand_means);

  GapCurve curve;
  curve.trials = trials;
  curve.heldout_size = static_cast<int>(held.items.size());
  curve.alpha_star = alpha_star;
  for (int k = 0; k < n_m; ++k) {
    std::vector<double> gaps(static_cast<std::size_t>(trials));
    std::vector<double> devs(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      std::size_t fi = static_cast<std::size_t>(k * trials + t);
      gaps[static_cast<std::size_t>(t)] =
          std::abs(star_value - pool_mean(held, hat_alpha[fi]));
      devs[static_cast<std::size_t>(t)] = trial_dev[fi];
    }
    GapCurvePoint p;
    p.m = m_list[static_cast<std::size_t>(k)];
    for (double g : gaps) p.mean_gap += g;
    p.mean_gap /= static_cast<double>(trials);
    double ss = 0.0;
    for (double g : gaps) ss += (g - p.mean_gap) * (g - p.mean_gap);
    p.std_gap = trials > 1
                    ? std::sqrt(ss / static_cast<double>(trials - 1))
                    : 0.0;
    std::sort(devs.begin(), devs.end());
    p.median_dev = devs[devs.size() / 2];
    curve.points.push_back(p);
  }
  curve.slope_fit = slope_of_log_log(curve.points);
  return curve;
}

}  // namespace

InstanceDistribution synthetic_cubic_distribution() {
  InstanceDistribution dist;
  dist.name = "synthetic-cubic";
  dist.generator = [](std::uint64_t seed) { return gap_family_instance(seed); };
  dist.utility_lo = 0.0;
  dist.utility_hi = 8.0;
  return dist;
}

InstanceDistribution deterministic_distribution(Landscape instance,
                                                std::string name) {
  InstanceDistribution dist;
  dist.name = std::move(name);
  auto shared = std::make_shared<Landscape>(std::move(instance));
  dist.generator = [shared](std::uint64_t) { return *shared; };
  return dist;
}

TuningReport erm_tune(const InstanceDistribution& dist, int m,
                      std::uint64_t seed, const TuningConfig& cfg) {
  if (m < 1) fail_input("erm_tune: m must be at least 1");
  std::uint64_t train_base = Rng::mix(Rng::mix(seed, cfg.salt), 1);
  std::uint64_t held_base = Rng::mix(Rng::mix(seed, cfg.salt), 2);

  EvalPool train = trace_pool(dist, train_base, m, cfg.grid_points, true);
  if (train.items.empty())
    fail_degenerate("erm_tune: every training instance failed to trace");

  TuningReport r;
  r.m = m;
  r.skipped = train.skipped;
  r.candidates = candidate_alphas(train, cfg);
  std::vector<double> means = pool_means(train, r.candidates, true);
  std::tie(r.alpha_hat, r.train_value) = argmax_over(r.candidates, means);

  EvalPool held =
      trace_pool(dist, held_base, cfg.heldout_factor * m, cfg.grid_points,
                 true);
  if (held.items.empty())
    fail_degenerate("erm_tune: every held-out instance failed to trace");
  r.skipped += held.skipped;
  r.heldout_size = static_cast<int>(held.items.size());

  double lo = held.items.front().alpha_lo;
  double hi = held.items.front().alpha_hi;
  std::vector<double> star_cands = linspace(lo, hi, std::max(3, cfg.star_grid));
  star_cands.insert(star_cands.end(), r.candidates.begin(),
                    r.candidates.end());
  star_cands.push_back(r.alpha_hat);
  sort_unique(&star_cands);
  std::vector<double> star_means = pool_means(held, star_cands, true);
  std::tie(r.alpha_star, r.heldout_at_star) =
      argmax_over(star_cands, star_means);
  r.heldout_at_hat = pool_mean(held, r.alpha_hat);
  r.gap = std::abs(r.heldout_at_star - r.heldout_at_hat);
  r.heldout_noise = heldout_stderr(held, r.alpha_star, r.heldout_at_star);
  return r;
}

std::string tuning_report_json(const TuningReport& r) {
  nlohmann::json j;
  j["m"] = r.m;
  j["skipped"] = r.skipped;
  j["alpha_hat"] = r.alpha_hat;
  j["alpha_star"] = r.alpha_star;
  j["train_value"] = r.train_value;
  j["heldout_at_hat"] = r.heldout_at_hat;
  j["heldout_at_star"] = r.heldout_at_star;
  j["gap"] = r.gap;
  j["heldout_noise"] = r.heldout_noise;
  j["heldout_size"] = r.heldout_size;
  j["candidates"] = r.candidates;
  return j.dump(2) + "\n";
}

GapCurve gap_curve(const InstanceDistribution& dist,
                   const std::vector<int>& m_list, int trials,
                   std::uint64_t seed, const TuningConfig& cfg) {
  return gap_curve_core(dist, m_list, trials, seed, cfg, true);
}

GapCurve gap_curve_serial(const InstanceDistribution& dist,
                          const std::vector<int>& m_list, int trials,
                          std::uint64_t seed, const TuningConfig& cfg) {
  return gap_curve_core(dist, m_list, trials, seed, cfg, false);
}

std::string gapcurve_csv(const GapCurve& c) {
  std::string out = "m,mean_gap,std_gap,slope_fit\n";
  for (const GapCurvePoint& p : c.points) {
    out += std::to_string(p.m) + "," + fmt_double(p.mean_gap) + "," +
           fmt_double(p.std_gap) + "," + fmt_double(c.slope_fit) + "\n";
  }
  return out;
}

DualPool sample_dual_pool(const InstanceDistribution& dist, int pool_size,
                          std::uint64_t seed, int alpha_candidates) {
  if (pool_size < 0) fail_input("sample_dual_pool: negative pool size");
  DualPool pool;
  if (pool_size == 0) return pool;
  EvalPool traced = trace_pool(dist, Rng::mix(seed, 0x706f6f6c), pool_size,
                               std::max(alpha_candidates, 65), true);
  if (traced.items.empty())
    fail_degenerate("sample_dual_pool: every instance failed to trace");
  double lo = traced.items.front().alpha_lo;
  double hi = traced.items.front().alpha_hi;
  pool.alphas = linspace(lo, hi, std::max(2, alpha_candidates));
  for (const TracedInstance& t : traced.items)
    for (const Breakpoint& b : t.profile.breakpoints)
      if (b.alpha > lo && b.alpha < hi) pool.alphas.push_back(b.alpha);
  sort_unique(&pool.alphas);
  pool.values.resize(traced.items.size());
  for (std::size_t i = 0; i < traced.items.size(); ++i) {
    pool.values[i].resize(pool.alphas.size());
    for (std::size_t j = 0; j < pool.alphas.size(); ++j)
      pool.values[i][j] = instance_value(traced.items[i], pool.alphas[j]);
  }
  return pool;
}

namespace {

using BitRow = std::vector<std::uint64_t>;

// Threshold behaviors of one instance: for each candidate threshold, the
// bit row (value >= threshold) over the alpha candidates. Thresholds are
// midpoints between consecutive distinct values, subsampled to at most 15,
// deduplicated, and rows that cannot take both signs are dropped.
std::vector<BitRow> threshold_rows(const std::vector<double>& vals) {
  std::vector<double> sorted = vals;
  sort_unique(&sorted);
  if (sorted.size() < 2) return {};
  std::vector<double> thresholds;
  std::size_t gaps = sorted.size() - 1;
  const std::size_t kMax = 15;
  if (gaps <= kMax) {
    for (std::size_t j = 0; j < gaps; ++j)
      thresholds.push_back(0.5 * (sorted[j] + sorted[j + 1]));
  } else {
    for (std::size_t q = 0; q < kMax; ++q) {
      std::size_t j = (q * gaps) / kMax;
      thresholds.push_back(0.5 * (sorted[j] + sorted[j + 1]));
    }
    sort_unique(&thresholds);
  }
  std::size_t blocks = (vals.size() + 63) / 64;
  std::vector<BitRow> rows;
  for (double t : thresholds) {
    BitRow row(blocks, 0);
    for (std::size_t a = 0; a < vals.size(); ++a)
      if (vals[a] >= t) row[a / 64] |= (1ull << (a % 64));
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

// True when the chosen rows realize all 2^k sign patterns across columns.
bool covers_all_patterns(const std::vector<const BitRow*>& rows,
                         std::size_t n_cols) {
  std::size_t k = rows.size();
  std::uint32_t want = 1u << k;
  std::vector<char> seen(want, 0);
  std::uint32_t got = 0;
  std::size_t blocks = (n_cols + 63) / 64;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t width = std::min<std::size_t>(64, n_cols - 64 * b);
    for (std::size_t bit = 0; bit < width; ++bit) {
      std::uint32_t pat = 0;
      for (std::size_t j = 0; j < k; ++j)
        pat |= static_cast<std::uint32_t>(((*rows[j])[b] >> bit) & 1u) << j;
      if (!seen[pat]) {
        seen[pat] = 1;
        if (++got == want) return true;
      }
    }
  }
  return false;
}

// Depth-first search over per-instance threshold choices for one subset.
bool subset_shatters(const std::vector<std::vector<BitRow>>& rows_by_inst,
                     const std::vector<int>& subset, std::size_t n_cols,
                     long long* ops, long long budget, bool* aborted) {
  std::size_t k = subset.size();
  std::vector<std::size_t> choice(k, 0);
  std::vector<const BitRow*> picked(k);
  while (true) {
    for (std::size_t j = 0; j < k; ++j)
      picked[j] =
          &rows_by_inst[static_cast<std::size_t>(subset[j])][choice[j]];
    *ops += static_cast<long long>(n_cols * k);
    if (*ops > budget) {
      *aborted = true;
      return false;
    }
    if (covers_all_patterns(picked, n_cols)) return true;
    std::size_t j = 0;
    while (j < k) {
      if (++choice[j] <
          rows_by_inst[static_cast<std::size_t>(subset[j])].size())
        break;
      choice[j] = 0;
      ++j;
    }
    if (j == k) return false;
  }
}

}  // namespace

ShatterResult shattering_lower_bound(
    const std::vector<std::vector<double>>& values, int max_set_size,
    long long budget) {
  ShatterResult result;
  if (values.empty() || max_set_size <= 0) return result;
  std::size_t n_cols = values[0].size();
  for (const auto& row : values)
    if (row.size() != n_cols)
      fail_input("shattering_lower_bound: ragged value table");
  if (n_cols == 0) return result;

  // Instances that can take both signs under some threshold.
  std::vector<std::vector<BitRow>> rows_by_inst;
  for (const auto& row : values) {
    std::vector<BitRow> rows = threshold_rows(row);
    if (!rows.empty()) rows_by_inst.push_back(std::move(rows));
  }
  int usable = static_cast<int>(rows_by_inst.size());
  int k_cap = std::min(max_set_size, std::min(usable, 20));

  long long ops = 0;
  bool aborted = false;
  for (int k = 1; k <= k_cap && !aborted; ++k) {
    // Lexicographic subset odometer over usable instances.
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) subset[static_cast<std::size_t>(j)] = j;
    bool found = false;
    while (!found && !aborted) {
      found = subset_shatters(rows_by_inst, subset, n_cols, &ops, budget,
                              &aborted);
      if (found || aborted) break;
      int j = k - 1;
      while (j >= 0 &&
             subset[static_cast<std::size_t>(j)] == usable - k + j)
        --j;
      if (j < 0) break;
      ++subset[static_cast<std::size_t>(j)];
      for (int i = j + 1; i < k; ++i)
        subset[static_cast<std::size_t>(i)] =
            subset[static_cast<std::size_t>(i - 1)] + 1;
    }
    if (found)
      result.pdim_lower = k;
    else if (!aborted)
      break;  // shattering is monotone: no k-set means no larger set
  }
  result.budget_exceeded = aborted;
  return result;
}

ShatterResult shattering_lower_bound(const DualPool& pool, int max_set_size,
                                     long long budget) {
  return shattering_lower_bound(pool.values, max_set_size, budget);
}

}  // namespace envtrace
