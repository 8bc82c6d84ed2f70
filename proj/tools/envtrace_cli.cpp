// envtrace: trace dual-utility envelopes, count their oscillations, and run
// the tuning/shattering experiments from the command line. Every subcommand
// is deterministic given its inputs, seed, and tolerance profile, and no
// output file is overwritten unless --force is passed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "envtrace/activation.hpp"
#include "envtrace/bounds.hpp"
#include "envtrace/datadriven.hpp"
#include "envtrace/envelope.hpp"
#include "envtrace/error.hpp"
#include "envtrace/gcn.hpp"
#include "envtrace/grid_oracle.hpp"
#include "envtrace/landscape.hpp"
#include "envtrace/oscillation.hpp"
#include "envtrace/pointwise.hpp"
#include "envtrace/random.hpp"
#include "envtrace/rational.hpp"
#include "envtrace/regularity.hpp"

namespace fs = std::filesystem;
using namespace envtrace;

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Tolerance profile hook: ENVTRACE_TOLERANCE_PROFILE=strict|default|loose
// scales the tracer's relative thresholds one decade down or up.
TraceConfig base_trace_config() {
  TraceConfig cfg;
  const char* prof = std::getenv("ENVTRACE_TOLERANCE_PROFILE");
  if (prof == nullptr) return cfg;
  std::string p = prof;
  double scale = 1.0;
  if (p == "strict")
    scale = 0.1;
  else if (p == "loose")
    scale = 10.0;
  else if (p != "default" && !p.empty())
    fail_input("unknown ENVTRACE_TOLERANCE_PROFILE '" + p +
               "' (expected strict, default, or loose)");
  cfg.tol *= scale;
  cfg.discontinuity_rel *= scale;
  cfg.breakpoint_merge *= scale;
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content,
                     bool force) {
  if (!force && fs::exists(path))
    fail_input("refusing to overwrite " + path.string() +
               " (pass --force to allow)");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_input("cannot write " + path.string());
  out << content;
  if (!out.good()) fail_input("short write to " + path.string());
}

void emit(const std::string& out_path, const std::string& content,
          bool force) {
  if (out_path.empty())
    std::fputs(content.c_str(), stdout);
  else
    write_text_file(out_path, content, force);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

// ---------------------------------------------------------------------------
// envelope / surrogate / oracle / oscillation

EnvelopeProfile trace_with(const Landscape& l, const std::string& tracer,
                           const TraceConfig& cfg) {
  if (tracer == "numeric") return trace_envelope_numeric(l, cfg);
  if (tracer == "exact") {
    if (l.d() != 1)
      fail_input("exact tracer requires a one-dimensional parameter box");
    return l.kind == LandscapeKind::constant ? trace_envelope_constant(l, cfg)
                                             : trace_envelope_1d(l, cfg);
  }
  if (tracer != "auto") fail_input("unknown tracer '" + tracer + "'");
  if (l.d() == 1)
    return l.kind == LandscapeKind::constant ? trace_envelope_constant(l, cfg)
                                             : trace_envelope_1d(l, cfg);
  return trace_envelope_numeric(l, cfg);
}

nlohmann::json regularity_json(const RegularityReport& rep) {
  nlohmann::json j;
  j["all_regular"] = rep.all_regular;
  j["recommendation"] = rep.recommendation;
  j["points"] = nlohmann::json::array();
  for (const RegularityPointReport& p : rep.points) {
    nlohmann::json q;
    q["alpha"] = p.point.alpha;
    q["w"] = p.point.w;
    q["region"] = p.point.region;
    q["required_rank"] = p.required_rank;
    q["rank"] = p.rank;
    q["min_singular"] = p.min_singular;
    q["deficient"] = p.deficient;
    j["points"].push_back(q);
  }
  return j;
}

// On tracer degeneracy the exit contract promises a diagnosis: rerun the
// numeric tracer (it does not give up) and rank-check its stationarity
// systems so the user can see which solve collapsed.
void print_degeneracy_report(const Landscape& l, const TraceConfig& cfg) {
  try {
    TraceConfig numeric_cfg = cfg;
    numeric_cfg.alpha_samples = 257;
    EnvelopeProfile p = trace_envelope_numeric(l, numeric_cfg);
    RegularityReport rep = check_regularity(l, p.stationarity_points);
    std::fprintf(stderr, "regularity report:\n%s\n",
                 regularity_json(rep).dump(2).c_str());
  } catch (const Error& inner) {
    std::fprintf(stderr, "regularity report unavailable: %s\n", inner.what());
  }
}

nlohmann::json profile_summary(const EnvelopeProfile& p) {
  OscillationReport osc = count_oscillations(p);
  nlohmann::json j;
  j["b1"] = p.b1;
  j["b2"] = p.b2;
  j["arcs"] = p.arcs.size();
  j["segments"] = p.segments.size();
  j["breakpoints"] = p.breakpoints.size();
  j["local_maxima"] = p.local_maxima.size();
  j["estimated"] = p.estimated;
  j["oscillations"] = osc.oscillations;
  j["oscillation_bound"] = osc.osc_bound;
  return j;
}

int cmd_envelope(const std::string& path, const std::string& out_dir,
                 const std::string& tracer, int samples, std::uint64_t seed,
                 bool force) {
  Landscape l = load_landscape(read_text_file(path));
  TraceConfig cfg = base_trace_config();
  if (samples > 0) cfg.alpha_samples = samples;
  cfg.seed = seed;
  EnvelopeProfile p;
  try {
    p = trace_with(l, tracer, cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::degeneracy) print_degeneracy_report(l, cfg);
    throw;
  }
  fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  write_text_file(dir / "envelope.csv", envelope_csv(p), force);
  write_text_file(dir / "breakpoints.csv", breakpoints_csv(p), force);
  write_text_file(dir / "localmaxima.csv", localmaxima_csv(p), force);
  write_text_file(dir / "oscillation.json",
                  oscillation_report_json(count_oscillations(p)), force);
  std::printf("%s\n", profile_summary(p).dump(2).c_str());
  return 0;
}

int cmd_surrogate(const std::string& path, const std::string& out_dir,
                  int samples, std::uint64_t seed, bool force) {
  Landscape l = load_landscape(read_text_file(path));
  TraceConfig cfg = base_trace_config();
  if (samples > 0) cfg.alpha_samples = samples;
  cfg.seed = seed;
  EnvelopeProfile p = trace_envelope_numeric(l, cfg);
  fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  write_text_file(dir / "envelope.csv", envelope_csv(p), force);
  write_text_file(dir / "breakpoints.csv", breakpoints_csv(p), force);
  write_text_file(dir / "localmaxima.csv", localmaxima_csv(p), force);
  write_text_file(dir / "oscillation.json",
                  oscillation_report_json(count_oscillations(p)), force);
  nlohmann::json j = profile_summary(p);
  if (l.d() == 1) {
    // Agreement against the exact pointwise maximizer, sampled on the
    // surrogate's own grid.
    CompiledLandscape cl = CompiledLandscape::compile(l);
    double worst = 0.0;
    for (const EnvelopeSample& s : p.samples)
      worst = std::max(worst,
                       std::abs(s.value - envelope_at(cl, s.alpha).value));
    j["max_abs_diff_vs_exact"] = worst;
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_oracle(const std::string& path, const std::string& out_dir,
               int resolution, bool compare, bool force) {
  Landscape l = load_landscape(read_text_file(path));
  GridTrace t = grid_oracle(l, resolution);
  std::string csv = "alpha,value\n";
  for (std::size_t i = 0; i < t.alphas.size(); ++i)
    csv += fmt_double(t.alphas[i]) + "," + fmt_double(t.values[i]) + "\n";
  fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  write_text_file(dir / "oracle.csv", csv, force);
  nlohmann::json j;
  j["resolution"] = resolution;
  j["rows"] = t.alphas.size();
  if (compare && l.d() == 1) {
    CompiledLandscape cl = CompiledLandscape::compile(l);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.alphas.size(); ++i)
      worst = std::max(worst,
                       std::abs(t.values[i] - envelope_at(cl, t.alphas[i]).value));
    j["max_abs_diff_vs_exact"] = worst;
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_oscillation(const std::string& path, const std::string& out_file,
                    const std::string& tracer, bool force) {
  Landscape l = load_landscape(read_text_file(path));
  EnvelopeProfile p = trace_with(l, tracer, base_trace_config());
  emit(out_file, oscillation_report_json(count_oscillations(p)), force);
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const std::vector<int>& warren, int lemma51,
               const std::vector<int>& arrangement) {
  int modes = static_cast<int>(!warren.empty()) +
              static_cast<int>(lemma51 >= 0) +
              static_cast<int>(!arrangement.empty());
  if (modes != 1)
    fail_input(
        "bounds: pass exactly one of --warren D N, --lemma51 DP, or the "
        "four positional arguments N M d Delta");
  nlohmann::json j;
  if (!warren.empty()) {
    if (warren.size() != 2) fail_input("--warren expects two integers: D N");
    j["formula"] = "warren-components";
    j["degree"] = warren[0];
    j["nvars"] = warren[1];
    j["components"] = warren_components(warren[0], warren[1]);
  } else if (lemma51 >= 0) {
    if (lemma51 < 1) fail_input("--lemma51 expects a piece degree >= 1");
    BoundFigures b = single_piece_bounds(lemma51);
    j["formula"] = b.formula_id;
    j["disc_bound"] = b.discontinuity_bound;
    j["local_max_bound"] = b.local_max_bound;
    j["oscillation_bound"] = b.oscillation_bound;
    j["pdim_order"] = b.pdim_bound_order;
  } else {
    if (arrangement.size() != 4)
      fail_input("bounds expects four positional integers: N M d Delta");
    BoundFigures b = multi_piece_bounds(arrangement[0], arrangement[1],
                                        arrangement[2], arrangement[3]);
    j["formula"] = b.formula_id;
    j["disc_bound"] = b.discontinuity_bound;
    j["local_max_bound"] = b.local_max_bound;
    j["oscillation_bound"] = b.oscillation_bound;
    j["pdim_order"] = b.pdim_bound_order;
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// tune / shatter: registered instance families

InstanceDistribution activation_distribution() {
  InstanceDistribution dist;
  dist.name = "activation";
  dist.generator = [](std::uint64_t seed) {
    return build_activation_landscape(gen_activation_spec(seed));
  };
  dist.utility_lo = -64.0;
  dist.utility_hi = 64.0;
  return dist;
}

// The GCN dual loss is not a polynomial landscape, so its tuning loop runs
// on sampled utility rows (utility = 1 - loss) over a fixed alpha grid.
struct SampledGcnPool {
  std::vector<double> alphas;
  std::vector<std::vector<double>> utilities;  // one row per instance
};

SampledGcnPool sample_gcn_pool(std::uint64_t base_seed, int count,
                               const std::vector<double>& alphas) {
  SampledGcnPool pool;
  pool.alphas = alphas;
  pool.utilities.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GcnInstance inst = gen_gcn_instance(Rng::mix(base_seed, i));
    std::vector<double> losses = gcn_dual_sweep(inst, alphas);
    std::vector<double>& u = pool.utilities[static_cast<std::size_t>(i)];
    u.resize(losses.size());
    for (std::size_t a = 0; a < losses.size(); ++a) u[a] = 1.0 - losses[a];
  }
  return pool;
}

std::vector<double> pool_row_mean(const SampledGcnPool& pool) {
  std::vector<double> mean(pool.alphas.size(), 0.0);
  for (const auto& row : pool.utilities)
    for (std::size_t a = 0; a < row.size(); ++a) mean[a] += row[a];
  for (double& v : mean)
    v /= static_cast<double>(pool.utilities.size());
  return mean;
}

std::size_t argmax_low_tie(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

TuningReport gcn_erm_tune(int m, std::uint64_t seed, int grid_points,
                          int heldout_factor) {
  std::uint64_t train_base = Rng::mix(seed, 1);
  std::uint64_t held_base = Rng::mix(seed, 2);
  std::vector<double> alphas = linspace(0.125, 4.0, grid_points);
  SampledGcnPool train = sample_gcn_pool(train_base, m, alphas);
  SampledGcnPool held = sample_gcn_pool(held_base, heldout_factor * m, alphas);
  std::vector<double> train_mean = pool_row_mean(train);
  std::vector<double> held_mean = pool_row_mean(held);
  TuningReport r;
  r.m = m;
  r.candidates = alphas;
  std::size_t hat = argmax_low_tie(train_mean);
  std::size_t star = argmax_low_tie(held_mean);
  r.alpha_hat = alphas[hat];
  r.alpha_star = alphas[star];
  r.train_value = train_mean[hat];
  r.heldout_at_hat = held_mean[hat];
  r.heldout_at_star = held_mean[star];
  r.gap = std::abs(r.heldout_at_star - r.heldout_at_hat);
  r.heldout_size = static_cast<int>(held.utilities.size());
  std::size_t n = held.utilities.size();
  if (n > 1) {
    double ss = 0.0;
    for (const auto& row : held.utilities) {
      double d = row[star] - r.heldout_at_star;
      ss += d * d;
    }
    r.heldout_noise =
        std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
  }
  return r;
}

GapCurve gcn_gap_curve(const std::vector<int>& m_list, int trials,
                       std::uint64_t seed, int grid_points,
                       int heldout_factor) {
  if (trials < 10) fail_input("tune: need at least 10 trials");
  std::vector<double> alphas = linspace(0.125, 4.0, grid_points);
  int m_max = *std::max_element(m_list.begin(), m_list.end());
  SampledGcnPool held =
      sample_gcn_pool(Rng::mix(seed, 2), heldout_factor * m_max, alphas);
  std::vector<double> held_mean = pool_row_mean(held);
  std::size_t star = argmax_low_tie(held_mean);
  GapCurve curve;
  curve.trials = trials;
  curve.heldout_size = static_cast<int>(held.utilities.size());
  curve.alpha_star = alphas[star];
  std::uint64_t train_base = Rng::mix(seed, 1);
  for (std::size_t k = 0; k < m_list.size(); ++k) {
    GapCurvePoint p;
    p.m = m_list[k];
    std::vector<double> gaps, devs;
    for (int t = 0; t < trials; ++t) {
      int flat = static_cast<int>(k) * trials + t;
      SampledGcnPool train =
          sample_gcn_pool(Rng::mix(train_base, flat), p.m, alphas);
      std::vector<double> train_mean = pool_row_mean(train);
      std::size_t hat = argmax_low_tie(train_mean);
      gaps.push_back(std::abs(held_mean[star] - held_mean[hat]));
      double dev = 0.0;
      for (std::size_t a = 0; a < alphas.size(); ++a)
        dev = std::max(dev, std::abs(train_mean[a] - held_mean[a]));
      devs.push_back(dev);
    }
    for (double g : gaps) p.mean_gap += g;
    p.mean_gap /= static_cast<double>(trials);
    double ss = 0.0;
    for (double g : gaps) ss += (g - p.mean_gap) * (g - p.mean_gap);
    p.std_gap =
        trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
    std::sort(devs.begin(), devs.end());
    p.median_dev = devs[devs.size() / 2];
    curve.points.push_back(p);
  }
  curve.slope_fit = 0.0;
  {
    // Same log-log fit the landscape-family curve uses.
    std::vector<std::pair<double, double>> xy;
    for (const GapCurvePoint& p : curve.points)
      if (p.mean_gap > 0.0) xy.emplace_back(std::log(double(p.m)),
                                            std::log(p.mean_gap));
    if (xy.size() >= 2) {
      double xb = 0, yb = 0;
      for (auto& [x, y] : xy) { xb += x; yb += y; }
      xb /= double(xy.size());
      yb /= double(xy.size());
      double num = 0, den = 0;
      for (auto& [x, y] : xy) {
        num += (x - xb) * (y - yb);
        den += (x - xb) * (x - xb);
      }
      if (den > 0) curve.slope_fit = num / den;
    }
  }
  return curve;
}

int cmd_tune(const std::string& family, std::vector<int> m_list, int trials,
             std::uint64_t seed, const std::string& mode, int grid_points,
             const std::string& out_dir, bool force) {
  if (m_list.empty()) fail_input("tune: pass at least one --m");
  for (int m : m_list) {
    if (m < 1) fail_input("tune: every m must be at least 1");
  }
  TuningConfig cfg;
  cfg.grid_points = grid_points;
  if (mode == "grid")
    cfg.mode = AlphaEval::grid;
  else if (mode != "exact")
    fail_input("tune: --mode must be exact or grid");

  bool curve_mode = m_list.size() > 1 || trials > 0;
  fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);

  if (family == "gcn") {
    if (curve_mode) {
      GapCurve c = gcn_gap_curve(m_list, trials > 0 ? trials : 10, seed,
                                 grid_points, cfg.heldout_factor);
      write_text_file(dir / "gapcurve.csv", gapcurve_csv(c), force);
      std::printf("wrote %s (%zu rows, slope %.4f)\n",
                  (dir / "gapcurve.csv").c_str(), c.points.size(),
                  c.slope_fit);
    } else {
      TuningReport r =
          gcn_erm_tune(m_list[0], seed, grid_points, cfg.heldout_factor);
      std::string json = tuning_report_json(r);
      if (!out_dir.empty())
        write_text_file(dir / "tuning.json", json, force);
      std::fputs(json.c_str(), stdout);
    }
    return 0;
  }

  InstanceDistribution dist;
  if (family == "synthetic-poly")
    dist = synthetic_cubic_distribution();
  else if (family == "activation")
    dist = activation_distribution();
  else
    fail_input("tune: unknown family '" + family +
               "' (expected synthetic-poly, activation, or gcn)");

  if (curve_mode) {
    GapCurve c = gap_curve(dist, m_list, trials > 0 ? trials : 10, seed, cfg);
    write_text_file(dir / "gapcurve.csv", gapcurve_csv(c), force);
    std::printf("wrote %s (%zu rows, slope %.4f)\n",
                (dir / "gapcurve.csv").c_str(), c.points.size(), c.slope_fit);
  } else {
    TuningReport r = erm_tune(dist, m_list[0], seed, cfg);
    std::string json = tuning_report_json(r);
    if (!out_dir.empty()) write_text_file(dir / "tuning.json", json, force);
    std::fputs(json.c_str(), stdout);
  }
  return 0;
}

int cmd_shatter(const std::string& family, int pool_size, int max_k,
                std::uint64_t seed, int alpha_candidates,
                const std::string& out_file, bool force) {
  DualPool pool;
  if (family == "gcn") {
    pool.alphas = linspace(0.125, 4.0, alpha_candidates);
    SampledGcnPool g = sample_gcn_pool(Rng::mix(seed, 0x706f6f6c), pool_size,
                                       pool.alphas);
    pool.values = std::move(g.utilities);
  } else if (family == "synthetic-poly") {
    pool = sample_dual_pool(synthetic_cubic_distribution(), pool_size, seed,
                            alpha_candidates);
  } else if (family == "activation") {
    pool = sample_dual_pool(activation_distribution(), pool_size, seed,
                            alpha_candidates);
  } else {
    fail_input("shatter: unknown family '" + family + "'");
  }
  ShatterResult r = shattering_lower_bound(pool, max_k);
  nlohmann::json j;
  j["family"] = family;
  j["pool_size"] = pool.values.size();
  j["alpha_candidates"] = pool.alphas.size();
  j["max_set_size"] = max_k;
  j["pdim_lower"] = r.pdim_lower;
  j["budget_exceeded"] = r.budget_exceeded;
  emit(out_file, j.dump(2) + "\n", force);
  return 0;
}

// ---------------------------------------------------------------------------
// generators / perturb

int cmd_gen_activation(std::uint64_t seed, const std::string& out_file,
                       bool force) {
  emit(out_file, activation_spec_json(gen_activation_spec(seed)) + "\n",
       force);
  return 0;
}

int cmd_gen_gcn(std::uint64_t seed, const std::string& out_file, bool force) {
  emit(out_file, gcn_instance_json(gen_gcn_instance(seed)) + "\n", force);
  return 0;
}

int cmd_perturb(const std::string& path, const std::string& tau_text,
                const std::string& out_file, bool force) {
  Landscape l = load_landscape(read_text_file(path));
  Rational tau = parse_rational(tau_text);
  PerturbedLandscape p = perturb_landscape(l, tau);
  if (!out_file.empty())
    write_text_file(out_file, save_landscape(p.landscape), force);
  nlohmann::json j;
  j["tau"] = rational_to_string(tau);
  j["drift_bound"] = rational_to_string(p.drift_bound);
  j["drift_bound_value"] = to_double(p.drift_bound);
  if (!out_file.empty()) j["written"] = out_file;
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "envtrace: piecewise envelope tracing, oscillation counting, and "
      "hyperparameter-tuning experiments"};
  app.require_subcommand(1);

  // envelope
  auto* env = app.add_subcommand(
      "envelope", "Trace a landscape's dual-utility envelope to CSV");
  std::string env_path, env_out, env_tracer = "auto";
  int env_samples = 0;
  std::uint64_t env_seed = 0x7261636bULL;
  bool env_force = false;
  env->add_option("landscape", env_path, "landscape JSON file")->required();
  env->add_option("--out", env_out, "output directory (default: .)");
  env->add_option("--tracer", env_tracer, "auto|exact|numeric");
  env->add_option("--samples", env_samples, "alpha sample count");
  env->add_option("--seed", env_seed, "numeric multistart seed");
  env->add_flag("--force", env_force, "overwrite existing outputs");

  // surrogate
  auto* sur = app.add_subcommand(
      "surrogate",
      "Trace with the numeric surrogate and report agreement with the exact "
      "maximizer where one exists");
  std::string sur_path, sur_out;
  int sur_samples = 0;
  std::uint64_t sur_seed = 0x7261636bULL;
  bool sur_force = false;
  sur->add_option("landscape", sur_path, "landscape JSON file")->required();
  sur->add_option("--out", sur_out, "output directory (default: .)");
  sur->add_option("--samples", sur_samples, "alpha sample count");
  sur->add_option("--seed", sur_seed, "numeric multistart seed");
  sur->add_flag("--force", sur_force, "overwrite existing outputs");

  // oracle
  auto* ora = app.add_subcommand(
      "oracle", "Dense grid maximization, the tracer's cross-check");
  std::string ora_path, ora_out;
  int ora_res = 2001;
  bool ora_cmp = false, ora_force = false;
  ora->add_option("landscape", ora_path, "landscape JSON file")->required();
  ora->add_option("--resolution", ora_res, "grid points per axis");
  ora->add_option("--out", ora_out, "output directory (default: .)");
  ora->add_flag("--compare", ora_cmp,
                "also print max |oracle - exact| for d = 1");
  ora->add_flag("--force", ora_force, "overwrite existing outputs");

  // oscillation
  auto* osc = app.add_subcommand(
      "oscillation", "Trace and print the oscillation report JSON");
  std::string osc_path, osc_out, osc_tracer = "auto";
  bool osc_force = false;
  osc->add_option("landscape", osc_path, "landscape JSON file")->required();
  osc->add_option("--out", osc_out, "output file (default: stdout)");
  osc->add_option("--tracer", osc_tracer, "auto|exact|numeric");
  osc->add_flag("--force", osc_force, "overwrite existing outputs");

  // bounds
  auto* bnd = app.add_subcommand(
      "bounds", "Print closed-form envelope complexity ceilings as JSON");
  std::vector<int> bnd_warren, bnd_pos;
  int bnd_lemma51 = -1;
  bnd->add_option("--warren", bnd_warren,
                  "D N: zero-set component ceiling for degree D in N vars")
      ->expected(2);
  bnd->add_option("--lemma51", bnd_lemma51,
                  "DP: single-piece ceilings for piece degree DP");
  bnd->add_option("figures", bnd_pos,
                  "N M d Delta: arrangement ceilings for N regions, M "
                  "boundaries, d parameters, degree Delta")
      ->expected(0, 4);

  // tune
  auto* tun = app.add_subcommand(
      "tune", "ERM-tune alpha on a registered instance family");
  std::string tun_family, tun_out, tun_mode = "exact";
  std::vector<int> tun_m;
  int tun_trials = 0, tun_grid = 512;
  std::uint64_t tun_seed = 0;
  bool tun_force = false;
  tun->add_option("family", tun_family, "synthetic-poly | activation | gcn")
      ->required();
  tun->add_option("--m", tun_m, "sample size(s); several m's make a curve")
      ->required();
  tun->add_option("--trials", tun_trials, "trials per m (makes a gap curve)");
  tun->add_option("--seed", tun_seed, "experiment seed")->required();
  tun->add_option("--mode", tun_mode, "candidate alphas: exact | grid");
  tun->add_option("--grid", tun_grid, "grid density for grid mode");
  tun->add_option("--out", tun_out, "output directory");
  tun->add_flag("--force", tun_force, "overwrite existing outputs");

  // shatter
  auto* sha = app.add_subcommand(
      "shatter", "Empirical pseudo-dimension lower bound for a family");
  std::string sha_family, sha_out;
  int sha_pool = 12, sha_maxk = 4, sha_cands = 128;
  std::uint64_t sha_seed = 0;
  bool sha_force = false;
  sha->add_option("family", sha_family, "synthetic-poly | activation | gcn")
      ->required();
  sha->add_option("--pool", sha_pool, "instance pool size");
  sha->add_option("--max-k", sha_maxk, "largest set size to try");
  sha->add_option("--alpha-candidates", sha_cands, "alpha grid density");
  sha->add_option("--seed", sha_seed, "pool seed")->required();
  sha->add_option("--out", sha_out, "output file (default: stdout)");
  sha->add_flag("--force", sha_force, "overwrite existing outputs");

  // gen-activation / gen-gcn
  auto* ga = app.add_subcommand("gen-activation",
                                "Emit a seeded activation-tuning spec");
  std::string ga_out;
  std::uint64_t ga_seed = 0;
  bool ga_force = false;
  ga->add_option("--seed", ga_seed, "generator seed")->required();
  ga->add_option("--out", ga_out, "output file (default: stdout)");
  ga->add_flag("--force", ga_force, "overwrite existing outputs");

  auto* gg = app.add_subcommand("gen-gcn", "Emit a seeded tiny GCN instance");
  std::string gg_out;
  std::uint64_t gg_seed = 0;
  bool gg_force = false;
  gg->add_option("--seed", gg_seed, "generator seed")->required();
  gg->add_option("--out", gg_out, "output file (default: stdout)");
  gg->add_flag("--force", gg_force, "overwrite existing outputs");

  // perturb
  auto* per = app.add_subcommand(
      "perturb", "Tilt a landscape to break stationary-point degeneracy");
  std::string per_path, per_tau = "1/1000", per_out;
  bool per_force = false;
  per->add_option("landscape", per_path, "landscape JSON file")->required();
  per->add_option("--tau", per_tau, "tilt size (exact rational, e.g. 1/1000)");
  per->add_option("--out", per_out, "write the tilted landscape here");
  per->add_flag("--force", per_force, "overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (env->parsed())
      return cmd_envelope(env_path, env_out, env_tracer, env_samples,
                          env_seed, env_force);
    if (sur->parsed())
      return cmd_surrogate(sur_path, sur_out, sur_samples, sur_seed,
                           sur_force);
    if (ora->parsed())
      return cmd_oracle(ora_path, ora_out, ora_res, ora_cmp, ora_force);
    if (osc->parsed())
      return cmd_oscillation(osc_path, osc_out, osc_tracer, osc_force);
    if (bnd->parsed()) return cmd_bounds(bnd_warren, bnd_lemma51, bnd_pos);
    if (tun->parsed())
      return cmd_tune(tun_family, tun_m, tun_trials, tun_seed, tun_mode,
                      tun_grid, tun_out, tun_force);
    if (sha->parsed())
      return cmd_shatter(sha_family, sha_pool, sha_maxk, sha_seed, sha_cands,
                         sha_out, sha_force);
    if (ga->parsed()) return cmd_gen_activation(ga_seed, ga_out, ga_force);
    if (gg->parsed()) return cmd_gen_gcn(gg_seed, gg_out, gg_force);
    if (per->parsed())
      return cmd_perturb(per_path, per_tau, per_out, per_force);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::input ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
