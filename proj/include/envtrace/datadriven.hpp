#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "envtrace/envelope.hpp"
#include "envtrace/landscape.hpp"

namespace envtrace {

// A distribution over problem instances: a seeded generator (same seed,
// same instance) plus the range the dual utility values live in.
struct InstanceDistribution {
  std::string name;
  std::function<Landscape(std::uint64_t)> generator;
  double utility_lo = 0.0;
  double utility_hi = 1.0;
};

// The degree-3 single-piece family the generalization-rate experiment runs
// on (see gap_family_instance).
InstanceDistribution synthetic_cubic_distribution();

// Distribution concentrated on one instance: every seed yields a copy.
InstanceDistribution deterministic_distribution(Landscape instance,
                                                std::string name = "point");

enum class AlphaEval {
  exact,  // candidates = instance breakpoints + interior maximizers + ends
  grid    // candidates = uniform alpha grid
};

struct TuningConfig {
  AlphaEval mode = AlphaEval::exact;
  int grid_points = 512;     // grid mode / d >= 2 sampling density
  int heldout_factor = 50;   // held-out sample size = factor x largest m
  int star_grid = 1025;      // reference-optimum search grid density
  std::uint64_t salt = 0;    // extra stream separation when reusing a seed
};

struct TuningReport {
  int m = 0;
  int skipped = 0;  // instances dropped because their trace failed
  double alpha_hat = 0.0;   // empirical argmax over the candidate set
  double alpha_star = 0.0;  // held-out reference optimum
  double train_value = 0.0;       // training mean utility at alpha_hat
  double heldout_at_hat = 0.0;    // held-out mean utility at alpha_hat
  double heldout_at_star = 0.0;   // held-out mean utility at alpha_star
  double gap = 0.0;               // |heldout_at_star - heldout_at_hat|
  double heldout_noise = 0.0;     // standard error of the held-out mean
  int heldout_size = 0;
  std::vector<double> candidates;  // evaluated alpha set, ascending
};

// Draw m instances, trace each dual utility, and pick the alpha maximizing
// the empirical average over the candidate set (ties toward smaller alpha).
// The reference optimum is estimated on a held-out sample of
// heldout_factor x m instances; gap compares the two on the held-out mean.
TuningReport erm_tune(const InstanceDistribution& dist, int m,
                      std::uint64_t seed, const TuningConfig& cfg = {});

std::string tuning_report_json(const TuningReport& r);

struct GapCurvePoint {
  int m = 0;
  double mean_gap = 0.0;
  double std_gap = 0.0;
  double median_dev = 0.0;  // median over trials of the sup distance
                            // between training and held-out means
};

struct GapCurve {
  std::vector<GapCurvePoint> points;  // one per requested m, input order
  double slope_fit = 0.0;  // least-squares slope of log mean_gap vs log m
  int trials = 0;
  int heldout_size = 0;
  double alpha_star = 0.0;
};

// Generalization-gap sweep: for each m, `trials` independent tuning runs
// against one shared held-out sample; reports per-m gap statistics and the
// fitted log-log decay slope. The serial twin produces bit-identical output.
GapCurve gap_curve(const InstanceDistribution& dist,
                   const std::vector<int>& m_list, int trials,
                   std::uint64_t seed, const TuningConfig& cfg = {});
GapCurve gap_curve_serial(const InstanceDistribution& dist,
                          const std::vector<int>& m_list, int trials,
                          std::uint64_t seed, const TuningConfig& cfg = {});

std::string gapcurve_csv(const GapCurve& c);

// Sampled dual functions for a pool of instances: values[i][j] is the dual
// utility of instance i at alphas[j]. The alpha set is a uniform grid
// united with every traced breakpoint of every pooled instance.
struct DualPool {
  std::vector<double> alphas;
  std::vector<std::vector<double>> values;
};

DualPool sample_dual_pool(const InstanceDistribution& dist, int pool_size,
                          std::uint64_t seed, int alpha_candidates = 128);

struct ShatterResult {
  int pdim_lower = 0;          // largest certified shattered set size
  bool budget_exceeded = false;  // search stopped early; result is only a
                                 // lower bound on what the search could find
};

// Largest k (up to max_set_size) such that some k instances together with
// per-instance thresholds realize all 2^k sign patterns across the alpha
// candidates. Thresholds are midpoints between consecutive distinct values
// of each instance (at most 15 per instance); subsets are enumerated
// exhaustively until the work budget runs out.
ShatterResult shattering_lower_bound(
    const std::vector<std::vector<double>>& values, int max_set_size,
    long long budget = 40000000);
ShatterResult shattering_lower_bound(const DualPool& pool, int max_set_size,
                                     long long budget = 40000000);

}  // namespace envtrace
