#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/datadriven.hpp"
#include "envtrace/error.hpp"
#include "envtrace/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace envtrace;

namespace {

Landscape make_piece(const char* piece) {
  std::string doc = std::string(R"({
    "version": 1,
    "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
    "kind": "polynomial",
    "boundaries": [],
    "regions": [{"signs": [], "piece": ")") +
                    piece + R"("}]
  })";
  return load_landscape(doc);
}

// u*(alpha) = max(1/3 - alpha, 2/3 alpha^1.5): maximized at alpha = 1.
Landscape cubic_instance() { return make_piece("a*w1 - 1/3*w1^3"); }

TuningConfig light_config() {
  TuningConfig cfg;
  cfg.heldout_factor = 10;
  return cfg;
}

using Matrix = std::vector<std::vector<double>>;

}  // namespace

TEST_CASE("one training instance tunes to that instance's maximizer") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  TuningReport r = erm_tune(dist, 1, 99, light_config());
  CHECK(r.m == 1);
  CHECK(r.skipped == 0);
  CHECK(r.alpha_hat == doctest::Approx(1.0));
  CHECK(r.alpha_star == doctest::Approx(1.0));
  CHECK(r.train_value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.gap == doctest::Approx(0.0));
}

TEST_CASE("monotone utilities tune to the matching end of the range") {
  TuningReport up = erm_tune(
      deterministic_distribution(make_piece("a - w1^2")), 3, 5, light_config());
  CHECK(up.alpha_hat == doctest::Approx(1.0));

  TuningReport down =
      erm_tune(deterministic_distribution(make_piece("1 - a - w1^2")), 3, 5,
               light_config());
  CHECK(down.alpha_hat == doctest::Approx(0.0));
}

TEST_CASE("identical train and held-out instances leave no gap or noise") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  TuningConfig cfg = light_config();
  TuningReport r = erm_tune(dist, 4, 123, cfg);
  CHECK(r.gap == doctest::Approx(0.0));
  CHECK(r.heldout_noise <= 1e-12);
  CHECK(r.heldout_size == cfg.heldout_factor * 4);
  CHECK(r.heldout_at_hat == doctest::Approx(r.train_value).epsilon(1e-12));
}

TEST_CASE("a flat utility ties toward the smallest alpha") {
  // -(w - alpha)^2 maximizes to exactly 0 at every alpha
  InstanceDistribution dist =
      deterministic_distribution(make_piece("-w1^2 + 2*a*w1 - a^2"));
  TuningReport r = erm_tune(dist, 2, 1, light_config());
  CHECK(r.alpha_hat == 0.0);
  CHECK(r.train_value == doctest::Approx(0.0));
}

TEST_CASE("tuning reports are reproducible and internally consistent") {
  InstanceDistribution dist = synthetic_cubic_distribution();
  TuningConfig cfg = light_config();
  TuningReport a = erm_tune(dist, 6, 7, cfg);
  TuningReport b = erm_tune(dist, 6, 7, cfg);
  CHECK(tuning_report_json(a) == tuning_report_json(b));

  CHECK(std::is_sorted(a.candidates.begin(), a.candidates.end()));
  CHECK(std::count(a.candidates.begin(), a.candidates.end(), a.alpha_hat) >= 1);
  CHECK(a.gap >= 0.0);
  // the reference optimum search includes alpha_hat, so it can only win
  CHECK(a.heldout_at_star >= a.heldout_at_hat - 1e-15);
  CHECK(a.gap ==
        doctest::Approx(a.heldout_at_star - a.heldout_at_hat).epsilon(1e-12));
}

TEST_CASE("grid mode evaluates a uniform candidate set") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  TuningConfig cfg = light_config();
  cfg.mode = AlphaEval::grid;
  cfg.grid_points = 33;
  TuningReport r = erm_tune(dist, 2, 11, cfg);
  REQUIRE(r.candidates.size() == 33);
  CHECK(r.candidates.front() == doctest::Approx(0.0));
  CHECK(r.candidates.back() == doctest::Approx(1.0));
  CHECK(r.alpha_hat == doctest::Approx(1.0));
}

TEST_CASE("gap curve on a one-point distribution is identically zero") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  GapCurve c = gap_curve(dist, {2, 4}, 10, 3, light_config());
  REQUIRE(c.points.size() == 2);
  for (const GapCurvePoint& p : c.points) {
    CHECK(p.mean_gap == doctest::Approx(0.0));
    CHECK(p.std_gap == doctest::Approx(0.0));
    CHECK(p.median_dev == doctest::Approx(0.0));
  }
  // no positive gaps, no decay to fit
  CHECK(c.slope_fit == 0.0);
  CHECK(c.trials == 10);
}

TEST_CASE("parallel and serial gap curves are bit-identical") {
  InstanceDistribution dist = synthetic_cubic_distribution();
  TuningConfig cfg = light_config();
  GapCurve par = gap_curve(dist, {3, 6}, 10, 17, cfg);
  GapCurve ser = gap_curve_serial(dist, {3, 6}, 10, 17, cfg);
  CHECK(gapcurve_csv(par) == gapcurve_csv(ser));
  REQUIRE(par.points.size() == ser.points.size());
  for (std::size_t i = 0; i < par.points.size(); ++i) {
    CHECK(par.points[i].mean_gap == ser.points[i].mean_gap);
    CHECK(par.points[i].std_gap == ser.points[i].std_gap);
    CHECK(par.points[i].median_dev == ser.points[i].median_dev);
  }
  CHECK(par.slope_fit == ser.slope_fit);
  CHECK(par.alpha_star == ser.alpha_star);
}

TEST_CASE("gap curve CSV carries the documented header and one row per m") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  GapCurve c = gap_curve(dist, {2, 3, 5}, 10, 1, light_config());
  std::string csv = gapcurve_csv(c);
  CHECK(csv.rfind("m,mean_gap,std_gap,slope_fit\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\n2,") != std::string::npos);
  CHECK(csv.find("\n3,") != std::string::npos);
  CHECK(csv.find("\n5,") != std::string::npos);
}

TEST_CASE("a distribution whose instances never trace raises degeneracy") {
  InstanceDistribution broken;
  broken.name = "broken";
  broken.generator = [](std::uint64_t) -> Landscape {
    fail_input("refusing to generate");
  };
  try {
    erm_tune(broken, 3, 1, light_config());
    FAIL("expected a degeneracy error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degeneracy);
  }
}

TEST_CASE("input validation rejects malformed tuning requests") {
  InstanceDistribution dist = deterministic_distribution(cubic_instance());
  CHECK_THROWS_AS(erm_tune(dist, 0, 1, light_config()), Error);
  CHECK_THROWS_AS(gap_curve(dist, {}, 10, 1, light_config()), Error);
  CHECK_THROWS_AS(gap_curve(dist, {4}, 3, 1, light_config()), Error);
}

TEST_CASE("shattering search certifies only genuinely realized patterns") {
  // no rows, nothing to shatter
  CHECK(shattering_lower_bound(Matrix{}, 4).pdim_lower == 0);
  // a constant row admits no threshold at all
  CHECK(shattering_lower_bound(Matrix{{1, 1, 1, 1}}, 4).pdim_lower == 0);
  // one row with two levels: a single midpoint threshold shatters size 1
  CHECK(shattering_lower_bound(Matrix{{0, 1, 2, 3}}, 4).pdim_lower == 1);
  // the 2x4 binary grid realizes all four sign patterns
  Matrix grid = {{0, 0, 2, 2}, {0, 2, 0, 2}};
  ShatterResult two = shattering_lower_bound(grid, 4);
  CHECK(two.pdim_lower == 2);
  CHECK_FALSE(two.budget_exceeded);
  // opposite vees only ever witness three patterns with one threshold pair
  Matrix vees = {{2, 1, 0, 1, 2}, {0, 1, 2, 1, 0}};
  CHECK(shattering_lower_bound(vees, 4).pdim_lower == 1);
}

TEST_CASE("shattering respects the set-size cap and the work budget") {
  Matrix grid = {{0, 0, 2, 2}, {0, 2, 0, 2}};
  ShatterResult capped = shattering_lower_bound(grid, 1);
  CHECK(capped.pdim_lower == 1);
  ShatterResult starved = shattering_lower_bound(grid, 4, 3);
  CHECK(starved.budget_exceeded);
  CHECK(starved.pdim_lower <= 2);
}

TEST_CASE("sampled dual pools carry one value row per traced instance") {
  InstanceDistribution dist = synthetic_cubic_distribution();
  DualPool pool = sample_dual_pool(dist, 6, 3, 17);
  CHECK(pool.values.size() == 6);
  CHECK(pool.alphas.size() >= 17);  // uniform grid plus traced breakpoints
  CHECK(std::is_sorted(pool.alphas.begin(), pool.alphas.end()));
  for (const std::vector<double>& row : pool.values) {
    REQUIRE(row.size() == pool.alphas.size());
    for (double v : row) CHECK(std::isfinite(v));
  }
  // the pool overload feeds the same search
  ShatterResult r = shattering_lower_bound(pool, 3);
  CHECK(r.pdim_lower >= 1);
  CHECK(r.pdim_lower <= 3);
}
