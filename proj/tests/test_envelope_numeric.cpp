#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/envelope.hpp"
#include "envtrace/landscape.hpp"
#include "envtrace/pointwise.hpp"
#include "envtrace/regularity.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace envtrace;

namespace {

// Separable two-dimensional quadratic whose maximum value is identically 0:
// the optimum sits at w1 = alpha, w2 = -alpha.
const char* kSaddleFreeDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-2", "2"], ["-2", "2"]]},
  "kind": "polynomial",
  "boundaries": [],
  "regions": [{"signs": [], "piece":
    "-w1^2 + 2*a*w1 - 2*a^2 - w2^2 - 2*a*w2"}]
})";

// Maximum over w is always at the origin: u*(alpha) = alpha.
const char* kPlaneDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-1", "1"], ["-1", "1"]]},
  "kind": "polynomial",
  "boundaries": [],
  "regions": [{"signs": [], "piece": "a - w1^2 - w2^2"}]
})";

// One-dimensional cubic with a derivative kink at alpha = 1/4 (the exact
// tracer suite pins its structure; here it cross-checks the ascent path).
const char* kCubicDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
  "kind": "polynomial",
  "boundaries": [],
  "regions": [{"signs": [], "piece": "a*w1 - 1/3*w1^3"}]
})";

TraceConfig fast_config(int alpha_samples) {
  TraceConfig cfg;
  cfg.alpha_samples = alpha_samples;
  cfg.multistarts = 16;
  return cfg;
}

}  // namespace

TEST_CASE("multistart ascent nails a flat two-dimensional optimum") {
  Landscape l = load_landscape(kSaddleFreeDoc);
  EnvelopeProfile p = trace_envelope_numeric(l, fast_config(161));
  CHECK(p.estimated);
  CHECK(p.breakpoints.empty());
  REQUIRE(p.samples.size() == 161);
  for (const EnvelopeSample& s : p.samples) {
    CHECK(std::fabs(s.value) <= 1e-8);
    CHECK(s.residual <= 1e-6);
  }
  // a flat envelope has no strict maxima, so nothing to hand the
  // regularity check
  CHECK(p.stationarity_points.empty());
}

TEST_CASE("separable concave landscape traces to u*(alpha) = alpha") {
  Landscape l = load_landscape(kPlaneDoc);
  EnvelopeProfile p = trace_envelope_numeric(l, fast_config(161));
  for (const EnvelopeSample& s : p.samples)
    CHECK(s.value == doctest::Approx(s.alpha).epsilon(1e-8));
  CHECK(p.b1 == 0);
}

TEST_CASE("one-dimensional ascent agrees with the exact pointwise maximizer") {
  Landscape l = load_landscape(kCubicDoc);
  EnvelopeProfile p = trace_envelope_numeric(l, fast_config(201));
  CompiledLandscape cl = CompiledLandscape::compile(l);
  for (const EnvelopeSample& s : p.samples) {
    double exact = envelope_at(cl, s.alpha).value;
    CHECK(s.value == doctest::Approx(exact).epsilon(1e-8));
  }
  // the kink at 1/4 is localized to within one grid step
  REQUIRE(p.breakpoints.size() == 1);
  CHECK(std::fabs(p.breakpoints[0].alpha - 0.25) <= 1.0 / 200.0 + 1e-12);
  CHECK(p.b1 == 0);  // a kink, not a jump
}

TEST_CASE("parallel and serial numeric traces are bit-identical") {
  Landscape l = load_landscape(kSaddleFreeDoc);
  TraceConfig cfg = fast_config(121);
  EnvelopeProfile par = trace_envelope_numeric(l, cfg);
  EnvelopeProfile ser = trace_envelope_numeric_serial(l, cfg);
  REQUIRE(par.samples.size() == ser.samples.size());
  for (std::size_t i = 0; i < par.samples.size(); ++i) {
    CHECK(par.samples[i].value == ser.samples[i].value);
    CHECK(par.samples[i].w == ser.samples[i].w);
    CHECK(par.samples[i].residual == ser.samples[i].residual);
  }
  CHECK(envelope_csv(par) == envelope_csv(ser));
}

TEST_CASE("numeric trace is reproducible with a fixed seed") {
  Landscape l = load_landscape(kPlaneDoc);
  TraceConfig cfg = fast_config(121);
  cfg.seed = 999;
  EnvelopeProfile a = trace_envelope_numeric(l, cfg);
  EnvelopeProfile b = trace_envelope_numeric(l, cfg);
  CHECK(envelope_csv(a) == envelope_csv(b));
}

TEST_CASE("black-box objectives trace without a landscape document") {
  DomainBox box;
  box.alpha_lo = Rational(0);
  box.alpha_hi = Rational(1);
  box.w_ranges = {{Rational(-1), Rational(1)}};
  auto f = [](double alpha, const std::vector<double>& w) {
    double d = w[0] - alpha;
    return -d * d;
  };
  EnvelopeProfile p = trace_envelope_numeric(f, box, fast_config(101));
  CHECK(p.estimated);
  for (const EnvelopeSample& s : p.samples) {
    CHECK(std::fabs(s.value) <= 1e-9);
    CHECK(s.w == doctest::Approx(s.alpha).epsilon(1e-4));
  }
}

TEST_CASE("stationarity points feed the bordered-system regularity check") {
  // u*(alpha) = alpha - alpha^2 peaks strictly at alpha = 1/2
  const char* doc = R"({
    "version": 1,
    "domain": {"alpha": ["0", "1"], "w": [["-1", "1"], ["-1", "1"]]},
    "kind": "polynomial",
    "boundaries": [],
    "regions": [{"signs": [], "piece": "a - a^2 - w1^2 - w2^2"}]
  })";
  Landscape l = load_landscape(doc);
  EnvelopeProfile p = trace_envelope_numeric(l, fast_config(121));
  REQUIRE(p.local_maxima.size() == 1);
  CHECK(std::fabs(p.local_maxima[0].alpha - 0.5) <= 1.0 / 120.0 + 1e-12);
  CHECK(p.local_maxima[0].value == doctest::Approx(0.25).epsilon(1e-6));
  REQUIRE_FALSE(p.stationarity_points.empty());
  RegularityReport rep = check_regularity(l, p.stationarity_points);
  CHECK(rep.points.size() == p.stationarity_points.size());
  // an unconstrained nondegenerate quadratic optimum is regular
  CHECK(rep.all_regular);
}
