#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/envelope.hpp"
#include "envtrace/landscape.hpp"
#include "envtrace/oscillation.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace envtrace;

namespace {

// u*(alpha) = -(alpha - 1/4)^2 (alpha - 3/4)^2: two humps, so a threshold
// just below 0 is crossed four times.
const char* kTwoHumpDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
  "kind": "polynomial",
  "boundaries": [],
  "regions": [{"signs": [], "piece":
    "-a^4 + 2*a^3 - 19/8*a^2 + 3/8*a - 9/256 - w1^2 + 2*a*w1"}]
})";

// alpha*w - w^3/3: decreasing, then increasing through a kink at 1/4.
const char* kCubicDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
  "kind": "polynomial",
  "boundaries": [],
  "regions": [{"signs": [], "piece": "a*w1 - 1/3*w1^3"}]
})";

// Disk of value 1 over background 0: a two-jump step envelope.
const char* kCircleDoc = R"({
  "version": 1,
  "domain": {"alpha": ["0", "1"], "w": [["-1", "1"]]},
  "kind": "constant",
  "boundaries": ["a^2 - a + 3/16 + w1^2"],
  "regions": [
    {"signs": ["le"], "piece": "1"},
    {"signs": ["free"], "piece": "0"}
  ]
})";

std::vector<double> repeat_runs(const std::vector<double>& levels, int run) {
  std::vector<double> v;
  for (double lvl : levels)
    for (int i = 0; i < run; ++i) v.push_back(lvl);
  return v;
}

}  // namespace

TEST_CASE("constant samples never oscillate") {
  OscillationReport r = count_oscillations(std::vector<double>(1000, 3.5));
  CHECK(r.oscillations == 0);
  CHECK(r.osc_bound == 2);
  CHECK(r.estimated);
  CHECK(r.pdim_upper_order == doctest::Approx(1.0));  // log2(0 + 2)
  CHECK(pdim_upper(r) == doctest::Approx(2.0));
  CHECK(pdim_upper(r, 3.0) == doctest::Approx(3.0));
  CHECK(check_oscillation_ceiling(r).ok);
}

TEST_CASE("monotone samples flip the indicator exactly once") {
  std::vector<double> v;
  for (int i = 0; i < 1200; ++i) v.push_back(i / 1199.0);
  OscillationReport r = count_oscillations(v);
  CHECK(r.oscillations == 1);
  CHECK(check_oscillation_ceiling(r).ok);
}

TEST_CASE("a 0-1-0-1 step train oscillates three times") {
  std::vector<double> v = repeat_runs({0.0, 1.0, 0.0, 1.0}, 250);
  OscillationReport r = count_oscillations(v);
  CHECK(r.oscillations == 3);
  CHECK(r.maximizing_z > 0.0);
  CHECK(r.maximizing_z < 1.0);
}

TEST_CASE("counting is invariant under a constant value shift") {
  std::vector<double> v = repeat_runs({0.0, 2.0, 0.5, 3.0, 0.25}, 200);
  std::vector<double> shifted = v;
  for (double& x : shifted) x += 7.0;
  OscillationReport a = count_oscillations(v);
  OscillationReport b = count_oscillations(shifted);
  CHECK(a.oscillations == b.oscillations);
  CHECK(b.maximizing_z == doctest::Approx(a.maximizing_z + 7.0).epsilon(1e-9));
}

TEST_CASE("two-hump quartic attains four oscillations under the exact count") {
  Landscape l = load_landscape(kTwoHumpDoc);
  EnvelopeProfile p = trace_envelope_1d(l);
  REQUIRE(p.b2 == 2);
  OscillationReport r = count_oscillations(p);
  CHECK_FALSE(r.estimated);
  CHECK(r.b1 == 0);
  CHECK(r.b2 == 2);
  CHECK(r.oscillations == 4);
  CHECK(r.osc_bound == 2 * 2 + 3 * 0 + 2);
  CHECK(r.maximizing_z < 0.0);  // just under the hump peaks at value 0
  OscillationCertificate cert = check_oscillation_ceiling(r);
  CHECK(cert.ok);
  CHECK(cert.oscillations == 4);
  CHECK(cert.bound == 6);
  CHECK(cert.maximizing_z == r.maximizing_z);
}

TEST_CASE("a single dip saturates the smooth-envelope ceiling exactly") {
  Landscape l = load_landscape(kCubicDoc);
  EnvelopeProfile p = trace_envelope_1d(l);
  REQUIRE(p.b1 == 0);
  REQUIRE(p.b2 == 0);
  OscillationReport r = count_oscillations(p);
  // down through the dip and back up: two crossings, ceiling 2*0+3*0+2
  CHECK(r.oscillations == 2);
  CHECK(r.osc_bound == 2);
  CHECK(check_oscillation_ceiling(r).ok);
}

TEST_CASE("step envelopes oscillate at most once per jump") {
  Landscape l = load_landscape(kCircleDoc);
  EnvelopeProfile p = trace_envelope_constant(l);
  REQUIRE(p.b1 == 2);
  OscillationReport r = count_oscillations(p);
  CHECK(r.oscillations == 2);
  CHECK(r.oscillations <= p.b1);
  CHECK(check_oscillation_ceiling(r).ok);
}

TEST_CASE("report serializes every counting field") {
  std::vector<double> v = repeat_runs({0.0, 1.0, 0.0}, 400);
  OscillationReport r = count_oscillations(v);
  std::string j = oscillation_report_json(r);
  CHECK(j.find("\"oscillations\": 2") != std::string::npos);
  CHECK(j.find("\"osc_bound\"") != std::string::npos);
  CHECK(j.find("\"pdim_upper_order\"") != std::string::npos);
  CHECK(j.find("\"maximizing_z\"") != std::string::npos);
  CHECK(j.find("\"estimated\": true") != std::string::npos);
}
