#include "envtrace/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "envtrace/error.hpp"

#include "json.hpp"

namespace envtrace {

namespace {

void finish(OscillationReport* r) {
  r->osc_bound = 2 * r->b2 + 3 * r->b1 + 2;
  r->pdim_upper_order = std::log2(static_cast<double>(r->oscillations) + 2.0);
}

// Indicator flips at threshold z for a profile given as per-segment
// alternation sequences plus jump pairs. Within a segment the trace is
// monotone between consecutive listed values, so each straddling pair is
// exactly one crossing.
int flips_at(const std::vector<std::vector<double>>& seqs,
             const std::vector<std::pair<double, double>>& jumps, double z) {
  int flips = 0;
  for (const auto& seq : seqs)
    for (size_t i = 0; i + 1 < seq.size(); ++i)
      if ((seq[i] >= z) != (seq[i + 1] >= z)) ++flips;
  for (const auto& [l, r] : jumps)
    if ((l >= z) != (r >= z)) ++flips;
  return flips;
}

}  // namespace

OscillationReport count_oscillations(const EnvelopeProfile& profile) {
  if (profile.segments.empty())
    fail_input("count_oscillations: profile has no segments");

  std::vector<std::vector<double>> seqs;
  std::vector<double> crit;
  for (const Segment& s : profile.segments) {
    std::vector<double> seq;
    seq.push_back(s.left_limit);
    for (double v : s.interior_extreme_values) seq.push_back(v);
    seq.push_back(s.right_limit);
    for (double v : seq) crit.push_back(v);
    seqs.push_back(std::move(seq));
  }
  std::vector<std::pair<double, double>> jumps;
  for (const Breakpoint& b : profile.breakpoints) {
    jumps.emplace_back(b.left_limit, b.right_limit);
    crit.push_back(b.left_limit);
    crit.push_back(b.right_limit);
  }

  OscillationReport rep;
  rep.b1 = profile.b1;
  rep.b2 = profile.b2;
  rep.estimated = profile.estimated;

  double lo = *std::min_element(crit.begin(), crit.end());
  double hi = *std::max_element(crit.begin(), crit.end());
  if (hi - lo <= 0.0) {
    rep.oscillations = 0;
    rep.maximizing_z = lo;
    finish(&rep);
    return rep;
  }
  const double eps = 1e-9 * (hi - lo);
  int best = 0;
  double best_z = lo;
  for (double v : crit) {
    for (double z : {v - eps, v + eps}) {
      int f = flips_at(seqs, jumps, z);
      if (f > best) {
        best = f;
        best_z = z;
      }
    }
  }
  rep.oscillations = best;
  rep.maximizing_z = best_z;
  finish(&rep);
  return rep;
}

OscillationReport count_oscillations(const std::vector<double>& values,
                                     int z_count) {
  if (values.size() < 2)
    fail_input("count_oscillations: needs at least two samples");
  if (z_count < 2) z_count = 2;

  OscillationReport rep;
  rep.estimated = true;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  for (size_t k = 1; k + 1 < values.size(); ++k) {
    if (values[k] > values[k - 1] && values[k] > values[k + 1]) ++rep.b2;
  }
  if (hi - lo <= 0.0) {
    rep.oscillations = 0;
    rep.maximizing_z = lo;
    finish(&rep);
    return rep;
  }
  int best = 0;
  double best_z = lo;
  for (int t = 0; t < z_count; ++t) {
    double z = lo + (hi - lo) * (t + 0.5) / z_count;
    int f = 0;
    for (size_t k = 0; k + 1 < values.size(); ++k)
      if ((values[k] >= z) != (values[k + 1] >= z)) ++f;
    if (f > best) {
      best = f;
      best_z = z;
    }
  }
  rep.oscillations = best;
  rep.maximizing_z = best_z;
  finish(&rep);
  return rep;
}

double pdim_upper(const OscillationReport& report, double c) {
  if (report.oscillations < 0)
    fail_input("pdim_upper: negative oscillation count");
  return c * std::log2(static_cast<double>(report.oscillations) + 2.0);
}

OscillationCertificate check_oscillation_ceiling(const OscillationReport& r) {
  OscillationCertificate cert;
  cert.oscillations = r.oscillations;
  cert.bound = 2 * r.b2 + 3 * r.b1 + 2;
  cert.maximizing_z = r.maximizing_z;
  cert.ok = r.oscillations <= cert.bound;
  return cert;
}

std::string oscillation_report_json(const OscillationReport& r) {
  nlohmann::json j;
  j["b1"] = r.b1;
  j["b2"] = r.b2;
  j["oscillations"] = r.oscillations;
  j["osc_bound"] = r.osc_bound;
  j["pdim_upper_order"] = r.pdim_upper_order;
  j["maximizing_z"] = r.maximizing_z;
  j["estimated"] = r.estimated;
  return j.dump(2);
}

}  // namespace envtrace
