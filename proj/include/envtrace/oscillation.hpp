#pragma once

#include <string>
#include <vector>

#include "envtrace/envelope.hpp"

namespace envtrace {

// Counting summary for a one-hyperparameter utility trace. `oscillations` is
// the worst case over thresholds z of how often the indicator 1{u(a) >= z}
// switches as a sweeps the domain; `osc_bound` is the structural ceiling
// 2*b2 + 3*b1 + 2 implied by the discontinuity and local-max counts, and
// `pdim_upper_order` is log2(oscillations + 2), the order of the resulting
// pseudo-dimension upper bound.
struct OscillationReport {
  int b1 = 0;
  int b2 = 0;
  int oscillations = 0;
  int osc_bound = 2;
  double pdim_upper_order = 1.0;
  double maximizing_z = 0.0;
  bool estimated = false;  // true for sample-based reports
};

// Exact counting from a traced profile: thresholds sweep the critical value
// set (segment one-sided limits, interior extreme values, breakpoint limits),
// each nudged by +/- eps with eps = 1e-9 * value range, and indicator flips
// are counted along the piecewise-monotone decomposition.
OscillationReport count_oscillations(const EnvelopeProfile& profile);

// Sampled counting: dense threshold sweep (z_count levels across the value
// range) over the ordered sample values. Needs at least two samples; accuracy
// is only meaningful for dense inputs (>= 1000 points).
OscillationReport count_oscillations(const std::vector<double>& values,
                                     int z_count = 10000);

// c * log2(oscillations + 2); c defaults to 2 as a fixed reporting
// convention for the otherwise unspecified constant.
double pdim_upper(const OscillationReport& report, double c = 2.0);

struct OscillationCertificate {
  bool ok = false;
  int oscillations = 0;
  int bound = 0;
  double maximizing_z = 0.0;
};

// True iff the counted oscillations respect the structural ceiling
// 2*b2 + 3*b1 + 2; the certificate carries the threshold that attains the
// count.
OscillationCertificate check_oscillation_ceiling(const OscillationReport& r);

// JSON object with every report field plus the maximizing threshold.
std::string oscillation_report_json(const OscillationReport& r);

}  // namespace envtrace
