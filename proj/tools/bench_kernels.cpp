// Benchmarks the OpenMP kernels against their serial reference twins. The
// contract being demonstrated is twofold: the parallel kernels must be
// bit-identical to the serial ones (deterministic reductions, per-index
// seeding), and any speedup is pure surplus. Run with OMP_NUM_THREADS set
// to taste.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "envtrace/datadriven.hpp"
#include "envtrace/envelope.hpp"
#include "envtrace/families.hpp"
#include "envtrace/gcn.hpp"
#include "envtrace/grid_oracle.hpp"

using namespace envtrace;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool match) {
  std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n",
              name.c_str(), serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
              match ? "bit-identical" : "MISMATCH");
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());

  {
    Landscape l = random_single_piece(4, 11);
    GridTrace s, p;
    double ts = time_ms([&] { s = grid_oracle_serial(l, 801); });
    double tp = time_ms([&] { p = grid_oracle(l, 801); });
    report("grid_oracle", ts, tp,
           same(s.values, p.values) && same(s.alphas, p.alphas));
  }

  {
    Landscape l = load_landscape(R"({
      "version": 1,
      "domain": {"alpha": ["0", "1"], "w": [["-1", "1"], ["-1", "1"]]},
      "kind": "polynomial",
      "boundaries": [],
      "regions": [{"signs": [],
        "piece": "-w1^2 + 2*a*w1 - 2*a^2 - w2^2 - 2*a*w2"}]
    })");
    TraceConfig cfg;
    cfg.alpha_samples = 241;
    cfg.multistarts = 16;
    EnvelopeProfile s, p;
    double ts = time_ms([&] { s = trace_envelope_numeric_serial(l, cfg); });
    double tp = time_ms([&] { p = trace_envelope_numeric(l, cfg); });
    bool match = s.samples.size() == p.samples.size();
    if (match)
      for (std::size_t i = 0; i < s.samples.size(); ++i)
        match &= s.samples[i].value == p.samples[i].value &&
                 s.samples[i].alpha == p.samples[i].alpha;
    report("numeric_tracer", ts, tp, match);
  }

  {
    GcnInstance inst = gen_gcn_instance(3);
    std::vector<double> alphas(4001);
    for (std::size_t i = 0; i < alphas.size(); ++i)
      alphas[i] = 0.125 + (4.0 - 0.125) * double(i) / double(alphas.size() - 1);
    std::vector<double> s, p;
    double ts = time_ms([&] { s = gcn_dual_sweep_serial(inst, alphas); });
    double tp = time_ms([&] { p = gcn_dual_sweep(inst, alphas); });
    report("gcn_dual_sweep", ts, tp, same(s, p));
  }

  {
    InstanceDistribution dist = synthetic_cubic_distribution();
    std::vector<int> ms{4, 16};
    GapCurve s, p;
    double ts = time_ms([&] { s = gap_curve_serial(dist, ms, 10, 5); });
    double tp = time_ms([&] { p = gap_curve(dist, ms, 10, 5); });
    report("gap_trials", ts, tp, gapcurve_csv(s) == gapcurve_csv(p));
  }

  return 0;
}
