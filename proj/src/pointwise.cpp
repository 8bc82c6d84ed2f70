#include "envtrace/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "envtrace/error.hpp"
#include "envtrace/roots.hpp"

namespace envtrace {

namespace {

std::vector<double> derivative_dense(const std::vector<double>& coeffs) {
  std::vector<double> out;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    out.push_back(coeffs[k] * static_cast<double>(k));
  }
  return out;
}

struct CutPoint {
  double w;
  CandidateSource source;  // boundary / edge_low / edge_high
  int curve;
  int branch;
};

}  // namespace

PointwiseEnvelope envelope_at(const CompiledLandscape& c, double alpha) {
  if (c.d != 1) fail_input("pointwise envelope requires a single w dimension");
  const double w_lo = c.w_ranges[0].first;
  const double w_hi = c.w_ranges[0].second;
  const double w_span = w_hi - w_lo;

  // cut the w-axis at boundary roots and box edges
  std::vector<CutPoint> cuts;
  cuts.push_back({w_lo, CandidateSource::edge_low, -1, 0});
  cuts.push_back({w_hi, CandidateSource::edge_high, -1, 0});
  std::vector<std::vector<double>> boundary_coeffs(c.boundaries_1d.size());
  for (std::size_t b = 0; b < c.boundaries_1d.size(); ++b) {
    c.boundaries_1d[b].slice(alpha, &boundary_coeffs[b]);
    std::vector<double> roots = real_roots_dense(boundary_coeffs[b], w_lo, w_hi);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      cuts.push_back({roots[k], CandidateSource::boundary,
                      static_cast<int>(b), static_cast<int>(k)});
    }
  }
  std::sort(cuts.begin(), cuts.end(),
            [](const CutPoint& a, const CutPoint& b) { return a.w < b.w; });

  // distinct cut values (cells live between them); keep all cut identities
  std::vector<double> cells;
  for (const CutPoint& cut : cuts) {
    if (cells.empty() || cut.w - cells.back() > 1e-13 * std::max(1.0, w_span)) {
      cells.push_back(cut.w);
    }
  }

  PointwiseEnvelope result;
  result.value = -std::numeric_limits<double>::infinity();
  std::vector<double> piece_coeffs, deriv;
  std::vector<double> x(2);
  x[0] = alpha;

  auto add_candidate = [&](double w, int region, CandidateSource source,
                           int curve, int branch, double value) {
    EnvelopeCandidate cand{w, value, region, source, curve, branch};
    result.candidates.push_back(cand);
    if (value > result.value) {
      result.value = value;
      result.winner = cand;
    }
  };

  auto region_at_w = [&](double w) {
    x[1] = w;
    return c.region_of(x);
  };

  for (std::size_t cell = 0; cell + 1 < cells.size(); ++cell) {
    const double a = cells[cell];
    const double b = cells[cell + 1];
    const double mid = 0.5 * (a + b);
    int region = region_at_w(mid);
    if (region < 0) continue;  // tangency fuzz; valid landscapes cover
    const auto& piece = c.pieces_1d[static_cast<std::size_t>(region)];

    if (c.kind == LandscapeKind::constant) {
      x[1] = mid;
      add_candidate(mid, region, CandidateSource::cell, -1,
                    static_cast<int>(cell),
                    c.pieces[static_cast<std::size_t>(region)].eval(x));
      continue;
    }

    piece.slice(alpha, &piece_coeffs);
    // cell endpoints (attribute them to the cut that created them)
    for (double endpoint : {a, b}) {
      const CutPoint* tag = nullptr;
      for (const CutPoint& cut : cuts) {
        if (std::abs(cut.w - endpoint) <= 1e-13 * std::max(1.0, w_span)) {
          tag = &cut;
          break;
        }
      }
      add_candidate(endpoint, region,
                    tag ? tag->source : CandidateSource::boundary,
                    tag ? tag->curve : -1, tag ? tag->branch : 0,
                    eval_dense(piece_coeffs, endpoint));
    }
    // interior critical roots
    deriv = derivative_dense(piece_coeffs);
    std::vector<double> crit = real_roots_dense(deriv, a, b);
    for (std::size_t k = 0; k < crit.size(); ++k) {
      add_candidate(crit[k], region, CandidateSource::critical, -1,
                    static_cast<int>(k), eval_dense(piece_coeffs, crit[k]));
    }
  }

  // a single cut value can carry its own region (measure-zero cells)
  if (result.candidates.empty()) {
    int region = region_at_w(w_lo);
    if (region >= 0) {
      x[1] = w_lo;
      add_candidate(w_lo, region, CandidateSource::edge_low, -1, 0,
                    c.pieces[static_cast<std::size_t>(region)].eval(x));
    }
  }
  if (result.candidates.empty()) {
    fail_numeric("no feasible envelope candidate at alpha=" +
                 std::to_string(alpha));
  }
  return result;
}

PointwiseEnvelope envelope_at(const Landscape& l, double alpha) {
  return envelope_at(CompiledLandscape::compile(l), alpha);
}

double envelope_value(const Landscape& l, double alpha) {
  return envelope_at(l, alpha).value;
}

}  // namespace envtrace
