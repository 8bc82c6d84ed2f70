#include "envtrace/fasteval.hpp"

#include <limits>

#include "envtrace/roots.hpp"

namespace envtrace {

CompiledPoly CompiledPoly::from(const Polynomial& p) {
  CompiledPoly c;
  for (const auto& [mono, coeff] : p.terms()) {
    unsigned wi = mono.size() > 1 ? mono[1] : 0;
    unsigned ai = mono[0];
    if (c.alpha_coeffs.size() <= wi) c.alpha_coeffs.resize(wi + 1);
    auto& dense = c.alpha_coeffs[wi];
    if (dense.size() <= ai) dense.resize(ai + 1, 0.0);
    dense[ai] += to_double(coeff);
  }
  if (c.alpha_coeffs.empty()) c.alpha_coeffs.push_back({0.0});
  return c;
}

void CompiledPoly::slice(double alpha, std::vector<double>* out) const {
  out->resize(alpha_coeffs.size());
  for (std::size_t k = 0; k < alpha_coeffs.size(); ++k) {
    (*out)[k] = eval_dense(alpha_coeffs[k], alpha);
  }
}

double CompiledPoly::eval(double alpha, double w) const {
  double total = 0.0;
  for (std::size_t k = alpha_coeffs.size(); k-- > 0;) {
    total = total * w + eval_dense(alpha_coeffs[k], alpha);
  }
  return total;
}

CompiledTerms CompiledTerms::from(const Polynomial& p) {
  CompiledTerms c;
  for (const auto& [mono, coeff] : p.terms()) {
    c.monomials.push_back(mono);
    c.coefficients.push_back(to_double(coeff));
  }
  return c;
}

double CompiledTerms::eval(const std::vector<double>& x) const {
  double total = 0.0;
  for (std::size_t t = 0; t < monomials.size(); ++t) {
    double term = coefficients[t];
    const Monomial& mono = monomials[t];
    for (std::size_t v = 0; v < mono.size(); ++v) {
      for (unsigned e = 0; e < mono[v]; ++e) term *= x[v];
    }
    total += term;
  }
  return total;
}

CompiledLandscape CompiledLandscape::compile(const Landscape& l) {
  CompiledLandscape c;
  c.d = l.d();
  c.kind = l.kind;
  c.alpha_lo = to_double(l.domain.alpha_lo);
  c.alpha_hi = to_double(l.domain.alpha_hi);
  for (const auto& [lo, hi] : l.domain.w_ranges) {
    c.w_ranges.emplace_back(to_double(lo), to_double(hi));
  }
  for (const auto& region : l.regions) {
    c.signs.push_back(region.signs);
    c.pieces.push_back(CompiledTerms::from(region.piece));
    if (c.d == 1) c.pieces_1d.push_back(CompiledPoly::from(region.piece));
  }
  for (const auto& h : l.boundaries) {
    c.boundaries.push_back(CompiledTerms::from(h));
    if (c.d == 1) c.boundaries_1d.push_back(CompiledPoly::from(h));
  }
  return c;
}

int CompiledLandscape::region_of(const std::vector<double>& x) const {
  double h[16];
  const std::size_t m = boundaries.size();
  std::vector<double> h_big;
  const double* hv = h;
  if (m > 16) {
    h_big.resize(m);
    for (std::size_t b = 0; b < m; ++b) h_big[b] = boundaries[b].eval(x);
    hv = h_big.data();
  } else {
    for (std::size_t b = 0; b < m; ++b) h[b] = boundaries[b].eval(x);
  }
  for (std::size_t r = 0; r < signs.size(); ++r) {
    bool match = true;
    for (std::size_t b = 0; b < m; ++b) {
      BoundarySign s = signs[r][b];
      if (s == BoundarySign::le ? hv[b] > 0.0
                                : (s == BoundarySign::ge && hv[b] < 0.0)) {
        match = false;
        break;
      }
    }
    if (match) return static_cast<int>(r);
  }
  return -1;
}

double CompiledLandscape::eval(const std::vector<double>& x) const {
  int r = region_of(x);
  if (r < 0) return -std::numeric_limits<double>::infinity();
  return pieces[static_cast<std::size_t>(r)].eval(x);
}

}  // namespace envtrace
