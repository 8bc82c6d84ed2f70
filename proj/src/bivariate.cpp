#include "envtrace/bivariate.hpp"

#include "envtrace/error.hpp"
#include "envtrace/roots.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace envtrace {

namespace {

// Highest variable index occurring with positive degree, or -1 if constant.
int main_variable(const Polynomial& p, const Polynomial& q) {
  int m = -1;
  for (const Polynomial* poly : {&p, &q}) {
    for (const auto& [mono, c] : poly->terms()) {
      for (int v = poly->nvars() - 1; v >= 0; --v) {
        if (mono[v] > 0) {
          m = std::max(m, v);
          break;
        }
      }
    }
  }
  return m;
}

// Divides by the rational content and fixes the overall sign, so gcds come
// out canonical.  The sign rule orders monomials with the highest-index
// variable as most significant, which keeps boundary-style polynomials such
// as w - a in their natural orientation (rather than flipping them to a - w).
Polynomial normalize_scalar(const Polynomial& p) {
  if (p.is_zero()) return p;
  Rational content(0);
  for (const auto& [m, c] : p.terms()) content = rational_gcd(content, c);
  const std::pair<const Monomial, Rational>* lead = nullptr;
  for (const auto& term : p.terms()) {
    if (lead == nullptr) {
      lead = &term;
      continue;
    }
    for (int v = p.nvars() - 1; v >= 0; --v) {
      if (term.first[v] != lead->first[v]) {
        if (term.first[v] > lead->first[v]) lead = &term;
        break;
      }
    }
  }
  if (lead->second < 0) content = -content;
  return p.scaled(Rational(1) / content);
}

// lc_q^(deg_m p - deg_m q + 1) * p mod q, dividing in variable m with
// polynomial coefficients (classic pseudo-remainder).
Polynomial pseudo_rem(const Polynomial& p, const Polynomial& q, int m) {
  int dq = q.degree_in(m);
  auto q_coeffs = q.coeffs_in(m);
  Polynomial lc_q = q_coeffs.back();
  Polynomial r = p;
  Polynomial var = Polynomial::variable(p.nvars(), m);
  while (!r.is_zero() && r.degree_in(m) >= dq) {
    int dr = r.degree_in(m);
    Polynomial lc_r = r.coeffs_in(m).back();
    r = r * lc_q - lc_r * var.pow(static_cast<unsigned>(dr - dq)) * q;
  }
  return r;
}

Polynomial gcd_rec(const Polynomial& p, const Polynomial& q);

// gcd of the coefficients of p viewed in variable m.
Polynomial content_in(const Polynomial& p, int m) {
  Polynomial content(p.nvars());
  for (const auto& c : p.coeffs_in(m)) {
    if (c.is_zero()) continue;
    content = content.is_zero() ? c : gcd_rec(content, c);
  }
  return content;
}

Polynomial gcd_rec(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero()) return normalize_scalar(q);
  if (q.is_zero()) return normalize_scalar(p);
  if (p.is_constant() || q.is_constant()) {
    return Polynomial::constant(p.nvars(), Rational(1));
  }
  int m = main_variable(p, q);
  if (p.degree_in(m) == 0) return gcd_rec(p, content_in(q, m));
  if (q.degree_in(m) == 0) return gcd_rec(content_in(p, m), q);

  Polynomial cont_p = content_in(p, m);
  Polynomial cont_q = content_in(q, m);
  Polynomial a = exact_divide(p, cont_p);
  Polynomial b = exact_divide(q, cont_q);
  if (a.degree_in(m) < b.degree_in(m)) std::swap(a, b);
  while (!b.is_zero()) {
    Polynomial r = pseudo_rem(a, b, m);
    if (!r.is_zero()) r = exact_divide(r, content_in(r, m));
    a = std::move(b);
    b = std::move(r);
  }
  return normalize_scalar(gcd_rec(cont_p, cont_q) * a);
}

}  // namespace

Polynomial exact_divide(const Polynomial& p, const Polynomial& d) {
  if (d.is_zero()) fail_input("division by the zero polynomial");
  Polynomial q(p.nvars());
  Polynomial r = p;
  const auto& lead = *d.terms().rbegin();  // lex-greatest term of d
  while (!r.is_zero()) {
    const auto& rt = *r.terms().rbegin();
    Monomial m(static_cast<std::size_t>(p.nvars()), 0u);
    for (int v = 0; v < p.nvars(); ++v) {
      if (rt.first[v] < lead.first[v]) {
        fail_numeric("exact polynomial division has a remainder");
      }
      m[v] = rt.first[v] - lead.first[v];
    }
    Rational c = rt.second / lead.second;
    Polynomial t(p.nvars());
    t.add_term(m, c);
    q = q + t;
    r = r - t * d;
  }
  return q;
}

namespace {

// Probabilistic coprimality witness for genuinely bivariate inputs. A
// nonconstant common factor either divides both alpha-contents (handled
// exactly by the caller) or keeps positive w-degree under specialization of
// alpha at all but finitely many rationals, so a constant specialized gcd at
// two independent random points certifies coprime primitive parts. Missing
// a shared curve would need both draws to land on the finitely many bad
// rationals out of ~1e5, and even then the elimination step downstream sees
// a vanishing resultant and falls back. Returns false when a shared factor
// is plausible (callers then run the exact chain).
bool bivariate_coprime_witness(const Polynomial& p, const Polynomial& q) {
  unsigned long long state = 0x9e3779b97f4a7c15ULL;
  auto next = [&state]() {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545f4914f6cdd1dULL;
  };
  int tries = 0;
  int ok = 0;
  while (ok < 2 && tries < 12) {
    ++tries;
    Rational a0(static_cast<long long>(next() % 99991) + 1, 100003);
    Polynomial ps = p.substituted(0, a0);
    Polynomial qs = q.substituted(0, a0);
    if (ps.degree_in(1) != p.degree_in(1)) continue;  // leading coeff vanished
    if (qs.degree_in(1) != q.degree_in(1)) continue;
    if (!gcd_rec(ps, qs).is_constant()) return false;
    ++ok;
  }
  return ok == 2;
}

}  // namespace

Polynomial poly_gcd(const Polynomial& p, const Polynomial& q) {
  if (p.nvars() != q.nvars()) fail_input("gcd arity mismatch");
  // Fast path for the bivariate hot case: the full pseudo-remainder chain
  // explodes coefficient sizes, but random inputs are almost always coprime,
  // which the content split plus specialization witness detects cheaply.
  if (p.nvars() == 2 && !p.is_zero() && !q.is_zero() && p.degree_in(0) > 0 &&
      p.degree_in(1) > 0 && q.degree_in(0) > 0 && q.degree_in(1) > 0) {
    Polynomial cp = content_in(p, 1);  // alpha-only parts, univariate gcds
    Polynomial cq = content_in(q, 1);
    Polynomial pp = exact_divide(p, cp);
    Polynomial qq = exact_divide(q, cq);
    if (bivariate_coprime_witness(pp, qq)) {
      Polynomial g = gcd_rec(cp, cq);
      if (g.is_zero()) return g;
      return normalize_scalar(g);
    }
  }
  Polynomial g = gcd_rec(p, q);
  if (g.is_zero()) return g;
  return normalize_scalar(g);
}

namespace {

// Sylvester-matrix resultant of two dense rational univariate polynomials.
Rational sylvester_resultant(const std::vector<Rational>& p,
                             const std::vector<Rational>& q) {
  int dp = static_cast<int>(p.size()) - 1;
  int dq = static_cast<int>(q.size()) - 1;
  int n = dp + dq;
  std::vector<std::vector<Rational>> mat(
      static_cast<std::size_t>(n),
      std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
  for (int row = 0; row < dq; ++row) {
    for (int k = 0; k <= dp; ++k) {
      mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(row + k)] =
          p[static_cast<std::size_t>(dp - k)];
    }
  }
  for (int row = 0; row < dp; ++row) {
    for (int k = 0; k <= dq; ++k) {
      mat[static_cast<std::size_t>(dq + row)]
         [static_cast<std::size_t>(row + k)] =
             q[static_cast<std::size_t>(dq - k)];
    }
  }
  // Gaussian elimination over the rationals.
  Rational det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row) {
      if (mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] !=
          0) {
        pivot = row;
        break;
      }
    }
    if (pivot == -1) return Rational(0);
    if (pivot != col) {
      std::swap(mat[static_cast<std::size_t>(pivot)],
                mat[static_cast<std::size_t>(col)]);
      det = -det;
    }
    const Rational& pv =
        mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    det *= pv;
    for (int row = col + 1; row < n; ++row) {
      Rational f =
          mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] /
          pv;
      if (f == 0) continue;
      for (int k = col; k < n; ++k) {
        mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] -=
            f * mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)];
      }
    }
  }
  return det;
}

}  // namespace

Polynomial resultant_wrt(const Polynomial& p, const Polynomial& q,
                         int elim_var) {
  if (p.nvars() != q.nvars()) fail_input("resultant arity mismatch");
  if (p.nvars() != 2) fail_input("resultant implemented for two variables");
  int keep_var = elim_var == 0 ? 1 : 0;
  int dp = p.degree_in(elim_var);
  int dq = q.degree_in(elim_var);
  if (dp <= 0 && dq <= 0) {
    return Polynomial::constant(2, Rational(1));
  }
  if (dp <= 0) return p.pow(static_cast<unsigned>(dq));
  if (dq <= 0) return q.pow(static_cast<unsigned>(dp));

  auto p_coeffs = p.coeffs_in(elim_var);
  auto q_coeffs = q.coeffs_in(elim_var);
  const Polynomial& lc_p = p_coeffs.back();
  const Polynomial& lc_q = q_coeffs.back();

  // Degree bound: each of the first dq Sylvester rows carries coefficients
  // of p; each of the remaining dp rows carries coefficients of q.
  int bound = dq * std::max(p.degree_in(keep_var), 0) +
              dp * std::max(q.degree_in(keep_var), 0);
  int needed = bound + 1;

  std::vector<Rational> xs, ys;
  for (int t = 0; static_cast<int>(xs.size()) < needed; ++t) {
    // 0, 1, -1, 2, -2, ...
    Rational x = (t % 2 == 1) ? Rational((t + 1) / 2) : Rational(-(t / 2));
    std::vector<Rational> px(1, Rational(0));
    if (lc_p.substituted(keep_var, x).is_zero() ||
        lc_q.substituted(keep_var, x).is_zero()) {
      continue;  // degree would drop; specialization is unsound here
    }
    std::vector<Rational> pv, qv;
    std::vector<Rational> point(2, Rational(0));
    point[keep_var] = x;
    for (const auto& c : p_coeffs) pv.push_back(c.eval_exact(point));
    for (const auto& c : q_coeffs) qv.push_back(c.eval_exact(point));
    xs.push_back(x);
    ys.push_back(sylvester_resultant(pv, qv));
    if (t > 16 * needed + 64) {
      fail_numeric("resultant interpolation could not find sample points");
    }
  }

  // Lagrange interpolation via Newton's divided differences.
  std::vector<Rational> coef = ys;
  int n = static_cast<int>(xs.size());
  for (int j = 1; j < n; ++j) {
    for (int k = n - 1; k >= j; --k) {
      coef[static_cast<std::size_t>(k)] =
          (coef[static_cast<std::size_t>(k)] -
           coef[static_cast<std::size_t>(k - 1)]) /
          (xs[static_cast<std::size_t>(k)] - xs[static_cast<std::size_t>(k - j)]);
    }
  }
  // Expand the Newton form into the monomial basis.
  Polynomial result = Polynomial::constant(2, Rational(0));
  Polynomial accum = Polynomial::constant(2, Rational(1));
  Polynomial var = Polynomial::variable(2, keep_var);
  for (int k = 0; k < n; ++k) {
    result = result + accum.scaled(coef[static_cast<std::size_t>(k)]);
    accum = accum *
            (var - Polynomial::constant(2, xs[static_cast<std::size_t>(k)]));
  }
  return result;
}

namespace {

double poly_scale(const Polynomial& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) {
    s = std::max(s, std::fabs(to_double(c)));
  }
  return std::max(s, 1.0);
}

struct NewtonSystem {
  const Polynomial& p;
  const Polynomial& q;
  Polynomial pa, pw, qa, qw;

  NewtonSystem(const Polynomial& p_, const Polynomial& q_)
      : p(p_), q(q_), pa(p_.partial(0)), pw(p_.partial(1)),
        qa(q_.partial(0)), qw(q_.partial(1)) {}

  // One Newton step on (p, q) = 0; returns false when the Jacobian is
  // numerically singular.
  bool step(double* a, double* w) const {
    std::vector<double> pt{*a, *w};
    double f1 = p.eval(pt), f2 = q.eval(pt);
    double j11 = pa.eval(pt), j12 = pw.eval(pt);
    double j21 = qa.eval(pt), j22 = qw.eval(pt);
    double det = j11 * j22 - j12 * j21;
    double scale = std::max({std::fabs(j11), std::fabs(j12), std::fabs(j21),
                             std::fabs(j22), 1e-300});
    if (std::fabs(det) < 1e-14 * scale * scale) return false;
    *a -= (f1 * j22 - f2 * j12) / det;
    *w -= (f2 * j11 - f1 * j21) / det;
    return true;
  }

  double residual(double a, double w) const {
    std::vector<double> pt{a, w};
    return std::max(std::fabs(p.eval(pt)), std::fabs(q.eval(pt)));
  }
};

void add_point(std::vector<BivariatePoint>* pts, double a, double w,
               double residual) {
  for (const auto& existing : *pts) {
    if (std::fabs(existing.alpha - a) < 1e-8 &&
        std::fabs(existing.w - w) < 1e-8) {
      return;
    }
  }
  pts->push_back(BivariatePoint{a, w, residual});
}

// Dense scan + Newton fallback, used when the elimination route degenerates.
void subdivision_fallback(const Polynomial& p, const Polynomial& q,
                          const Box2& box, double tol,
                          std::vector<BivariatePoint>* pts) {
  const int kGrid = 192;
  NewtonSystem sys(p, q);
  double scale = std::max(poly_scale(p), poly_scale(q));
  double da = (box.alpha_hi - box.alpha_lo) / kGrid;
  double dw = (box.w_hi - box.w_lo) / kGrid;
  for (int i = 0; i <= kGrid; ++i) {
    for (int j = 0; j <= kGrid; ++j) {
      double a = box.alpha_lo + i * da;
      double w = box.w_lo + j * dw;
      if (sys.residual(a, w) > scale * std::max(da, dw) * 4.0) continue;
      for (int it = 0; it < 40; ++it) {
        if (!sys.step(&a, &w)) break;
      }
      if (a < box.alpha_lo - 1e-9 || a > box.alpha_hi + 1e-9 ||
          w < box.w_lo - 1e-9 || w > box.w_hi + 1e-9) {
        continue;
      }
      double res = sys.residual(a, w);
      if (res <= tol * scale) add_point(pts, a, w, res);
    }
  }
}

}  // namespace

BivariateSolution solve_bivariate(const Polynomial& p, const Polynomial& q,
                                  const Box2& box, double tol) {
  if (p.nvars() != 2 || q.nvars() != 2) {
    fail_input("solve_bivariate expects polynomials in (a, w1)");
  }
  if (p.is_zero() || q.is_zero()) {
    fail_input("solve_bivariate requires nonzero polynomials");
  }
  BivariateSolution sol;
  Polynomial pr = p, qr = q;
  Polynomial g = poly_gcd(p, q);
  if (g.total_degree() >= 1) {
    sol.shared_curve = true;
    sol.shared_factor = g;
    pr = exact_divide(p, g);
    qr = exact_divide(q, g);
  }
  if (pr.is_constant() || qr.is_constant()) {
    // A nonzero constant in the cofactor system: no isolated common zeros.
    return sol;
  }

  NewtonSystem sys(pr, qr);
  double scale = std::max(poly_scale(pr), poly_scale(qr));
  // Box endpoints as exact rationals (doubles convert exactly).
  Rational alo(box.alpha_lo);
  Rational ahi(box.alpha_hi);

  auto back_substitute = [&](double alpha_hat) {
    std::vector<double> p_dense, q_dense;
    for (const auto& c : pr.coeffs_in(1)) {
      p_dense.push_back(c.eval({alpha_hat, 0.0}));
    }
    for (const auto& c : qr.coeffs_in(1)) {
      q_dense.push_back(c.eval({alpha_hat, 0.0}));
    }
    double p_mag = 0.0, q_mag = 0.0;
    for (double x : p_dense) p_mag = std::max(p_mag, std::fabs(x));
    for (double x : q_dense) q_mag = std::max(q_mag, std::fabs(x));
    // Root-find on whichever slice still has w-degree and is better
    // conditioned; the other slice filters candidates.
    bool use_p = pr.degree_in(1) > 0;
    if (use_p && qr.degree_in(1) > 0) use_p = p_mag >= q_mag;
    const std::vector<double>& primary = use_p ? p_dense : q_dense;
    const std::vector<double>& secondary = use_p ? q_dense : p_dense;
    double margin = 1e-7 * (box.w_hi - box.w_lo);
    auto ws = real_roots_dense(primary, box.w_lo - margin, box.w_hi + margin);
    for (double w : ws) {
      double other = std::fabs(eval_dense(secondary, w));
      if (other > 1e-4 * scale) continue;  // coarse filter before polishing
      double a = alpha_hat, wp = w;
      for (int it = 0; it < 40; ++it) {
        double before = sys.residual(a, wp);
        if (before <= 1e-15 * scale) break;
        if (!sys.step(&a, &wp)) break;
      }
      if (sys.residual(a, wp) > sys.residual(alpha_hat, w)) {
        a = alpha_hat;  // Newton diverged; the seed was already closer
        wp = w;
      }
      double res = sys.residual(a, wp);
      if (res > tol * scale) {
        // Newton may have been blocked by a singular Jacobian (tangential
        // crossing); retry from the unpolished candidate with damping.
        a = alpha_hat;
        wp = w;
        for (int it = 0; it < 60; ++it) {
          double ra = a, rw = wp;
          if (!sys.step(&ra, &rw)) break;
          a = 0.5 * (a + ra);
          wp = 0.5 * (wp + rw);
        }
        res = sys.residual(a, wp);
      }
      if (res > tol * scale) {
        if (std::fabs(eval_dense(secondary, w)) <= 1e-7 * scale) {
          fail_numeric("solve_bivariate did not converge: residual " +
                       std::to_string(res) + " exceeds tolerance " +
                       std::to_string(tol * scale));
        }
        continue;  // filter noise, not a true common zero
      }
      if (a < box.alpha_lo - 1e-9 || a > box.alpha_hi + 1e-9 ||
          wp < box.w_lo - margin || wp > box.w_hi + margin) {
        continue;
      }
      add_point(&sol.points, a, wp, res);
    }
  };

  int dpw = pr.degree_in(1);
  int dqw = qr.degree_in(1);
  if (dpw <= 0 && dqw <= 0) {
    // Both cofactors depend on alpha only and are coprime: their common
    // zero set is empty.
    return sol;
  }
  if (dpw <= 0 || dqw <= 0) {
    // One curve is a union of vertical lines alpha = const; intersect the
    // other curve with each line.
    const Polynomial& lines = dpw <= 0 ? pr : qr;
    auto rr = real_roots_univariate(lines, 0, alo, ahi, 1e-9);
    for (const auto& root : rr.roots) back_substitute(root.mid());
  } else {
    Polynomial res_alpha = resultant_wrt(pr, qr, 1);
    if (res_alpha.is_zero()) {
      // Should be impossible for coprime inputs; fall back to subdivision.
      subdivision_fallback(pr, qr, box, tol, &sol.points);
    } else {
      auto rr = real_roots_univariate(res_alpha, 0, alo, ahi, 1e-9);
      if (rr.identically_zero) {
        subdivision_fallback(pr, qr, box, tol, &sol.points);
      } else {
        for (const auto& root : rr.roots) back_substitute(root.mid());
      }
    }
  }
  std::sort(sol.points.begin(), sol.points.end(),
            [](const BivariatePoint& a, const BivariatePoint& b) {
              return a.alpha < b.alpha || (a.alpha == b.alpha && a.w < b.w);
            });
  return sol;
}

}  // namespace envtrace
