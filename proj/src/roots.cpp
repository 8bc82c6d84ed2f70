#include "envtrace/roots.hpp"

#include "envtrace/error.hpp"

#include <algorithm>
#include <cmath>

namespace envtrace {

namespace {

// Dense univariate polynomial over the rationals; coefficient k multiplies
// x^k. All helpers keep the representation trimmed (no zero leading coeff).
using UPoly = std::vector<Rational>;

void trim(UPoly* p) {
  while (!p->empty() && p->back() == 0) p->pop_back();
}

int deg(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

Rational eval_at(const UPoly& p, const Rational& x) {
  Rational acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

UPoly derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) {
    d.push_back(p[k] * Rational(static_cast<int>(k)));
  }
  trim(&d);
  return d;
}

// Divides every coefficient by the rational content and fixes the sign of
// the leading coefficient positive. Keeps Sturm/Euclid chains from blowing
// up in coefficient size.
void make_primitive(UPoly* p) {
  trim(p);
  if (p->empty()) return;
  Rational content(0);
  for (const auto& c : *p) content = rational_gcd(content, c);
  if (p->back() < 0) content = -content;
  for (auto& c : *p) c /= content;
}

// Euclidean remainder of a by b (b nonzero).
UPoly rem(const UPoly& a, const UPoly& b) {
  UPoly r = a;
  trim(&r);
  while (deg(r) >= deg(b) && !r.empty()) {
    Rational factor = r.back() / b.back();
    int shift = deg(r) - deg(b);
    for (int k = 0; k <= deg(b); ++k) {
      r[static_cast<std::size_t>(k + shift)] -=
          factor * b[static_cast<std::size_t>(k)];
    }
    trim(&r);
  }
  return r;
}

UPoly quotient(const UPoly& a, const UPoly& b) {
  UPoly r = a;
  trim(&r);
  UPoly q(a.size(), Rational(0));
  while (deg(r) >= deg(b) && !r.empty()) {
    Rational factor = r.back() / b.back();
    int shift = deg(r) - deg(b);
    q[static_cast<std::size_t>(shift)] = factor;
    for (int k = 0; k <= deg(b); ++k) {
      r[static_cast<std::size_t>(k + shift)] -=
          factor * b[static_cast<std::size_t>(k)];
    }
    trim(&r);
  }
  trim(&q);
  return q;
}

UPoly upoly_gcd(UPoly a, UPoly b) {
  make_primitive(&a);
  make_primitive(&b);
  while (!b.empty()) {
    UPoly r = rem(a, b);
    make_primitive(&r);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.empty()) a = UPoly{Rational(1)};
  return a;
}

// Yun's square-free decomposition: p = prod factors[k]^(k+1).
std::vector<UPoly> square_free_decomposition(const UPoly& p) {
  std::vector<UPoly> factors;
  UPoly d = derivative(p);
  UPoly a = upoly_gcd(p, d);
  UPoly b = quotient(p, a);
  UPoly c = quotient(d, a);
  while (true) {
    UPoly db = derivative(b);
    UPoly diff = c;
    diff.resize(std::max(diff.size(), db.size()), Rational(0));
    for (std::size_t k = 0; k < db.size(); ++k) diff[k] -= db[k];
    trim(&diff);
    UPoly g = upoly_gcd(b, diff);
    factors.push_back(g);
    if (deg(b) == deg(g)) break;
    b = quotient(b, g);
    c = quotient(diff, g);
    if (deg(b) <= 0) break;
  }
  return factors;
}

// Scales by the (positive) content only: Sturm chains tolerate positive
// rescaling but their signs are load-bearing, so no sign normalization.
void divide_by_positive_content(UPoly* p) {
  trim(p);
  if (p->empty()) return;
  Rational content(0);
  for (const auto& c : *p) content = rational_gcd(content, c);
  for (auto& c : *p) c /= content;
}

struct SturmChain {
  std::vector<UPoly> seq;

  explicit SturmChain(const UPoly& p) {
    seq.push_back(p);
    UPoly d = derivative(p);
    if (!d.empty()) seq.push_back(d);
    while (seq.size() >= 2) {
      UPoly r = rem(seq[seq.size() - 2], seq.back());
      if (r.empty()) break;
      for (auto& c : r) c = -c;
      divide_by_positive_content(&r);
      seq.push_back(std::move(r));
    }
  }

  int sign_changes(const Rational& x) const {
    int changes = 0;
    int prev = 0;
    for (const auto& p : seq) {
      int s = sign_of(eval_at(p, x));
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
    return changes;
  }

  // Number of distinct roots in the half-open interval (lo, hi].
  int count(const Rational& lo, const Rational& hi) const {
    return sign_changes(lo) - sign_changes(hi);
  }
};

void isolate_recursive(const SturmChain& chain, const UPoly& p,
                       const Rational& lo, const Rational& hi,
                       const Rational& width, std::vector<RealRoot>* out) {
  int n = chain.count(lo, hi);
  if (n == 0) return;
  if (n == 1) {
    // Refine by Sturm-count bisection: works for even-multiplicity roots of
    // the original polynomial too because `p` here is square-free (all
    // roots simple, sign changes at each).
    Rational a = lo, b = hi;
    while (b - a > width) {
      Rational mid = (a + b) / 2;
      if (eval_at(p, mid) == 0) {
        out->push_back(RealRoot{mid, mid, 1});
        return;
      }
      if (chain.count(a, mid) == 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out->push_back(RealRoot{a, b, 1});
    return;
  }
  Rational mid = (lo + hi) / 2;
  isolate_recursive(chain, p, lo, mid, width, out);
  isolate_recursive(chain, p, mid, hi, width, out);
}

}  // namespace

RootsResult real_roots_univariate(const Polynomial& p, int var,
                                  const Rational& lo, const Rational& hi,
                                  double isolation_width) {
  RootsResult result;
  if (p.is_zero()) {
    result.identically_zero = true;
    return result;
  }
  if (lo > hi) fail_input("root isolation interval is empty");
  UPoly dense;
  {
    auto coeffs = p.univariate_coeffs(var);
    for (const auto& c : coeffs) dense.push_back(c);
    trim(&dense);
  }
  if (deg(dense) <= 0) return result;  // nonzero constant: no roots

  Rational width(1, 1);
  while (to_double(width) > isolation_width) width /= 2;

  auto factors = square_free_decomposition(dense);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    UPoly f = factors[k];
    make_primitive(&f);
    if (deg(f) <= 0) continue;
    int multiplicity = static_cast<int>(k) + 1;
    std::vector<RealRoot> roots;
    // Endpoint roots first: Sturm counting is half-open (lo, hi].
    if (eval_at(f, lo) == 0) roots.push_back(RealRoot{lo, lo, multiplicity});
    SturmChain chain(f);
    isolate_recursive(chain, f, lo, hi, width, &roots);
    for (auto& r : roots) {
      r.multiplicity = multiplicity;
      result.roots.push_back(r);
    }
  }
  std::sort(result.roots.begin(), result.roots.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.lo < b.lo; });
  return result;
}

double eval_dense(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

namespace {

std::vector<double> dense_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) {
    d.push_back(c[k] * static_cast<double>(k));
  }
  return d;
}

double bisect_root(const std::vector<double>& c, double a, double b, double fa,
                   double fb) {
  // fa and fb have opposite signs. 80 halvings reach full double precision.
  for (int iter = 0; iter < 80 && b - a > 1e-15 * (1.0 + std::fabs(a));
       ++iter) {
    double m = 0.5 * (a + b);
    double fm = eval_dense(c, m);
    if (fm == 0.0) return m;
    if ((fa < 0) != (fm < 0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  (void)fb;
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> real_roots_dense(const std::vector<double>& coeffs,
                                     double lo, double hi) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> roots;
  if (c.size() <= 1) return roots;  // constant (or zero): no isolated roots
  if (c.size() == 2) {
    double r = -c[0] / c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  // Critical points of c partition [lo, hi] into monotonic pieces; one
  // sign-change bisection per piece finds every simple root. Tangencies
  // (even-multiplicity roots) are caught by the near-zero check at the
  // critical points themselves.
  std::vector<double> crit = real_roots_dense(dense_derivative(c), lo, hi);
  std::vector<double> knots;
  knots.push_back(lo);
  for (double x : crit) {
    if (x > knots.back()) knots.push_back(x);
  }
  if (hi > knots.back()) knots.push_back(hi);

  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::fabs(x));
  double zero_tol = scale * 1e-12;

  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double a = knots[k], b = knots[k + 1];
    double fa = eval_dense(c, a), fb = eval_dense(c, b);
    if (std::fabs(fa) <= zero_tol) {
      if (roots.empty() || a - roots.back() > 1e-12) roots.push_back(a);
    }
    if ((fa < 0) != (fb < 0) && std::fabs(fa) > zero_tol &&
        std::fabs(fb) > zero_tol) {
      double r = bisect_root(c, a, b, fa, fb);
      if (roots.empty() || r - roots.back() > 1e-12) roots.push_back(r);
    }
  }
  double fb = eval_dense(c, knots.back());
  if (std::fabs(fb) <= zero_tol) {
    if (roots.empty() || knots.back() - roots.back() > 1e-12) {
      roots.push_back(knots.back());
    }
  }
  return roots;
}

}  // namespace envtrace
