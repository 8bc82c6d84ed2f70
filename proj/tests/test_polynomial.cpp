#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/polynomial.hpp"
#include "envtrace/random.hpp"

#include <cmath>

using namespace envtrace;

namespace {

Polynomial random_poly(Rng& rng, int nvars, int max_degree) {
  Polynomial p(nvars);
  int terms = rng.next_int(1, 6);
  for (int t = 0; t < terms; ++t) {
    Monomial m(static_cast<std::size_t>(nvars), 0u);
    int budget = max_degree;
    for (int v = 0; v < nvars; ++v) {
      int e = rng.next_int(0, budget);
      m[static_cast<std::size_t>(v)] = static_cast<unsigned>(e);
      budget -= e;
    }
    p.add_term(m, rng.next_small_rational(9, 4));
  }
  return p;
}

}  // namespace

TEST_CASE("evaluation of basic polynomials") {
  // p = a*w
  Polynomial p = Polynomial::variable(2, 0) * Polynomial::variable(2, 1);
  CHECK(p.eval_exact({Rational(2), Rational(3)}) == Rational(6));

  Polynomial zero(2);
  CHECK(zero.eval_exact({Rational(5), Rational(-7)}) == Rational(0));
  CHECK(zero.is_zero());

  // a^2 + w^2 - 1 at a point on the unit circle
  Polynomial circle = Polynomial::variable(2, 0).pow(2) +
                      Polynomial::variable(2, 1).pow(2) -
                      Polynomial::constant(2, Rational(1));
  CHECK(circle.eval_exact({Rational(0), Rational(1)}) == Rational(0));
}

TEST_CASE("partial derivatives") {
  Polynomial a = Polynomial::variable(2, 0);
  Polynomial w = Polynomial::variable(2, 1);

  // d(a^2 w^3)/dw = 3 a^2 w^2
  Polynomial p = a.pow(2) * w.pow(3);
  Polynomial expect = a.pow(2) * w.pow(2) * Polynomial::constant(2, Rational(3));
  CHECK(p.partial(1) == expect);

  CHECK(Polynomial::constant(2, Rational(7)).partial(0).is_zero());

  // d(a w - w^3/3)/dw = a - w^2
  Polynomial f = a * w - w.pow(3).scaled(Rational(1, 3));
  CHECK(f.partial(1) == a - w.pow(2));
}

TEST_CASE("degree accounting and canonical form") {
  Polynomial a = Polynomial::variable(2, 0);
  Polynomial w = Polynomial::variable(2, 1);
  Polynomial p = a.pow(2) * w + w.pow(2);
  CHECK(p.total_degree() == 3);
  CHECK(p.degree_in(0) == 2);
  CHECK(p.degree_in(1) == 2);

  // Cancelling terms must leave no zero coefficients behind.
  Polynomial q = p - p;
  CHECK(q.is_zero());
  CHECK(q.terms().empty());
  CHECK(q.total_degree() == -1);

  // Equal polynomials built differently have identical term maps.
  Polynomial r1 = (a + w) * (a - w);
  Polynomial r2 = a.pow(2) - w.pow(2);
  CHECK(r1 == r2);
}

TEST_CASE("parse/print round trip") {
  Rng rng(20240817u);
  for (int trial = 0; trial < 200; ++trial) {
    int nvars = rng.next_int(1, 3);
    Polynomial p = random_poly(rng, nvars, 5);
    Polynomial back = Polynomial::parse(p.to_string(), nvars);
    CHECK(back == p);
  }
}

TEST_CASE("parse accepts the documented grammar") {
  Polynomial p = Polynomial::parse("a*w1 - 1/3*w1^3", 2);
  Polynomial a = Polynomial::variable(2, 0);
  Polynomial w = Polynomial::variable(2, 1);
  CHECK(p == a * w - w.pow(3).scaled(Rational(1, 3)));

  // 'w' is an alias for 'w1'; coefficients may be implicit.
  CHECK(Polynomial::parse("w", 2) == w);
  CHECK(Polynomial::parse("-a^2 + 2", 2) ==
        Polynomial::constant(2, Rational(2)) - a.pow(2));

  CHECK_THROWS(Polynomial::parse("0.5*a", 2));   // floats rejected
  CHECK_THROWS(Polynomial::parse("w3", 2));      // unknown variable
  CHECK_THROWS(Polynomial::parse("a +", 2));     // dangling operator
}

TEST_CASE("derivative matches finite differences") {
  Rng rng(7u);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial p = random_poly(rng, 2, 4);
    Polynomial dpda = p.partial(0);
    double a = rng.next_range(-1.0, 1.0);
    double w = rng.next_range(-1.0, 1.0);
    for (double h : {1e-4, 1e-5}) {
      double fd = (p.eval({a + h, w}) - p.eval({a, w})) / h;
      double exact = dpda.eval({a, w});
      // Forward differences carry an O(h) truncation term whose constant
      // scales with the second derivative; coefficients here are <= 9/1.
      CHECK(std::fabs(fd - exact) <= 2000.0 * h);
    }
  }
}

TEST_CASE("exact and floating evaluation agree") {
  Rng rng(99u);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial p = random_poly(rng, 2, 5);
    Rational ar = rng.next_small_rational(4, 4);
    Rational wr = rng.next_small_rational(4, 4);
    double exact = to_double(p.eval_exact({ar, wr}));
    double approx = p.eval({to_double(ar), to_double(wr)});
    CHECK(approx == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("substitution pins a variable") {
  Polynomial a = Polynomial::variable(2, 0);
  Polynomial w = Polynomial::variable(2, 1);
  Polynomial f = a * w - w.pow(3).scaled(Rational(1, 3));
  Polynomial at_half = f.substituted(0, Rational(1, 2));
  CHECK(at_half.degree_in(0) == 0);
  CHECK(at_half.eval_exact({Rational(0), Rational(1)}) ==
        Rational(1, 2) - Rational(1, 3));
}
