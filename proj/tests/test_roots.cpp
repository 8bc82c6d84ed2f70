#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/polynomial.hpp"
#include "envtrace/random.hpp"
#include "envtrace/roots.hpp"

#include <algorithm>
#include <cmath>

using namespace envtrace;

namespace {

// Product of (x - r) over planted rational roots, in variable `var`.
Polynomial from_roots(int nvars, int var, const std::vector<Rational>& roots) {
  Polynomial p = Polynomial::constant(nvars, Rational(1));
  Polynomial x = Polynomial::variable(nvars, var);
  for (const auto& r : roots) {
    p = p * (x - Polynomial::constant(nvars, r));
  }
  return p;
}

}  // namespace

TEST_CASE("simple quadratics") {
  Polynomial w = Polynomial::variable(1, 0);
  Polynomial one = Polynomial::constant(1, Rational(1));

  auto rr = real_roots_univariate(w.pow(2) - one, 0, Rational(-2), Rational(2));
  REQUIRE(rr.roots.size() == 2);
  CHECK(rr.roots[0].mid() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(rr.roots[1].mid() == doctest::Approx(1.0).epsilon(1e-10));

  auto none =
      real_roots_univariate(w.pow(2) + one, 0, Rational(-2), Rational(2));
  CHECK(none.roots.empty());
}

TEST_CASE("interval restriction") {
  // w(w-1)(w-2) on [1/2, 3] keeps only {1, 2}.
  Polynomial p = from_roots(1, 0, {Rational(0), Rational(1), Rational(2)});
  auto rr = real_roots_univariate(p, 0, Rational(1, 2), Rational(3));
  REQUIRE(rr.roots.size() == 2);
  CHECK(rr.roots[0].mid() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rr.roots[1].mid() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("identically zero input is signaled, not enumerated") {
  Polynomial zero(1);
  auto rr = real_roots_univariate(zero, 0, Rational(0), Rational(1));
  CHECK(rr.identically_zero);
  CHECK(rr.roots.empty());
}

TEST_CASE("multiplicities from the square-free decomposition") {
  Polynomial w = Polynomial::variable(1, 0);
  Polynomial one = Polynomial::constant(1, Rational(1));
  // (w-1)^2 (w+1)
  Polynomial p = (w - one) * (w - one) * (w + one);
  auto rr = real_roots_univariate(p, 0, Rational(-2), Rational(2));
  REQUIRE(rr.roots.size() == 2);
  CHECK(rr.roots[0].multiplicity == 1);
  CHECK(rr.roots[0].mid() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(rr.roots[1].multiplicity == 2);
  CHECK(rr.roots[1].mid() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("planted rational roots are recovered inside their intervals") {
  Rng rng(1234u);
  for (int trial = 0; trial < 100; ++trial) {
    int count = rng.next_int(1, 8);
    std::vector<Rational> roots;
    for (int k = 0; k < count; ++k) {
      Rational r = rng.next_small_rational(8, 4);
      bool dupe = false;
      for (const auto& other : roots) dupe = dupe || other == r;
      if (!dupe) roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end());
    Polynomial p = from_roots(1, 0, roots);
    auto rr = real_roots_univariate(p, 0, Rational(-9), Rational(9));
    REQUIRE(rr.roots.size() == roots.size());
    REQUIRE(static_cast<int>(rr.roots.size()) <= p.total_degree());
    for (std::size_t k = 0; k < roots.size(); ++k) {
      // Planted root lies inside the certified isolating interval.
      CHECK(rr.roots[k].lo <= roots[k]);
      CHECK(roots[k] <= rr.roots[k].hi);
    }
  }
}

TEST_CASE("isolation width honors the configured tolerance") {
  Polynomial w = Polynomial::variable(1, 0);
  Polynomial two = Polynomial::constant(1, Rational(2));
  // w^2 - 2: irrational roots need genuine bisection work.
  auto rr = real_roots_univariate(w.pow(2) - two, 0, Rational(-3), Rational(3));
  REQUIRE(rr.roots.size() == 2);
  for (const auto& r : rr.roots) {
    CHECK(to_double(r.hi - r.lo) <= 1e-12);
  }
  CHECK(rr.roots[1].mid() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
}

TEST_CASE("endpoint roots are reported once") {
  Polynomial w = Polynomial::variable(1, 0);
  Polynomial p = w * (w - Polynomial::constant(1, Rational(1)));
  auto rr = real_roots_univariate(p, 0, Rational(0), Rational(1));
  REQUIRE(rr.roots.size() == 2);
  CHECK(rr.roots[0].mid() == doctest::Approx(0.0));
  CHECK(rr.roots[1].mid() == doctest::Approx(1.0));
}

TEST_CASE("dense double-precision rootfinder") {
  // x^3 - x on [-2, 2]
  std::vector<double> c{0.0, -1.0, 0.0, 1.0};
  auto roots = real_roots_dense(c, -2.0, 2.0);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(0.0));
  CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-12));

  // Tangency: x^2 has a double root at 0.
  auto tangent = real_roots_dense({0.0, 0.0, 1.0}, -1.0, 1.0);
  REQUIRE(tangent.size() == 1);
  CHECK(tangent[0] == doctest::Approx(0.0));

  Rng rng(55u);
  for (int trial = 0; trial < 100; ++trial) {
    // Random cubic with distinct planted roots.
    double r1 = rng.next_range(-2.0, 2.0);
    double r2 = r1 + rng.next_range(0.1, 1.0);
    double r3 = r2 + rng.next_range(0.1, 1.0);
    std::vector<double> poly{-r1 * r2 * r3, r1 * r2 + r1 * r3 + r2 * r3,
                             -(r1 + r2 + r3), 1.0};
    auto rs = real_roots_dense(poly, -5.0, 5.0);
    REQUIRE(rs.size() == 3);
    CHECK(rs[0] == doctest::Approx(r1).epsilon(1e-9));
    CHECK(rs[1] == doctest::Approx(r2).epsilon(1e-9));
    CHECK(rs[2] == doctest::Approx(r3).epsilon(1e-9));
  }
}
