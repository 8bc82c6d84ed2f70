#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/bivariate.hpp"
#include "envtrace/polynomial.hpp"
#include "envtrace/random.hpp"

#include <cmath>

using namespace envtrace;

namespace {

Polynomial A() { return Polynomial::variable(2, 0); }
Polynomial W() { return Polynomial::variable(2, 1); }
Polynomial C(int num, int den = 1) {
  return Polynomial::constant(2, Rational(num, den));
}

}  // namespace

TEST_CASE("gcd basics") {
  CHECK(poly_gcd(W().pow(2), W().pow(3)) == W().pow(2));
  CHECK(poly_gcd(W() - A(), W() + A()) == C(1));

  // gcd((w-a)(w+1), (w-a)(a+2)) = w - a
  Polynomial shared = W() - A();
  Polynomial p = shared * (W() + C(1));
  Polynomial q = shared * (A() + C(2));
  CHECK(poly_gcd(p, q) == shared);
}

TEST_CASE("gcd of random products recovers the planted factor") {
  Rng rng(4321u);
  for (int trial = 0; trial < 60; ++trial) {
    Polynomial g = W() + A().scaled(rng.next_small_rational(3, 2)) +
                   C(rng.next_int(-3, 3));
    Polynomial u = W() + C(rng.next_int(1, 5));
    Polynomial v = A() - C(rng.next_int(1, 5));
    Polynomial gcd = poly_gcd(g * u, g * v);
    // u and v are coprime, so the gcd is exactly g up to scalar; parse its
    // normalized form by dividing out.
    Polynomial cof = exact_divide(g * u, gcd);
    CHECK(gcd.total_degree() == g.total_degree());
    CHECK((cof * gcd) == (g * u));
  }
}

TEST_CASE("exact division rejects non-divisors") {
  CHECK_THROWS(exact_divide(W() + C(1), W() - C(1)));
}

TEST_CASE("resultant eliminates the parameter variable") {
  // Res_w(a - w^2, -2w) vanishes exactly at a = 0.
  Polynomial p = A() - W().pow(2);
  Polynomial q = W().scaled(Rational(-2));
  Polynomial res = resultant_wrt(p, q, 1);
  CHECK(res.degree_in(1) == 0);
  CHECK(res.substituted(0, Rational(0)).is_zero());
  CHECK_FALSE(res.substituted(0, Rational(1)).is_zero());
}

TEST_CASE("no stationary points on a line") {
  // p = w - a with dp/dw = 1: the system {p = 0, 1 = 0} has no solutions.
  Box2 box{-2.0, 2.0, -2.0, 2.0};
  auto sol = solve_bivariate(W() - A(), C(1), box);
  CHECK(sol.points.empty());
  CHECK_FALSE(sol.shared_curve);
}

TEST_CASE("extreme points of the unit circle") {
  Box2 box{-2.0, 2.0, -2.0, 2.0};
  Polynomial circle = A().pow(2) + W().pow(2) - C(1);
  auto sol = solve_bivariate(circle, W().scaled(Rational(2)), box);
  REQUIRE(sol.points.size() == 2);
  CHECK(sol.points[0].alpha == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sol.points[0].w == doctest::Approx(0.0));
  CHECK(sol.points[1].alpha == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.points[1].w == doctest::Approx(0.0));
  for (const auto& pt : sol.points) CHECK(pt.residual <= 1e-9);
}

TEST_CASE("parabola vertex via tangency") {
  Box2 box{-2.0, 2.0, -2.0, 2.0};
  auto sol = solve_bivariate(A() - W().pow(2), W().scaled(Rational(-2)), box);
  REQUIRE(sol.points.size() == 1);
  CHECK(sol.points[0].alpha == doctest::Approx(0.0));
  CHECK(sol.points[0].w == doctest::Approx(0.0));
}

TEST_CASE("shared curve components are flagged and divided out") {
  // p = (w - a) * (w + 1), q = (w - a) * (a + 2): the line w = a is common.
  Polynomial shared = W() - A();
  Polynomial p = shared * (W() + C(1));
  Polynomial q = shared * (A() + C(2));
  Box2 box{-3.0, 3.0, -3.0, 3.0};
  auto sol = solve_bivariate(p, q, box);
  CHECK(sol.shared_curve);
  CHECK(sol.shared_factor == shared);
  // Cofactor system: w + 1 = 0 and a + 2 = 0 meet at (-2, -1).
  REQUIRE(sol.points.size() == 1);
  CHECK(sol.points[0].alpha == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(sol.points[0].w == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("planted intersection points are recovered") {
  Rng rng(777u);
  int found_all = 0;
  for (int trial = 0; trial < 40; ++trial) {
    // Plant intersections of a conic p and a line q at two known points by
    // construction: q is a line through (a0, w0) and (a1, w1); p is the
    // product of two other lines through those points, giving exactly two
    // isolated common zeros.
    double a0 = rng.next_range(-0.8, -0.1), w0 = rng.next_range(-0.8, 0.8);
    double a1 = rng.next_range(0.1, 0.8), w1 = rng.next_range(-0.8, 0.8);
    auto line_through = [&](double ax, double wx, const Rational& slope) {
      // w - wx - slope*(a - ax), with double endpoints converted exactly.
      return W() - Polynomial::constant(2, Rational(wx)) -
             (A() - Polynomial::constant(2, Rational(ax))).scaled(slope);
    };
    Rational s_q = rng.next_small_rational(2, 3);
    Polynomial q = line_through(a0, w0, s_q) * C(1);
    // Force q through both points: recompute w1 so it lies on q.
    std::vector<double> pt{a1, 0.0};
    // Solve q(a1, w) = 0 for w: q is linear in w with unit coefficient.
    double w_on_q = w0 + to_double(s_q) * (a1 - a0);
    w1 = w_on_q;
    Polynomial p = line_through(a0, w0, s_q + Rational(1, 2)) *
                   line_through(a1, w1, s_q - Rational(1, 2));
    Box2 box{-1.0, 1.0, -3.0, 3.0};
    auto sol = solve_bivariate(p, q, box);
    bool ok0 = false, ok1 = false;
    for (const auto& found : sol.points) {
      ok0 = ok0 || (std::fabs(found.alpha - a0) < 1e-8 &&
                    std::fabs(found.w - w0) < 1e-8);
      ok1 = ok1 || (std::fabs(found.alpha - a1) < 1e-8 &&
                    std::fabs(found.w - w1) < 1e-8);
    }
    if (std::fabs(w1) < 2.99) {
      CHECK(ok0);
      CHECK(ok1);
      if (ok0 && ok1) ++found_all;
    }
    for (const auto& found : sol.points) {
      CHECK(found.residual <= 1e-9 * 10.0);
    }
  }
  CHECK(found_all >= 30);
}

TEST_CASE("preconditions") {
  Box2 box{0.0, 1.0, -1.0, 1.0};
  CHECK_THROWS(solve_bivariate(Polynomial(2), W(), box));
  CHECK_THROWS(solve_bivariate(W(), Polynomial(2), box));
}
