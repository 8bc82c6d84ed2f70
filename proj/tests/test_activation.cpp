#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envtrace/activation.hpp"
#include "envtrace/envelope.hpp"
#include "envtrace/error.hpp"
#include "envtrace/landscape.hpp"
#include "envtrace/pointwise.hpp"
#include "envtrace/random.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace envtrace;

namespace {

// Single data point (1, 1): for any mix of relu and identity the network
// fits it exactly at w = 1, so the best loss is 0 for every alpha.
ActivationSpec perfectly_fittable_spec() {
  ActivationSpec spec;
  spec.o1 = PiecewiseActivation::relu();
  spec.o2 = PiecewiseActivation::identity();
  spec.data = {{Rational(1), Rational(1)}};
  return spec;
}

// Points (1, 1) and (-1, 1) cannot both be fit: pure relu kills one side,
// leaving a best loss of 1/2; pure identity forces w = 0 and loss 1.
ActivationSpec mirrored_pair_spec() {
  ActivationSpec spec;
  spec.o1 = PiecewiseActivation::relu();
  spec.o2 = PiecewiseActivation::identity();
  spec.data = {{Rational(1), Rational(1)}, {Rational(-1), Rational(1)}};
  return spec;
}

}  // namespace

TEST_CASE("piecewise activations evaluate their defining pieces") {
  PiecewiseActivation relu = PiecewiseActivation::relu();
  CHECK(relu.eval(-2.0) == doctest::Approx(0.0));
  CHECK(relu.eval(0.0) == doctest::Approx(0.0));
  CHECK(relu.eval(3.0) == doctest::Approx(3.0));

  PiecewiseActivation leaky = PiecewiseActivation::leaky_relu(Rational(1, 4));
  CHECK(leaky.eval(-2.0) == doctest::Approx(-0.5));
  CHECK(leaky.eval(2.0) == doctest::Approx(2.0));
  CHECK(leaky.eval_exact(Rational(-1, 2)) == Rational(-1, 8));

  PiecewiseActivation id = PiecewiseActivation::identity();
  CHECK(id.breakpoints.empty());
  CHECK(id.eval(-0.75) == doctest::Approx(-0.75));
}

TEST_CASE("spec validation rejects structural mistakes") {
  ActivationSpec empty = perfectly_fittable_spec();
  empty.data.clear();
  CHECK_THROWS_AS(validate_activation_spec(empty), Error);

  ActivationSpec zero_width = perfectly_fittable_spec();
  zero_width.width = 0;
  CHECK_THROWS_AS(validate_activation_spec(zero_width), Error);

  ActivationSpec bad_bp = perfectly_fittable_spec();
  bad_bp.o1.breakpoints = {Rational(1), Rational(0)};
  bad_bp.o1.pieces.push_back(PiecewiseActivation::identity().pieces[0]);
  CHECK_THROWS_AS(validate_activation_spec(bad_bp), Error);
}

TEST_CASE("a perfectly fittable task yields a flat envelope at the offset") {
  ActivationSpec spec = perfectly_fittable_spec();
  Landscape l = build_activation_landscape(spec);
  double offset = to_double(activation_offset(spec));
  EnvelopeProfile p = trace_envelope_1d(l);
  CHECK(p.b1 == 0);
  CHECK(p.breakpoints.empty());
  for (const EnvelopeSample& s : p.samples)
    CHECK(s.value == doctest::Approx(offset).epsilon(1e-12));
}

TEST_CASE("mirrored pair: best loss 1/2 under relu, 1 under identity") {
  ActivationSpec spec = mirrored_pair_spec();
  Landscape l = build_activation_landscape(spec);
  double offset = to_double(activation_offset(spec));
  CHECK(envelope_value(l, 1.0) == doctest::Approx(offset - 0.5).epsilon(1e-9));
  CHECK(envelope_value(l, 0.0) == doctest::Approx(offset - 1.0).epsilon(1e-9));
}

TEST_CASE("structural landscape matches the direct forward pass everywhere") {
  Rng rng(321u);
  for (int trial = 0; trial < 5; ++trial) {
    ActivationSpec spec = gen_activation_spec(rng.next_u64());
    Landscape l = build_activation_landscape(spec);
    double offset = to_double(activation_offset(spec));
    Rng pts(rng.next_u64());
    for (int k = 0; k < 200; ++k) {
      double alpha = pts.next_u01();
      double w = -2.0 + 4.0 * pts.next_u01();
      double structural = evaluate_landscape(l, alpha, {w});
      double direct = offset - activation_loss(spec, alpha, {w});
      CHECK(structural == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("black-box objective agrees with the structural landscape") {
  ActivationSpec spec = mirrored_pair_spec();
  Landscape l = build_activation_landscape(spec);
  auto f = activation_objective(spec);
  Rng pts(9u);
  for (int k = 0; k < 100; ++k) {
    double alpha = pts.next_u01();
    double w = -2.0 + 4.0 * pts.next_u01();
    CHECK(f(alpha, {w}) ==
          doctest::Approx(evaluate_landscape(l, alpha, {w})).epsilon(1e-12));
  }
  DomainBox dom = activation_domain(spec);
  CHECK(to_double(dom.alpha_lo) == doctest::Approx(0.0));
  CHECK(to_double(dom.alpha_hi) == doctest::Approx(1.0));
  REQUIRE(dom.w_ranges.size() == 1);
}

TEST_CASE("spec JSON round-trips exactly") {
  ActivationSpec spec = gen_activation_spec(2026u);
  std::string j1 = activation_spec_json(spec);
  ActivationSpec back = load_activation_spec(j1);
  CHECK(activation_spec_json(back) == j1);
  // and the reloaded spec builds the same landscape
  CHECK(save_landscape(build_activation_landscape(back)) ==
        save_landscape(build_activation_landscape(spec)));
}

TEST_CASE("generated specs are reproducible and valid") {
  for (std::uint64_t seed : {1u, 42u, 77u, 4096u}) {
    ActivationSpec a = gen_activation_spec(seed);
    ActivationSpec b = gen_activation_spec(seed);
    CHECK(activation_spec_json(a) == activation_spec_json(b));
    CHECK_NOTHROW(validate_activation_spec(a));
    CHECK(a.width == 1);
    CHECK(a.data.size() >= 2);
    CHECK(a.data.size() <= 6);
  }
  // different seeds explore different tasks
  CHECK(activation_spec_json(gen_activation_spec(1u)) !=
        activation_spec_json(gen_activation_spec(2u)));
}
