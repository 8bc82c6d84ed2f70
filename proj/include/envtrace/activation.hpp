#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "envtrace/landscape.hpp"
#include "envtrace/polynomial.hpp"
#include "envtrace/rational.hpp"

namespace envtrace {

// A continuous piecewise-polynomial scalar activation. `pieces` holds one
// univariate polynomial per interval (written in the variable `a`, the
// activation input); pieces[k] applies on [breakpoints[k-1], breakpoints[k]]
// with the outer pieces extending to the box edges. Adjacent pieces must
// agree exactly at their shared breakpoint.
struct PiecewiseActivation {
  std::vector<Rational> breakpoints;  // strictly increasing
  std::vector<Polynomial> pieces;     // nvars == 1, size == breakpoints+1

  double eval(double u) const;
  Rational eval_exact(const Rational& u) const;
  int max_degree() const;

  static PiecewiseActivation relu();
  static PiecewiseActivation identity();
  static PiecewiseActivation leaky_relu(const Rational& slope);
};

// Interpolated-activation regression task: the network applies
// sigma = alpha*o1 + (1-alpha)*o2 at every unit. One hidden layer of
// `width` mean-aggregated units, scalar data, squared loss. Utility is
// offset - loss, with the offset chosen so utility stays nonnegative over
// the weight box.
struct ActivationSpec {
  PiecewiseActivation o1, o2;
  int width = 1;  // hidden units; width 1 is the exact-landscape case
  std::vector<std::pair<Rational, Rational>> data;  // (x_t, y_t)
  std::pair<Rational, Rational> weight_range{Rational(-2), Rational(2)};
  std::pair<Rational, Rational> alpha_range{Rational(0), Rational(1)};

  int total_params() const { return width; }
};

// Throws on empty data, non-increasing breakpoints, discontinuous pieces,
// or a non-positive width.
void validate_activation_spec(const ActivationSpec& spec);

// Nonnegativity offset: 1 + the ceiling of the worst probe-grid loss.
Rational activation_offset(const ActivationSpec& spec);

// Direct forward pass: mean over data of (network(x_t) - y_t)^2.
double activation_loss(const ActivationSpec& spec, double alpha,
                       const std::vector<double>& w);

// offset - loss as a black-box objective for the numeric tracer.
std::function<double(double, const std::vector<double>&)> activation_objective(
    const ActivationSpec& spec);

DomainBox activation_domain(const ActivationSpec& spec);

// Exact piecewise-polynomial landscape of offset - loss for width == 1:
// boundaries are the lines x_t * w = theta for activation breakpoints theta,
// and each region's piece composes the active polynomial pieces exactly.
Landscape build_activation_landscape(const ActivationSpec& spec);

ActivationSpec load_activation_spec(const std::string& json_text);
std::string activation_spec_json(const ActivationSpec& spec);

// Seeded random width-1 spec: relu/identity/leaky pair, 2..6 data points
// with small dyadic coordinates. Same seed, same spec.
ActivationSpec gen_activation_spec(std::uint64_t seed);

}  // namespace envtrace
