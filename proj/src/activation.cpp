#include "envtrace/activation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "envtrace/error.hpp"
#include "envtrace/random.hpp"

#include "json.hpp"

namespace envtrace {

namespace {

// Index of the activation piece valid at input u: the number of breakpoints
// strictly below u. At a breakpoint both neighbors agree, so either works.
template <typename T>
size_t piece_index(const std::vector<Rational>& bps, const T& u) {
  size_t k = 0;
  while (k < bps.size() && bps[k] < u) ++k;
  return k;
}

// piece(scale * w) as a polynomial in (a, w1); Horner in the linear argument.
Polynomial compose_scaled(const Polynomial& piece, const Rational& scale) {
  std::vector<Rational> c = piece.univariate_coeffs(0);
  Polynomial arg(2);
  arg.add_term({0, 1}, scale);  // scale * w1
  Polynomial acc = Polynomial::constant(2, c.empty() ? Rational(0) : c.back());
  for (size_t k = c.size(); k-- > 1;) {
    acc = acc * arg + Polynomial::constant(2, c[k - 1]);
  }
  return acc;
}

}  // namespace

double PiecewiseActivation::eval(double u) const {
  size_t k = 0;
  while (k < breakpoints.size() && to_double(breakpoints[k]) < u) ++k;
  return pieces[k].eval({u});
}

Rational PiecewiseActivation::eval_exact(const Rational& u) const {
  return pieces[piece_index(breakpoints, u)].eval_exact({u});
}

int PiecewiseActivation::max_degree() const {
  int d = 0;
  for (const auto& p : pieces) d = std::max(d, p.total_degree());
  return d;
}

PiecewiseActivation PiecewiseActivation::relu() {
  PiecewiseActivation act;
  act.breakpoints = {Rational(0)};
  act.pieces = {Polynomial::constant(1, Rational(0)),
                Polynomial::parse("a", 1)};
  return act;
}

PiecewiseActivation PiecewiseActivation::identity() {
  PiecewiseActivation act;
  act.pieces = {Polynomial::parse("a", 1)};
  return act;
}

PiecewiseActivation PiecewiseActivation::leaky_relu(const Rational& slope) {
  PiecewiseActivation act;
  act.breakpoints = {Rational(0)};
  Polynomial low(1);
  low.add_term({1}, slope);
  act.pieces = {low, Polynomial::parse("a", 1)};
  return act;
}

void validate_activation_spec(const ActivationSpec& spec) {
  if (spec.data.empty()) fail_input("activation spec: needs data points");
  if (spec.width < 1) fail_input("activation spec: width must be positive");
  if (spec.weight_range.first >= spec.weight_range.second)
    fail_input("activation spec: empty weight range");
  if (spec.alpha_range.first >= spec.alpha_range.second)
    fail_input("activation spec: empty alpha range");
  for (const PiecewiseActivation* act : {&spec.o1, &spec.o2}) {
    if (act->pieces.size() != act->breakpoints.size() + 1)
      fail_input("activation spec: pieces must outnumber breakpoints by one");
    for (const auto& p : act->pieces)
      if (p.nvars() != 1)
        fail_input("activation spec: pieces must be univariate");
    for (size_t k = 0; k + 1 < act->breakpoints.size(); ++k)
      if (!(act->breakpoints[k] < act->breakpoints[k + 1]))
        fail_input("activation spec: breakpoints must increase strictly");
    for (size_t k = 0; k < act->breakpoints.size(); ++k) {
      if (act->pieces[k].eval_exact({act->breakpoints[k]}) !=
          act->pieces[k + 1].eval_exact({act->breakpoints[k]}))
        fail_input("activation spec: activation discontinuous at breakpoint");
    }
  }
}

double activation_loss(const ActivationSpec& spec, double alpha,
                       const std::vector<double>& w) {
  double total = 0.0;
  for (const auto& [xr, yr] : spec.data) {
    double x = to_double(xr), y = to_double(yr);
    double g = 0.0;
    for (double wj : w) {
      double u = wj * x;
      g += alpha * spec.o1.eval(u) + (1.0 - alpha) * spec.o2.eval(u);
    }
    g /= static_cast<double>(w.size());
    total += (g - y) * (g - y);
  }
  return total / static_cast<double>(spec.data.size());
}

Rational activation_offset(const ActivationSpec& spec) {
  validate_activation_spec(spec);
  const double alo = to_double(spec.alpha_range.first);
  const double ahi = to_double(spec.alpha_range.second);
  const double wlo = to_double(spec.weight_range.first);
  const double whi = to_double(spec.weight_range.second);
  double worst = 0.0;
  std::vector<double> w(static_cast<size_t>(spec.width));
  const int G = 33;
  // Coarse probe over alpha and one shared weight value; per-unit extremes
  // are covered because every unit ranges over the same box.
  for (int i = 0; i < G; ++i) {
    double alpha = alo + (ahi - alo) * i / (G - 1);
    for (int j = 0; j < G; ++j) {
      std::fill(w.begin(), w.end(), wlo + (whi - wlo) * j / (G - 1));
      worst = std::max(worst, activation_loss(spec, alpha, w));
      for (double& wj : w) wj = -wj;
      worst = std::max(worst, activation_loss(spec, alpha, w));
    }
  }
  return Rational(1) + Rational(static_cast<long long>(std::ceil(worst)));
}

std::function<double(double, const std::vector<double>&)> activation_objective(
    const ActivationSpec& spec) {
  double H = to_double(activation_offset(spec));
  ActivationSpec copy = spec;
  return [H, copy](double alpha, const std::vector<double>& w) {
    return H - activation_loss(copy, alpha, w);
  };
}

DomainBox activation_domain(const ActivationSpec& spec) {
  DomainBox dom;
  dom.alpha_lo = spec.alpha_range.first;
  dom.alpha_hi = spec.alpha_range.second;
  dom.w_ranges.assign(static_cast<size_t>(spec.width), spec.weight_range);
  return dom;
}

Landscape build_activation_landscape(const ActivationSpec& spec) {
  validate_activation_spec(spec);
  if (spec.width != 1)
    fail_input(
        "build_activation_landscape: exact construction needs width 1; use "
        "activation_objective for wider nets");
  const Rational wlo = spec.weight_range.first;
  const Rational whi = spec.weight_range.second;

  // Critical weights: x_t * w = theta for each data point and breakpoint.
  std::vector<Rational> cuts;
  std::vector<Rational> thetas;
  for (const PiecewiseActivation* act : {&spec.o1, &spec.o2})
    for (const Rational& th : act->breakpoints) thetas.push_back(th);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  for (const auto& [xr, yr] : spec.data) {
    (void)yr;
    if (xr == 0) continue;
    for (const Rational& th : thetas) {
      Rational c = th / xr;
      if (wlo < c && c < whi) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Landscape l;
  l.domain = activation_domain(spec);
  l.kind = LandscapeKind::polynomial;
  for (const Rational& c : cuts) {
    Polynomial b(2);
    b.add_term({0, 1}, Rational(1));
    b.add_term({0, 0}, -c);
    l.boundaries.push_back(std::move(b));  // w1 - c
  }

  const Rational H = activation_offset(spec);
  const Rational T(static_cast<long long>(spec.data.size()));

  for (size_t i = 0; i <= cuts.size(); ++i) {
    const Rational lo = i == 0 ? wlo : cuts[i - 1];
    const Rational hi = i == cuts.size() ? whi : cuts[i];
    const Rational mid = (lo + hi) / 2;

    Polynomial loss(2);
    for (const auto& [xr, yr] : spec.data) {
      const Rational u_mid = xr * mid;
      const Polynomial& p1 =
          spec.o1.pieces[piece_index(spec.o1.breakpoints, u_mid)];
      const Polynomial& p2 =
          spec.o2.pieces[piece_index(spec.o2.breakpoints, u_mid)];
      Polynomial A = compose_scaled(p1, xr);
      Polynomial B = compose_scaled(p2, xr);
      // g = B + a*(A - B); e = g - y
      Polynomial alpha_poly(2);
      alpha_poly.add_term({1, 0}, Rational(1));
      Polynomial e = B + alpha_poly * (A - B) -
                     Polynomial::constant(2, yr);
      loss = loss + e * e;
    }
    loss = loss.scaled(Rational(1) / T);

    Region r;
    r.piece = Polynomial::constant(2, H) - loss;
    for (size_t b = 0; b < cuts.size(); ++b)
      r.signs.push_back(cuts[b] <= lo ? BoundarySign::ge : BoundarySign::le);
    l.regions.push_back(std::move(r));
  }

  for (const Region& r : l.regions)
    l.piece_degree = std::max(l.piece_degree, r.piece.total_degree());
  l.boundary_degree = l.boundaries.empty() ? 0 : 1;
  return l;
}

ActivationSpec load_activation_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail_input(std::string("activation spec: parse error: ") + e.what());
  }
  auto read_rational = [](const nlohmann::json& v) {
    if (!v.is_string()) fail_input("activation spec: rationals are strings");
    return parse_rational(v.get<std::string>());
  };
  auto read_activation = [&](const nlohmann::json& v) {
    PiecewiseActivation act;
    if (!v.is_object() || !v.contains("pieces"))
      fail_input("activation spec: activation needs a pieces array");
    if (v.contains("breakpoints"))
      for (const auto& b : v["breakpoints"])
        act.breakpoints.push_back(read_rational(b));
    for (const auto& p : v["pieces"])
      act.pieces.push_back(Polynomial::parse(p.get<std::string>(), 1));
    return act;
  };
  ActivationSpec spec;
  if (!j.contains("o1") || !j.contains("o2") || !j.contains("data"))
    fail_input("activation spec: needs o1, o2, data");
  spec.o1 = read_activation(j["o1"]);
  spec.o2 = read_activation(j["o2"]);
  if (j.contains("width")) spec.width = j["width"].get<int>();
  for (const auto& row : j["data"]) {
    if (!row.is_array() || row.size() != 2)
      fail_input("activation spec: data rows are [x, y] pairs");
    spec.data.emplace_back(read_rational(row[0]), read_rational(row[1]));
  }
  if (j.contains("weight_range"))
    spec.weight_range = {read_rational(j["weight_range"][0]),
                         read_rational(j["weight_range"][1])};
  if (j.contains("alpha_range"))
    spec.alpha_range = {read_rational(j["alpha_range"][0]),
                        read_rational(j["alpha_range"][1])};
  validate_activation_spec(spec);
  return spec;
}

std::string activation_spec_json(const ActivationSpec& spec) {
  nlohmann::json j;
  auto write_activation = [](const PiecewiseActivation& act) {
    nlohmann::json v;
    v["breakpoints"] = nlohmann::json::array();
    for (const auto& b : act.breakpoints)
      v["breakpoints"].push_back(rational_to_string(b));
    v["pieces"] = nlohmann::json::array();
    for (const auto& p : act.pieces) v["pieces"].push_back(p.to_string());
    return v;
  };
  j["o1"] = write_activation(spec.o1);
  j["o2"] = write_activation(spec.o2);
  j["width"] = spec.width;
  j["data"] = nlohmann::json::array();
  for (const auto& [x, y] : spec.data)
    j["data"].push_back({rational_to_string(x), rational_to_string(y)});
  j["weight_range"] = {rational_to_string(spec.weight_range.first),
                       rational_to_string(spec.weight_range.second)};
  j["alpha_range"] = {rational_to_string(spec.alpha_range.first),
                      rational_to_string(spec.alpha_range.second)};
  return j.dump(2);
}

ActivationSpec gen_activation_spec(std::uint64_t seed) {
  Rng rng(seed);
  ActivationSpec spec;
  switch (rng.next_int(0, 2)) {
    case 0:
      spec.o1 = PiecewiseActivation::relu();
      spec.o2 = PiecewiseActivation::identity();
      break;
    case 1:
      spec.o1 = PiecewiseActivation::leaky_relu(Rational(1, 4));
      spec.o2 = PiecewiseActivation::identity();
      break;
    default:
      spec.o1 = PiecewiseActivation::relu();
      spec.o2 = PiecewiseActivation::leaky_relu(Rational(1, 2));
      break;
  }
  int t = rng.next_int(2, 6);
  for (int i = 0; i < t; ++i) {
    // Nonzero dyadic inputs so every breakpoint theta / x_t is finite.
    int xnum = rng.next_int(1, 24) * (rng.next_int(0, 1) ? 1 : -1);
    Rational x(xnum, 16);
    Rational y(rng.next_int(-24, 24), 16);
    spec.data.emplace_back(x, y);
  }
  validate_activation_spec(spec);
  return spec;
}

}  // namespace envtrace
