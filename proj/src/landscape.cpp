#include "envtrace/landscape.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "envtrace/error.hpp"
#include "envtrace/random.hpp"

namespace envtrace {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Upper bound on |p| over the box from coefficient magnitudes; multiplied by
// a small factor it gives a roundoff-proof slack for "on the boundary" tests.
double magnitude_bound(const Polynomial& p, const DomainBox& box) {
  double radius = 1.0;
  radius = std::max(radius, std::abs(to_double(box.alpha_lo)));
  radius = std::max(radius, std::abs(to_double(box.alpha_hi)));
  for (const auto& [lo, hi] : box.w_ranges) {
    radius = std::max(radius, std::abs(to_double(lo)));
    radius = std::max(radius, std::abs(to_double(hi)));
  }
  double bound = 0.0;
  for (const auto& [mono, coeff] : p.terms()) {
    unsigned deg = 0;
    for (unsigned e : mono) deg += e;
    bound += std::abs(to_double(coeff)) * std::pow(radius, deg);
  }
  return bound;
}

// Terms with double coefficients, for the many-point coverage probe where
// exact coefficients would be needlessly slow.
struct ApproxPoly {
  std::vector<std::pair<Monomial, double>> terms;
  double slack = 0.0;

  double eval(const std::vector<double>& x) const {
    double total = 0.0;
    for (const auto& [mono, coeff] : terms) {
      double t = coeff;
      for (std::size_t v = 0; v < mono.size(); ++v) {
        for (unsigned e = 0; e < mono[v]; ++e) t *= x[v];
      }
      total += t;
    }
    return total;
  }
};

bool region_matches(const Region& region, const std::vector<double>& h,
                    const std::vector<double>& slack) {
  for (std::size_t b = 0; b < region.signs.size(); ++b) {
    switch (region.signs[b]) {
      case BoundarySign::le:
        if (h[b] > slack[b]) return false;
        break;
      case BoundarySign::ge:
        if (h[b] < -slack[b]) return false;
        break;
      case BoundarySign::free:
        break;
    }
  }
  return true;
}

std::string point_to_string(double alpha, const std::vector<double>& w) {
  std::ostringstream out;
  out << "alpha=" << alpha << ", w=(";
  for (std::size_t z = 0; z < w.size(); ++z) {
    if (z > 0) out << ", ";
    out << w[z];
  }
  out << ")";
  return out.str();
}

// Probes the coverage invariant: every box point must satisfy some region's
// sign vector. Exhaustive 101-per-axis grid through d = 2; beyond that the
// grid would explode, so a fixed-seed million-point sample is used instead.
void probe_coverage(const Landscape& l) {
  for (const auto& region : l.regions) {
    bool all_free = true;
    for (BoundarySign s : region.signs) {
      if (s != BoundarySign::free) all_free = false;
    }
    if (all_free) return;  // catch-all region: nothing can fall through
  }

  std::vector<ApproxPoly> bounds;
  bounds.reserve(l.boundaries.size());
  for (const auto& h : l.boundaries) {
    ApproxPoly a;
    for (const auto& [mono, coeff] : h.terms()) {
      a.terms.emplace_back(mono, to_double(coeff));
    }
    a.slack = 1e-9 * std::max(1.0, magnitude_bound(h, l.domain));
    bounds.push_back(std::move(a));
  }
  std::vector<double> slack(bounds.size());
  for (std::size_t b = 0; b < bounds.size(); ++b) slack[b] = bounds[b].slack;

  const int d = l.d();
  std::vector<double> lo(static_cast<std::size_t>(d) + 1);
  std::vector<double> span(static_cast<std::size_t>(d) + 1);
  lo[0] = to_double(l.domain.alpha_lo);
  span[0] = to_double(l.domain.alpha_hi) - lo[0];
  for (int z = 0; z < d; ++z) {
    lo[static_cast<std::size_t>(z) + 1] = to_double(l.domain.w_ranges[static_cast<std::size_t>(z)].first);
    span[static_cast<std::size_t>(z) + 1] =
        to_double(l.domain.w_ranges[static_cast<std::size_t>(z)].second) - lo[static_cast<std::size_t>(z) + 1];
  }

  std::vector<double> x(static_cast<std::size_t>(d) + 1);
  std::vector<double> h(bounds.size());
  auto check_point = [&]() {
    for (std::size_t b = 0; b < bounds.size(); ++b) h[b] = bounds[b].eval(x);
    for (const auto& region : l.regions) {
      if (region_matches(region, h, slack)) return true;
    }
    return false;
  };

  if (d <= 2) {
    const int steps = 101;
    std::vector<int> idx(static_cast<std::size_t>(d) + 1, 0);
    while (true) {
      for (int v = 0; v <= d; ++v) {
        x[static_cast<std::size_t>(v)] =
            lo[static_cast<std::size_t>(v)] +
            span[static_cast<std::size_t>(v)] * idx[static_cast<std::size_t>(v)] / (steps - 1);
      }
      if (!check_point()) {
        fail_input("regions: coverage check failed at " +
                   point_to_string(x[0], {x.begin() + 1, x.end()}) +
                   ": no region matches");
      }
      int v = d;
      while (v >= 0 && ++idx[static_cast<std::size_t>(v)] == steps) {
        idx[static_cast<std::size_t>(v)] = 0;
        --v;
      }
      if (v < 0) break;
    }
  } else {
    Rng rng(0x636f766572u);  // fixed seed: probe must be deterministic
    for (int trial = 0; trial < 1'000'000; ++trial) {
      for (int v = 0; v <= d; ++v) {
        x[static_cast<std::size_t>(v)] =
            lo[static_cast<std::size_t>(v)] + span[static_cast<std::size_t>(v)] * rng.next_u01();
      }
      if (!check_point()) {
        fail_input("regions: coverage check failed at " +
                   point_to_string(x[0], {x.begin() + 1, x.end()}) +
                   ": no region matches");
      }
    }
  }
}

void recompute_degrees(Landscape* l) {
  int dp = 0;
  for (const auto& region : l->regions) {
    dp = std::max(dp, region.piece.total_degree());
  }
  int db = 0;
  for (const auto& h : l->boundaries) db = std::max(db, h.total_degree());
  l->piece_degree = dp;
  l->boundary_degree = db;
}

// --- JSON helpers -----------------------------------------------------------

const json& require_field(const json& j, const char* key,
                          const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail_input(path + "." + key + ": missing field");
  return *it;
}

void reject_unknown_fields(const json& j, std::initializer_list<const char*> known,
                           const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) ok = true;
    }
    if (!ok) fail_input(path + "." + it.key() + ": unexpected field");
  }
}

Rational rational_field(const json& j, const std::string& path) {
  if (!j.is_string()) {
    fail_input(path + ": numbers must be rational strings like \"1/2\" (no floats)");
  }
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail_input(path + ": " + e.what());
  }
}

Polynomial polynomial_field(const json& j, int nvars, const std::string& path) {
  if (!j.is_string()) fail_input(path + ": must be a polynomial string");
  try {
    return Polynomial::parse(j.get<std::string>(), nvars);
  } catch (const Error& e) {
    fail_input(path + ": " + e.what());
  }
}

std::pair<Rational, Rational> interval_field(const json& j,
                                             const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    fail_input(path + ": must be [lo, hi]");
  }
  Rational lo = rational_field(j[0], path + "[0]");
  Rational hi = rational_field(j[1], path + "[1]");
  if (!(lo < hi)) fail_input(path + ": lo < hi required");
  return {lo, hi};
}

}  // namespace

bool DomainBox::contains(double alpha, const std::vector<double>& w) const {
  if (w.size() != w_ranges.size()) return false;
  auto inside = [](double v, const Rational& lo, const Rational& hi) {
    double l = to_double(lo);
    double h = to_double(hi);
    double slack = 1e-12 * std::max(1.0, std::max(std::abs(l), std::abs(h)));
    return v >= l - slack && v <= h + slack;
  };
  if (!inside(alpha, alpha_lo, alpha_hi)) return false;
  for (std::size_t z = 0; z < w_ranges.size(); ++z) {
    if (!inside(w[z], w_ranges[z].first, w_ranges[z].second)) return false;
  }
  return true;
}

void validate_landscape(Landscape* l) {
  if (l->domain.d() < 1) fail_input("domain.w: at least one coordinate required");
  if (!(l->domain.alpha_lo < l->domain.alpha_hi)) {
    fail_input("domain.alpha: lo < hi required");
  }
  for (std::size_t z = 0; z < l->domain.w_ranges.size(); ++z) {
    if (!(l->domain.w_ranges[z].first < l->domain.w_ranges[z].second)) {
      fail_input("domain.w[" + std::to_string(z) + "]: lo < hi required");
    }
  }
  const int nv = l->nvars();
  const std::size_t m = l->boundaries.size();
  for (std::size_t b = 0; b < m; ++b) {
    const Polynomial& h = l->boundaries[b];
    if (h.nvars() != nv) {
      fail_input("boundaries[" + std::to_string(b) + "]: arity mismatch");
    }
    if (h.total_degree() < 1) {
      fail_input("boundaries[" + std::to_string(b) + "]: must be nonconstant");
    }
  }
  if (l->regions.empty()) fail_input("regions: at least one region required");
  for (std::size_t r = 0; r < l->regions.size(); ++r) {
    const Region& region = l->regions[r];
    const std::string path = "regions[" + std::to_string(r) + "]";
    if (region.signs.size() > m) {
      fail_input(path + ".signs: unknown boundary " + std::to_string(m) +
                 " (only " + std::to_string(m) + " boundaries declared)");
    }
    if (region.signs.size() < m) {
      fail_input(path + ".signs: expected one entry per boundary (" +
                 std::to_string(m) + "), got " +
                 std::to_string(region.signs.size()));
    }
    if (region.piece.nvars() != nv) fail_input(path + ".piece: arity mismatch");
    if (l->kind == LandscapeKind::constant && region.piece.total_degree() > 0) {
      fail_input(path + ".piece: constant-kind pieces must be rational constants");
    }
  }
  recompute_degrees(l);
  probe_coverage(*l);
}

Landscape load_landscape(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail_input(std::string("landscape JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) fail_input("landscape document must be a JSON object");
  reject_unknown_fields(doc, {"version", "domain", "kind", "boundaries", "regions"},
                        "document");

  const json& version = require_field(doc, "version", "document");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    fail_input("version: must be the integer 1");
  }

  Landscape l;
  const json& domain = require_field(doc, "domain", "document");
  if (!domain.is_object()) fail_input("domain: must be an object");
  reject_unknown_fields(domain, {"alpha", "w"}, "domain");
  std::tie(l.domain.alpha_lo, l.domain.alpha_hi) =
      interval_field(require_field(domain, "alpha", "domain"), "domain.alpha");
  const json& w = require_field(domain, "w", "domain");
  if (!w.is_array() || w.empty()) {
    fail_input("domain.w: must be a nonempty array of [lo, hi] intervals");
  }
  for (std::size_t z = 0; z < w.size(); ++z) {
    l.domain.w_ranges.push_back(
        interval_field(w[z], "domain.w[" + std::to_string(z) + "]"));
  }

  const json& kind = require_field(doc, "kind", "document");
  if (kind == "polynomial") {
    l.kind = LandscapeKind::polynomial;
  } else if (kind == "constant") {
    l.kind = LandscapeKind::constant;
  } else {
    fail_input("kind: must be \"polynomial\" or \"constant\"");
  }

  const int nv = l.nvars();
  const json& boundaries = require_field(doc, "boundaries", "document");
  if (!boundaries.is_array()) fail_input("boundaries: must be an array");
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    l.boundaries.push_back(polynomial_field(
        boundaries[b], nv, "boundaries[" + std::to_string(b) + "]"));
  }

  const json& regions = require_field(doc, "regions", "document");
  if (!regions.is_array() || regions.empty()) {
    fail_input("regions: must be a nonempty array");
  }
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const std::string path = "regions[" + std::to_string(r) + "]";
    const json& jr = regions[r];
    if (!jr.is_object()) fail_input(path + ": must be an object");
    reject_unknown_fields(jr, {"signs", "piece"}, path);
    Region region;
    const json& signs = require_field(jr, "signs", path);
    if (!signs.is_array()) fail_input(path + ".signs: must be an array");
    for (std::size_t b = 0; b < signs.size(); ++b) {
      const json& s = signs[b];
      if (s == "le") {
        region.signs.push_back(BoundarySign::le);
      } else if (s == "ge") {
        region.signs.push_back(BoundarySign::ge);
      } else if (s == "free") {
        region.signs.push_back(BoundarySign::free);
      } else {
        fail_input(path + ".signs[" + std::to_string(b) +
                   "]: must be \"le\", \"ge\", or \"free\"");
      }
    }
    const json& piece = require_field(jr, "piece", path);
    if (l.kind == LandscapeKind::constant) {
      if (!piece.is_string()) {
        fail_input(path + ".piece: must be a rational string");
      }
      try {
        region.piece = Polynomial::constant(nv, parse_rational(piece.get<std::string>()));
      } catch (const Error&) {
        fail_input(path + ".piece: constant-kind pieces must be rational constants (got '" +
                   piece.get<std::string>() + "')");
      }
    } else {
      region.piece = polynomial_field(piece, nv, path + ".piece");
    }
    l.regions.push_back(std::move(region));
  }

  validate_landscape(&l);
  return l;
}

Landscape load_landscape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open landscape file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_landscape(buffer.str());
}

std::string save_landscape(const Landscape& l) {
  ordered_json doc;
  doc["version"] = 1;
  doc["domain"]["alpha"] = {rational_to_string(l.domain.alpha_lo),
                            rational_to_string(l.domain.alpha_hi)};
  ordered_json w = ordered_json::array();
  for (const auto& [lo, hi] : l.domain.w_ranges) {
    w.push_back({rational_to_string(lo), rational_to_string(hi)});
  }
  doc["domain"]["w"] = std::move(w);
  doc["kind"] = l.kind == LandscapeKind::polynomial ? "polynomial" : "constant";
  ordered_json boundaries = ordered_json::array();
  for (const auto& h : l.boundaries) boundaries.push_back(h.to_string());
  doc["boundaries"] = std::move(boundaries);
  ordered_json regions = ordered_json::array();
  for (const auto& region : l.regions) {
    ordered_json jr;
    ordered_json signs = ordered_json::array();
    for (BoundarySign s : region.signs) {
      signs.push_back(s == BoundarySign::le   ? "le"
                      : s == BoundarySign::ge ? "ge"
                                              : "free");
    }
    jr["signs"] = std::move(signs);
    jr["piece"] = l.kind == LandscapeKind::constant
                      ? rational_to_string(region.piece.constant_value())
                      : region.piece.to_string();
    regions.push_back(std::move(jr));
  }
  doc["regions"] = std::move(regions);
  return doc.dump(2) + "\n";
}

void save_landscape_file(const Landscape& l, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_input("cannot open output file: " + path);
  out << save_landscape(l);
  if (!out) fail_input("failed writing landscape file: " + path);
}

int region_at(const Landscape& l, double alpha, const std::vector<double>& w,
              double slack) {
  std::vector<double> x;
  x.reserve(w.size() + 1);
  x.push_back(alpha);
  x.insert(x.end(), w.begin(), w.end());
  std::vector<double> h(l.boundaries.size());
  std::vector<double> tol(l.boundaries.size(), 0.0);
  for (std::size_t b = 0; b < l.boundaries.size(); ++b) {
    h[b] = l.boundaries[b].eval(x);
    if (slack > 0.0) {
      tol[b] = slack * std::max(1.0, magnitude_bound(l.boundaries[b], l.domain));
    }
  }
  for (std::size_t r = 0; r < l.regions.size(); ++r) {
    if (region_matches(l.regions[r], h, tol)) return static_cast<int>(r);
  }
  return -1;
}

double evaluate_landscape(const Landscape& l, double alpha,
                          const std::vector<double>& w) {
  if (!l.domain.contains(alpha, w)) {
    fail_input("point outside the domain box: " + point_to_string(alpha, w));
  }
  int r = region_at(l, alpha, w);
  if (r < 0) r = region_at(l, alpha, w, 1e-9);
  if (r < 0) {
    fail_input("no region covers " + point_to_string(alpha, w));
  }
  std::vector<double> x;
  x.reserve(w.size() + 1);
  x.push_back(alpha);
  x.insert(x.end(), w.begin(), w.end());
  return l.regions[static_cast<std::size_t>(r)].piece.eval(x);
}

Rational evaluate_landscape_exact(const Landscape& l, const Rational& alpha,
                                  const std::vector<Rational>& w) {
  if (w.size() != l.domain.w_ranges.size()) {
    fail_input("w has wrong dimension for this landscape");
  }
  bool inside = alpha >= l.domain.alpha_lo && alpha <= l.domain.alpha_hi;
  for (std::size_t z = 0; z < w.size(); ++z) {
    inside = inside && w[z] >= l.domain.w_ranges[z].first &&
             w[z] <= l.domain.w_ranges[z].second;
  }
  if (!inside) fail_input("point outside the domain box");
  std::vector<Rational> x;
  x.reserve(w.size() + 1);
  x.push_back(alpha);
  x.insert(x.end(), w.begin(), w.end());
  for (const auto& region : l.regions) {
    bool match = true;
    for (std::size_t b = 0; b < region.signs.size(); ++b) {
      if (region.signs[b] == BoundarySign::free) continue;
      int s = sign_of(l.boundaries[b].eval_exact(x));
      if (region.signs[b] == BoundarySign::le ? s > 0 : s < 0) match = false;
    }
    if (match) return region.piece.eval_exact(x);
  }
  fail_input("no region covers the point");
}

PerturbedLandscape perturb_landscape(const Landscape& l, const Rational& tau) {
  if (tau <= 0) fail_input("perturbation size tau must be positive");
  if (l.kind != LandscapeKind::polynomial) {
    fail_input("perturbation applies to polynomial landscapes only");
  }
  Polynomial tilt(l.nvars());
  tilt = tilt + Polynomial::variable(l.nvars(), 0).scaled(tau);
  for (int z = 0; z < l.d(); ++z) {
    tilt = tilt + Polynomial::variable(l.nvars(), z + 1).scaled(tau);
  }
  PerturbedLandscape result;
  result.landscape = l;
  for (auto& region : result.landscape.regions) {
    region.piece = region.piece + tilt;
  }
  recompute_degrees(&result.landscape);

  Rational c(0);
  auto bump = [&c](const Rational& v) {
    Rational a = v < 0 ? Rational(-v) : v;
    if (a > c) c = a;
  };
  bump(l.domain.alpha_lo);
  bump(l.domain.alpha_hi);
  for (const auto& [lo, hi] : l.domain.w_ranges) {
    bump(lo);
    bump(hi);
  }
  c *= Rational(l.d() + 1);
  result.drift_bound = Rational(2) * tau * c;
  return result;
}

Landscape flatness_surrogate(const Landscape& l, const Rational& eta) {
  if (eta <= 0) fail_input("flatness weight eta must be positive");
  if (l.kind != LandscapeKind::polynomial) {
    fail_input("flatness surrogate applies to polynomial landscapes only");
  }
  Landscape result = l;
  for (auto& region : result.regions) {
    Polynomial penalty(l.nvars());
    for (int s = 0; s < l.d(); ++s) {
      Polynomial row = region.piece.partial(s + 1);
      for (int t = 0; t < l.d(); ++t) {
        Polynomial entry = row.partial(t + 1);
        penalty = penalty + entry * entry;
      }
    }
    region.piece = region.piece - penalty.scaled(eta);
  }
  recompute_degrees(&result);
  return result;
}

}  // namespace envtrace
