#include "envtrace/families.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "envtrace/error.hpp"
#include "envtrace/random.hpp"

namespace envtrace {

namespace {

DomainBox unit_box() {
  DomainBox box;
  box.alpha_lo = Rational(0);
  box.alpha_hi = Rational(1);
  box.w_ranges = {{Rational(-1), Rational(1)}};
  return box;
}

// Dyadic rational close to x, keeping file round-trips and exact arithmetic
// cheap (denominator 2^bits).
Rational dyadic(double x, int bits = 10) {
  double scaled = std::round(x * std::ldexp(1.0, bits));
  return Rational(static_cast<long long>(scaled),
                  static_cast<long long>(1) << bits);
}

}  // namespace

Landscape random_single_piece(int piece_degree, std::uint64_t seed) {
  if (piece_degree < 1) fail_input("piece degree must be >= 1");
  Rng rng(seed);
  Landscape l;
  l.domain = unit_box();
  l.kind = LandscapeKind::polynomial;

  Polynomial piece(2);
  for (int i = 0; i <= piece_degree; ++i) {
    for (int j = 0; i + j <= piece_degree; ++j) {
      bool top_w_term = (i == 0 && j == piece_degree);
      // keep the pieces moderately sparse so different seeds explore
      // different envelope shapes
      if (!top_w_term && rng.next_u01() < 0.3) continue;
      Rational c = rng.next_small_rational(8, 4);
      if (top_w_term) {
        while (c == 0) c = rng.next_small_rational(8, 4);
      }
      if (c == 0) continue;
      piece.add_term({static_cast<unsigned>(i), static_cast<unsigned>(j)}, c);
    }
  }
  l.regions.push_back(Region{{}, std::move(piece)});
  validate_landscape(&l);
  return l;
}

Landscape random_constant_regions(int max_regions, std::uint64_t seed) {
  if (max_regions < 2 || max_regions > 8) {
    fail_input("max_regions must be in [2, 8]");
  }
  Rng rng(seed);
  Landscape l;
  l.domain = unit_box();
  l.kind = LandscapeKind::constant;

  // budget: catch-all + slabs + disks <= max_regions
  int slabs = rng.next_int(0, std::min(2, max_regions - 2));
  int disks = rng.next_int(0, max_regions - 1 - slabs);
  if (slabs + disks == 0) disks = 1;

  // slab cut positions keep a clear central band for the disks
  double slab_left = slabs >= 1 ? rng.next_range(0.08, 0.2) : 0.0;
  double slab_right = slabs >= 2 ? rng.next_range(0.8, 0.92) : 1.0;

  auto fresh_value = [&rng, used = std::vector<Rational>{}]() mutable {
    for (;;) {
      Rational v(rng.next_int(0, 16), 16);
      bool seen = false;
      for (const Rational& u : used) {
        if (u == v) seen = true;
      }
      if (!seen) {
        used.push_back(v);
        return v;
      }
    }
  };

  // disks: centers and radii rejection-sampled until pairwise disjoint and
  // strictly inside the central band, so every region stays connected and the
  // background stays connected around them
  std::vector<std::pair<double, double>> centers;
  std::vector<double> radii;
  for (int k = 0; k < disks; ++k) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      double r = rng.next_range(0.05, 0.18);
      double margin = r + 0.02;
      double clo = slab_left + margin;
      double chi = slab_right - margin;
      if (clo >= chi) continue;
      double ca = rng.next_range(clo, chi);
      double cw = rng.next_range(-1.0 + margin, 1.0 - margin);
      bool clear = true;
      for (std::size_t other = 0; other < centers.size(); ++other) {
        double da = ca - centers[other].first;
        double dw = cw - centers[other].second;
        double need = r + radii[other] + 0.02;
        if (da * da + dw * dw < need * need) clear = false;
      }
      if (!clear) continue;
      centers.emplace_back(ca, cw);
      radii.push_back(r);
      break;
    }
  }
  disks = static_cast<int>(centers.size());

  // boundary list: one circle per disk, then the slab lines
  for (int k = 0; k < disks; ++k) {
    Rational ca = dyadic(centers[static_cast<std::size_t>(k)].first);
    Rational cw = dyadic(centers[static_cast<std::size_t>(k)].second);
    Rational r = dyadic(radii[static_cast<std::size_t>(k)]);
    // (a - ca)^2 + (w - cw)^2 - r^2
    Polynomial circle(2);
    circle.add_term({2, 0}, Rational(1));
    circle.add_term({1, 0}, Rational(-2) * ca);
    circle.add_term({0, 2}, Rational(1));
    circle.add_term({0, 1}, Rational(-2) * cw);
    circle.add_term({0, 0}, ca * ca + cw * cw - r * r);
    l.boundaries.push_back(std::move(circle));
  }
  if (slabs >= 1) {
    Polynomial line(2);  // a - slab_left
    line.add_term({1, 0}, Rational(1));
    line.add_term({0, 0}, -dyadic(slab_left));
    l.boundaries.push_back(std::move(line));
  }
  if (slabs >= 2) {
    Polynomial line(2);  // a - slab_right
    line.add_term({1, 0}, Rational(1));
    line.add_term({0, 0}, -dyadic(slab_right));
    l.boundaries.push_back(std::move(line));
  }

  const std::size_t m = l.boundaries.size();
  auto free_signs = [m]() {
    return std::vector<BoundarySign>(m, BoundarySign::free);
  };
  for (int k = 0; k < disks; ++k) {
    Region region;
    region.signs = free_signs();
    region.signs[static_cast<std::size_t>(k)] = BoundarySign::le;
    region.piece = Polynomial::constant(2, fresh_value());
    l.regions.push_back(std::move(region));
  }
  if (slabs >= 1) {
    Region region;
    region.signs = free_signs();
    region.signs[static_cast<std::size_t>(disks)] = BoundarySign::le;
    region.piece = Polynomial::constant(2, fresh_value());
    l.regions.push_back(std::move(region));
  }
  if (slabs >= 2) {
    Region region;
    region.signs = free_signs();
    region.signs[static_cast<std::size_t>(disks) + 1] = BoundarySign::ge;
    region.piece = Polynomial::constant(2, fresh_value());
    l.regions.push_back(std::move(region));
  }
  Region background;
  background.signs = free_signs();
  background.piece = Polynomial::constant(2, fresh_value());
  l.regions.push_back(std::move(background));

  validate_landscape(&l);
  return l;
}

Landscape gap_family_instance(std::uint64_t seed) {
  Rng rng(seed);
  Landscape l;
  l.domain = unit_box();
  l.kind = LandscapeKind::polynomial;

  // Cubic-in-w pieces whose critical points and edge values trade places at
  // instance-dependent alpha, so per-instance envelopes carry kinks at
  // varying locations and the empirical argmax genuinely wanders with the
  // sample. Coefficients are dyadic for exact file round-trips.
  Polynomial piece(2);
  auto coeff = [&rng](double lo, double hi) {
    return dyadic(lo + (hi - lo) * rng.next_u01());
  };
  piece.add_term({0, 3}, coeff(-0.5, -0.2));  // concave-right cubic term
  piece.add_term({1, 1}, coeff(0.4, 1.2));    // alpha-controlled tilt
  piece.add_term({0, 1}, coeff(-0.6, 0.6));
  piece.add_term({0, 2}, coeff(-0.4, 0.4));
  piece.add_term({1, 0}, coeff(-0.5, 0.5));
  piece.add_term({2, 0}, coeff(-0.5, 0.1));
  l.regions.push_back(Region{{}, std::move(piece)});
  validate_landscape(&l);
  return l;
}

}  // namespace envtrace
