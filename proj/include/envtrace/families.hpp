#pragma once

#include <cstdint>

#include "envtrace/landscape.hpp"

namespace envtrace {

// Random single-piece polynomial landscape over [0,1] x [-1,1]: one region,
// no boundaries, piece of exactly the requested total degree (the pure
// w^degree coefficient is forced nonzero so the degree never collapses).
// Same seed, same landscape.
Landscape random_single_piece(int piece_degree, std::uint64_t seed);

// Random piecewise-constant landscape over [0,1] x [-1,1]: up to max_regions
// regions built from pairwise-disjoint interior disks plus at most one slab
// at each alpha end, all over a catch-all background. Every region is
// connected by construction, so the envelope has at most two jump points per
// region. Requires 2 <= max_regions <= 8.
Landscape random_constant_regions(int max_regions, std::uint64_t seed);

// The synthetic family the generalization-rate experiment runs on: degree-3
// single-piece landscapes whose envelope maxima move from instance to
// instance. Kept separate from random_single_piece so the experiment's
// coefficient distribution can be shaped without touching the conformance
// suites.
Landscape gap_family_instance(std::uint64_t seed);

}  // namespace envtrace
