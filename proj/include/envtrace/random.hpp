#pragma once

#include "envtrace/rational.hpp"

#include <cstdint>

namespace envtrace {

// Deterministic splitmix64 generator. We avoid std::uniform_*_distribution
// because its output is implementation-defined; reproducibility contracts
// here are bit-exact across runs and across serial/parallel execution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_u01();
  }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  // Small exact rational with numerator in [-max_num, max_num] and
  // denominator in [1, max_den]; used by the seeded landscape families.
  Rational next_small_rational(int max_num, int max_den) {
    int num = next_int(-max_num, max_num);
    int den = next_int(1, max_den);
    return Rational(num, den);
  }

  // Stable seed derivation so that (seed, trial, instance) indices map to
  // independent streams regardless of evaluation order.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace envtrace
