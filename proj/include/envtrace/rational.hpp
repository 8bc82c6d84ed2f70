#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace envtrace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline int sign_of(const Rational& r) { return r.sign(); }

// Parses "num" or "num/den" with optional leading sign. Decimal points and
// exponents are rejected: landscape files carry exact rationals only.
Rational parse_rational(const std::string& text);

// Canonical form: "num" when the denominator is 1, else "num/den".
std::string rational_to_string(const Rational& r);

Rational rational_pow(const Rational& base, unsigned exp);

// gcd of two rationals: gcd of numerators over lcm of denominators; used to
// normalize polynomial contents so gcds are unique up to sign.
Rational rational_gcd(const Rational& a, const Rational& b);

}  // namespace envtrace
