#include "envtrace/rational.hpp"

#include "envtrace/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace envtrace {

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) fail_input("empty rational literal");
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos) {
    fail_input("rational literal must be integer or num/den, got '" + text +
               "'");
  }
  auto parse_int = [&](const std::string& part) -> BigInt {
    if (part.empty()) fail_input("malformed rational literal '" + text + "'");
    std::size_t i = (part[0] == '+' || part[0] == '-') ? 1 : 0;
    if (i == part.size()) {
      fail_input("malformed rational literal '" + text + "'");
    }
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) {
        fail_input("malformed rational literal '" + text + "'");
      }
    }
    return BigInt(part);
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s));
  BigInt num = parse_int(s.substr(0, slash));
  BigInt den = parse_int(s.substr(slash + 1));
  if (den == 0) fail_input("zero denominator in '" + text + "'");
  return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational rational_pow(const Rational& base, unsigned exp) {
  Rational result(1);
  Rational b = base;
  while (exp > 0) {
    if (exp & 1u) result *= b;
    b *= b;
    exp >>= 1u;
  }
  return result;
}

Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a == 0) return b < 0 ? Rational(-b) : b;
  if (b == 0) return a < 0 ? Rational(-a) : a;
  BigInt num = boost::multiprecision::gcd(boost::multiprecision::numerator(a),
                                          boost::multiprecision::numerator(b));
  BigInt den =
      boost::multiprecision::lcm(boost::multiprecision::denominator(a),
                                 boost::multiprecision::denominator(b));
  return Rational(num, den);
}

}  // namespace envtrace
