#include "envtrace/polynomial.hpp"

#include "envtrace/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace envtrace {

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
  if (nvars < 1) fail_input("polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_[Monomial(nvars, 0u)] = c;
  return p;
}

Polynomial Polynomial::variable(int nvars, int var) {
  if (var < 0 || var >= nvars) fail_input("variable index out of range");
  Polynomial p(nvars);
  Monomial m(nvars, 0u);
  m[var] = 1;
  p.terms_[m] = 1;
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first == Monomial(nvars_, 0u));
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) fail_input("polynomial is not constant");
  return terms_.begin()->second;
}

int Polynomial::total_degree() const {
  int deg = -1;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (unsigned e : m) s += static_cast<int>(e);
    deg = std::max(deg, s);
  }
  return deg;
}

int Polynomial::degree_in(int var) const {
  int deg = -1;
  for (const auto& [m, c] : terms_) {
    deg = std::max(deg, static_cast<int>(m[var]));
  }
  return deg;
}

Rational Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != nvars_) {
    fail_input("monomial arity mismatch");
  }
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (c != 0) terms_[m] = c;
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (nvars_ != o.nvars_) fail_input("polynomial arity mismatch");
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (nvars_ != o.nvars_) fail_input("polynomial arity mismatch");
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (nvars_ != o.nvars_) fail_input("polynomial arity mismatch");
  Polynomial r(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(nvars_);
      for (int v = 0; v < nvars_; ++v) m[v] = ma[v] + mb[v];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::operator-() const { return scaled(Rational(-1)); }

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(nvars_);
  if (c == 0) return r;
  for (const auto& [m, cc] : terms_) r.terms_[m] = cc * c;
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = Polynomial::constant(nvars_, Rational(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    base = base * base;
    k >>= 1u;
  }
  return result;
}

bool Polynomial::operator==(const Polynomial& o) const {
  return nvars_ == o.nvars_ && terms_ == o.terms_;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    fail_input("evaluation point arity mismatch");
  }
  Rational sum(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int v = 0; v < nvars_; ++v) {
      if (m[v] > 0) t *= rational_pow(point[v], m[v]);
    }
    sum += t;
  }
  return sum;
}

double Polynomial::eval(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    fail_input("evaluation point arity mismatch");
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = to_double(c);
    for (int v = 0; v < nvars_; ++v) {
      for (unsigned e = 0; e < m[v]; ++e) t *= point[v];
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::partial(int var) const {
  if (var < 0 || var >= nvars_) fail_input("variable index out of range");
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    r.add_term(d, c * Rational(m[var]));
  }
  return r;
}

Polynomial Polynomial::substituted(int var, const Rational& value) const {
  if (var < 0 || var >= nvars_) fail_input("variable index out of range");
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    Monomial d = m;
    d[var] = 0;
    r.add_term(d, c * rational_pow(value, m[var]));
  }
  return r;
}

std::vector<Polynomial> Polynomial::coeffs_in(int var) const {
  int deg = degree_in(var);
  std::vector<Polynomial> out(static_cast<std::size_t>(std::max(deg, 0)) + 1,
                              Polynomial(nvars_));
  for (const auto& [m, c] : terms_) {
    Monomial d = m;
    unsigned k = d[var];
    d[var] = 0;
    out[k].add_term(d, c);
  }
  return out;
}

bool Polynomial::effective_univariate(int* var, int fallback) const {
  int found = -1;
  for (const auto& [m, c] : terms_) {
    for (int v = 0; v < nvars_; ++v) {
      if (m[v] == 0) continue;
      if (found == -1) {
        found = v;
      } else if (found != v) {
        return false;
      }
    }
  }
  *var = found == -1 ? fallback : found;
  return true;
}

std::vector<Rational> Polynomial::univariate_coeffs(int var) const {
  int check = -1;
  if (!effective_univariate(&check, var) || (check != var && check != -1)) {
    fail_input("polynomial is not univariate in the requested variable");
  }
  int deg = degree_in(var);
  std::vector<Rational> out(static_cast<std::size_t>(std::max(deg, 0)) + 1,
                            Rational(0));
  for (const auto& [m, c] : terms_) out[m[var]] = c;
  return out;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t i = 0;
  int nvars;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& why) {
    fail_input("polynomial parse error at position " + std::to_string(i) +
               ": " + why + " in '" + s + "'");
  }

  BigInt read_uint() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected digits");
    if (i < s.size() && (s[i] == '.' || s[i] == 'e' || s[i] == 'E')) {
      fail("floating-point literals are not allowed");
    }
    return BigInt(s.substr(start, i - start));
  }

  Rational read_coeff() {
    BigInt num = read_uint();
    skip_ws();
    if (peek() == '/') {
      ++i;
      BigInt den = read_uint();
      if (den == 0) fail("zero denominator");
      return Rational(num, den);
    }
    return Rational(num);
  }

  // var ::= 'a' | 'w' | 'w' digits
  int read_var() {
    skip_ws();
    char c = s[i];
    if (c == 'a') {
      ++i;
      return 0;
    }
    if (c == 'w') {
      ++i;
      std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
      }
      int idx = 1;
      if (i > start) idx = std::stoi(s.substr(start, i - start));
      if (idx < 1 || idx >= nvars) fail("variable index out of range");
      return idx;
    }
    fail("expected variable 'a' or 'w<k>'");
  }

  // term ::= [coeff] {'*' factor} | factor {'*' factor}
  void read_term(Polynomial* into, int sign) {
    Rational coeff(1);
    Monomial m(static_cast<std::size_t>(nvars), 0u);
    bool saw_anything = false;
    skip_ws();
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      coeff = read_coeff();
      saw_anything = true;
      skip_ws();
      if (peek() == '*') ++i;
    }
    while (true) {
      skip_ws();
      if (i >= s.size()) break;
      char c = s[i];
      if (c == 'a' || c == 'w') {
        int var = read_var();
        unsigned exp = 1;
        skip_ws();
        if (peek() == '^') {
          ++i;
          BigInt e = read_uint();
          if (e > 64) fail("exponent too large");
          exp = e.convert_to<unsigned>();
        }
        m[var] += exp;
        saw_anything = true;
        skip_ws();
        if (peek() == '*') {
          ++i;
          continue;
        }
        continue;
      }
      break;
    }
    if (!saw_anything) fail("empty term");
    into->add_term(m, sign < 0 ? Rational(-coeff) : coeff);
  }
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int nvars) {
  Polynomial p(nvars);
  Parser ps{text, 0, nvars};
  int sign = 1;
  if (ps.peek() == '-') {
    sign = -1;
    ++ps.i;
  } else if (ps.peek() == '+') {
    ++ps.i;
  }
  if (ps.eof()) ps.fail("empty polynomial");
  while (true) {
    ps.read_term(&p, sign);
    if (ps.eof()) break;
    char c = ps.peek();
    if (c == '+') {
      sign = 1;
      ++ps.i;
    } else if (c == '-') {
      sign = -1;
      ++ps.i;
    } else {
      ps.fail("expected '+' or '-' between terms");
    }
  }
  return p;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational a = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) out << "-";
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    bool has_vars = false;
    for (int v = 0; v < nvars_; ++v) has_vars = has_vars || m[v] > 0;
    bool coeff_printed = false;
    if (!has_vars || a != 1) {
      out << rational_to_string(a);
      coeff_printed = true;
    }
    for (int v = 0; v < nvars_; ++v) {
      if (m[v] == 0) continue;
      if (coeff_printed) out << "*";
      coeff_printed = true;
      if (v == 0) {
        out << "a";
      } else {
        out << "w" << v;
      }
      if (m[v] > 1) out << "^" << m[v];
    }
  }
  return out.str();
}

}  // namespace envtrace
