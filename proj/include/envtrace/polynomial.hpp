#pragma once

#include "envtrace/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace envtrace {

// Exponent tuple, one entry per variable. Variable 0 is always the
// hyperparameter alpha; variables 1..d are the parameters w1..wd.
using Monomial = std::vector<unsigned>;

// Sparse multivariate polynomial with exact rational coefficients.
// Canonical: the term map never stores zero coefficients, so equal
// polynomials have identical term maps.
class Polynomial {
 public:
  explicit Polynomial(int nvars = 1);

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int var);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()

  // Max over terms of the summed exponents; -1 for the zero polynomial.
  int total_degree() const;
  int degree_in(int var) const;

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  Rational coeff(const Monomial& m) const;
  void add_term(const Monomial& m, const Rational& c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(unsigned k) const;
  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Rational eval_exact(const std::vector<Rational>& point) const;
  double eval(const std::vector<double>& point) const;

  // Formal partial derivative with respect to variable `var`.
  Polynomial partial(int var) const;

  // Substitutes an exact value for one variable; the result keeps nvars
  // with exponent 0 in that slot.
  Polynomial substituted(int var, const Rational& value) const;

  // Dense coefficient list of the polynomial viewed in `var`; entry k is a
  // polynomial (same nvars, zero exponent in `var`) multiplying var^k.
  std::vector<Polynomial> coeffs_in(int var) const;

  // True when at most one variable appears with a positive exponent; that
  // variable index (or `fallback` if none appears) is stored in *var.
  bool effective_univariate(int* var, int fallback = 0) const;

  // Dense rational coefficients in `var`, valid when no other variable
  // appears.
  std::vector<Rational> univariate_coeffs(int var) const;

  // Text form used by landscape files: sum of rational-coefficient
  // monomials over variables `a`, `w1`..`wd` (alias `w` = `w1`), e.g.
  // "a*w1 - 1/3*w1^3". Grammar: term ::= coeff factors | factors;
  // coeff ::= int | int/int; factor ::= var ['^' uint]. No floats.
  static Polynomial parse(const std::string& text, int nvars);
  std::string to_string() const;

 private:
  void normalize();

  int nvars_;
  std::map<Monomial, Rational> terms_;
};

}  // namespace envtrace
