#pragma once

#include <gmpxx.h>

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace spectralab {

using Rational = mpq_class;

/// Parses "3", "-7/4", "0.25" into an exact rational. Throws InputError.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

/// Dense univariate polynomial over Q, ascending coefficients, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs);
  Poly(std::initializer_list<long> coeffs);
  static Poly constant(const Rational& c);
  static Poly monomial(int degree, const Rational& c = 1);
  /// x - root
  static Poly linear_root(const Rational& root);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const;
  Rational leading() const;
  Rational eval(const Rational& x) const;
  double eval(double x) const;

  Poly derivative() const;
  Poly monic() const;
  Poly pow(int e) const;
  /// p(x) -> p(x)^rev = x^deg p(1/x)
  Poly reversed(int to_degree) const;
  /// Coefficients of p truncated to the first n powers.
  Poly truncated(int n) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const Rational& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  Poly operator-() const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  std::string str(char var = 'x') const;

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Quotient and remainder of a by b (b nonzero).
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly operator%(const Poly& a, const Poly& b);
Poly operator/(const Poly& a, const Poly& b);
/// Monic gcd; gcd(0,0) = 0.
Poly gcd(const Poly& a, const Poly& b);
/// Returns (g, s, t) with s*a + t*b = g = gcd(a, b) monic.
struct Bezout {
  Poly g, s, t;
};
Bezout xgcd(const Poly& a, const Poly& b);
/// Inverse of a modulo m; throws DomainError when gcd(a, m) != 1.
Poly inverse_mod(const Poly& a, const Poly& m);
/// Multiplicity of the roots of the squarefree q inside p, i.e. the largest e with q^e | p.
int valuation(const Poly& p, const Poly& q);
bool is_squarefree(const Poly& p);

struct SquarefreeFactor {
  Poly factor;
  int multiplicity;
};
/// Yun decomposition p = lc * prod factor^multiplicity, factors monic, squarefree, coprime.
std::vector<SquarefreeFactor> squarefree_decomposition(const Poly& p);

/// Rational square root of q, if q is a perfect square in Q.
bool rational_sqrt(const Rational& q, Rational& root);

}  // namespace spectralab
