#include "spectralab/rational_poly.hpp"

#include <cmath>
#include <sstream>

#include "spectralab/error.hpp"

namespace spectralab {

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s.push_back(ch);
  }
  if (s.empty()) throw InputError("empty rational literal");
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos) {
      if (s.find('/') != std::string::npos) throw InputError("bad rational literal: " + text);
      bool neg = s[0] == '-';
      std::string body = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
      dot = body.find('.');
      std::string digits = body.substr(0, dot) + body.substr(dot + 1);
      if (digits.empty()) throw InputError("bad rational literal: " + text);
      mpz_class num(digits, 10);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, body.size() - dot - 1);
      Rational q(num, den);
      q.canonicalize();
      return neg ? Rational(-q) : q;
    }
    if (s[0] == '+') s = s.substr(1);
    Rational q(s, 10);
    if (q.get_den() == 0) throw InputError("zero denominator: " + text);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw InputError("bad rational literal: " + text);
  }
}

std::string to_string(const Rational& q) { return q.get_str(); }

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly::Poly(std::initializer_list<long> coeffs) {
  for (long v : coeffs) c_.emplace_back(v);
  trim();
}

Poly Poly::constant(const Rational& c) { return Poly(std::vector<Rational>{c}); }

Poly Poly::monomial(int degree, const Rational& c) {
  std::vector<Rational> v(static_cast<size_t>(degree) + 1, 0);
  v.back() = c;
  return Poly(std::move(v));
}

Poly Poly::linear_root(const Rational& root) { return Poly(std::vector<Rational>{-root, 1}); }

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Poly::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return c_[static_cast<size_t>(i)];
}

Rational Poly::leading() const { return c_.empty() ? Rational(0) : c_.back(); }

Rational Poly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Poly::eval(double x) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return Poly(std::move(d));
}

Poly Poly::monic() const {
  if (is_zero()) return {};
  Poly r = *this;
  r *= Rational(1) / leading();
  return r;
}

Poly Poly::pow(int e) const {
  Poly r = Poly::constant(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return r;
}

Poly Poly::reversed(int to_degree) const {
  std::vector<Rational> r(static_cast<size_t>(to_degree) + 1, 0);
  for (int i = 0; i <= degree(); ++i) r[static_cast<size_t>(to_degree - i)] = c_[static_cast<size_t>(i)];
  return Poly(std::move(r));
}

Poly Poly::truncated(int n) const {
  if (n >= static_cast<int>(c_.size())) return *this;
  return Poly(std::vector<Rational>(c_.begin(), c_.begin() + std::max(0, n)));
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  if (is_zero() || o.is_zero()) {
    c_.clear();
    return *this;
  }
  std::vector<Rational> r(c_.size() + o.c_.size() - 1, 0);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  c_ = std::move(r);
  trim();
  return *this;
}

Poly& Poly::operator*=(const Rational& s) {
  for (auto& v : c_) v *= s;
  trim();
  return *this;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

std::string Poly::str(char var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Rational& a = c_[static_cast<size_t>(i)];
    if (a == 0) continue;
    Rational mag = abs(a);
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    first = false;
    bool unit = (mag == 1);
    if (!unit || i == 0) os << mag.get_str();
    if (i > 0) {
      if (!unit) os << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  if (a.degree() < b.degree()) return {Poly{}, a};
  std::vector<Rational> r = a.coeffs();
  std::vector<Rational> q(static_cast<size_t>(a.degree() - b.degree()) + 1, 0);
  const Rational inv = Rational(1) / b.leading();
  const int db = b.degree();
  for (int i = a.degree(); i >= db; --i) {
    Rational f = r[static_cast<size_t>(i)] * inv;
    if (f == 0) continue;
    q[static_cast<size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<size_t>(i - db + j)] -= f * b.coeffs()[static_cast<size_t>(j)];
  }
  r.resize(static_cast<size_t>(db));
  return {Poly(std::move(q)), Poly(std::move(r))};
}

Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }
Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

Bezout xgcd(const Poly& a, const Poly& b) {
  Poly r0 = a, r1 = b, s0 = Poly::constant(1), s1, t0, t1 = Poly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly s2 = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    Poly t2 = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {Poly{}, Poly{}, Poly{}};
  Rational inv = Rational(1) / r0.leading();
  return {r0 * inv, s0 * inv, t0 * inv};
}

Poly inverse_mod(const Poly& a, const Poly& m) {
  Bezout b = xgcd(a % m, m);
  if (b.g.degree() != 0) throw DomainError("polynomial not invertible modulo " + m.str());
  return b.s % m;
}

int valuation(const Poly& p, const Poly& q) {
  if (p.is_zero()) throw DomainError("valuation of the zero polynomial");
  if (q.degree() < 1) throw DomainError("valuation with respect to a constant");
  int e = 0;
  Poly cur = p;
  while (true) {
    auto [quot, rem] = divmod(cur, q);
    if (!rem.is_zero()) break;
    cur = std::move(quot);
    ++e;
  }
  return e;
}

bool is_squarefree(const Poly& p) {
  if (p.degree() < 1) return true;
  return gcd(p, p.derivative()).degree() == 0;
}

std::vector<SquarefreeFactor> squarefree_decomposition(const Poly& p) {
  std::vector<SquarefreeFactor> out;
  if (p.degree() < 1) return out;
  Poly f = p.monic();
  Poly a0 = gcd(f, f.derivative());
  Poly b = f / a0;
  Poly c = f.derivative() / a0;
  Poly d = c - b.derivative();
  int i = 1;
  while (b.degree() >= 1) {
    Poly a = gcd(b, d);
    if (a.degree() >= 1) out.push_back({a, i});
    b = b / a;
    c = d / a;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

bool rational_sqrt(const Rational& q, Rational& root) {
  if (q < 0) return false;
  mpz_class n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  root = Rational(rn, rd);
  root.canonicalize();
  return true;
}

}  // namespace spectralab
