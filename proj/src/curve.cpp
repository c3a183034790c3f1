#include "spectralab/curve.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "spectralab/error.hpp"
#include "spectralab/rational_linalg.hpp"

namespace spectralab::curve {

namespace {

int ceil_half(int n) { return n <= 0 ? 0 : (n + 1) / 2; }

bool divides(const Poly& d, const Poly& n) { return (n % d).is_zero(); }

// Chinese remainder: r = r1 mod q1, r = r2 mod q2, q1 and q2 coprime.
Poly crt(const Poly& r1, const Poly& q1, const Poly& r2, const Poly& q2) {
  Poly inv = inverse_mod(q1, q2);
  Poly t = ((r2 - r1) * inv) % q2;
  return (r1 + q1 * t) % (q1 * q2);
}

// Finest pairwise coprime set of monic polynomials generating the same
// factorisation lattice as the inputs (each input squarefree).
std::vector<Poly> coprime_basis(const std::vector<Poly>& inputs) {
  std::vector<Poly> basis;
  std::vector<Poly> todo;
  for (const auto& q : inputs) todo.push_back(q.monic());
  while (!todo.empty()) {
    Poly a = std::move(todo.back());
    todo.pop_back();
    if (a.degree() < 1) continue;
    bool merged = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      Poly g = gcd(a, basis[i]);
      if (g.degree() < 1) continue;
      Poly b = basis[i];
      basis.erase(basis.begin() + static_cast<long>(i));
      todo.push_back(g);
      todo.push_back((a / g).monic());
      todo.push_back((b / g).monic());
      merged = true;
      break;
    }
    if (!merged) basis.push_back(a);
  }
  return basis;
}

struct Atom {
  FiberKind kind;
  Poly q;
  Poly r;
  int mp = 0;
  int mm = 0;
  int tag = 0;
};

struct Piece {
  FiberKind kind;
  Poly q;
  Poly r;
  std::vector<std::array<int, 2>> mults;  // per tag: (plus, minus); branch/symmetric use [0]
};

// Validates atoms and moves branch points of symmetric fibres to branch entries.
std::vector<Atom> sanitize(const HyperellipticCurve& c, std::vector<Atom> atoms) {
  std::vector<Atom> out;
  for (auto& a : atoms) {
    if (a.q.degree() < 1) throw DomainError("fibre polynomial must be non-constant");
    a.q = a.q.monic();
    if (!is_squarefree(a.q)) throw DomainError("fibre polynomial must be squarefree: " + a.q.str());
    Poly gb = gcd(a.q, c.p());
    switch (a.kind) {
      case FiberKind::Branch:
        if (gb.degree() != a.q.degree()) throw DomainError("branch entry " + a.q.str() + " does not divide p");
        a.mm = 0;
        out.push_back(a);
        break;
      case FiberKind::Split: {
        if (gb.degree() > 0) throw DomainError("split entry " + a.q.str() + " meets a branch point");
        a.r = a.r % a.q;
        if (!((a.r * a.r - c.p()) % a.q).is_zero()) throw DomainError("sheet polynomial does not satisfy r^2 = p mod q");
        out.push_back(a);
        break;
      }
      case FiberKind::Symmetric: {
        a.mm = a.mp;
        if (gb.degree() > 0) {
          out.push_back({FiberKind::Branch, gb, {}, 2 * a.mp, 0, a.tag});
          Poly rest = (a.q / gb).monic();
          if (rest.degree() < 1) break;
          a.q = rest;
        }
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

std::vector<Piece> refine(const HyperellipticCurve& c, std::vector<Atom> atoms, int tags) {
  atoms = sanitize(c, std::move(atoms));
  std::vector<Poly> qs;
  for (const auto& a : atoms) qs.push_back(a.q);
  std::vector<Poly> work = coprime_basis(qs);
  std::vector<Piece> pieces;
  while (!work.empty()) {
    Poly b = std::move(work.back());
    work.pop_back();
    std::vector<const Atom*> over;
    for (const auto& a : atoms) {
      if (divides(b, a.q)) over.push_back(&a);
    }
    if (over.empty()) continue;
    Piece piece;
    piece.q = b;
    piece.mults.assign(static_cast<size_t>(tags), {0, 0});
    if (over.front()->kind == FiberKind::Branch) {
      piece.kind = FiberKind::Branch;
      for (const Atom* a : over) piece.mults[static_cast<size_t>(a->tag)][0] += a->mp;
      pieces.push_back(std::move(piece));
      continue;
    }
    const Atom* ref = nullptr;
    for (const Atom* a : over) {
      if (a->kind == FiberKind::Split) {
        ref = a;
        break;
      }
    }
    if (ref == nullptr) {
      piece.kind = FiberKind::Symmetric;
      for (const Atom* a : over) {
        piece.mults[static_cast<size_t>(a->tag)][0] += a->mp;
        piece.mults[static_cast<size_t>(a->tag)][1] += a->mp;
      }
      pieces.push_back(std::move(piece));
      continue;
    }
    Poly r = ref->r % b;
    bool refined = false;
    for (const Atom* a : over) {
      if (a->kind != FiberKind::Split) continue;
      Poly g = gcd(b, a->r - r);
      if (g.degree() >= 1 && g.degree() < b.degree()) {
        work.push_back(g);
        work.push_back((b / g).monic());
        refined = true;
        break;
      }
    }
    if (refined) continue;
    piece.kind = FiberKind::Split;
    piece.r = r;
    for (const Atom* a : over) {
      auto& m = piece.mults[static_cast<size_t>(a->tag)];
      if (a->kind == FiberKind::Symmetric) {
        m[0] += a->mp;
        m[1] += a->mp;
      } else if (((a->r - r) % b).is_zero()) {
        m[0] += a->mp;
        m[1] += a->mm;
      } else {
        m[0] += a->mm;
        m[1] += a->mp;
      }
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::vector<Atom> atoms_of(const Divisor& d, int tag, int sign) {
  std::vector<Atom> out;
  for (const auto& e : d.entries()) {
    out.push_back({e.kind, e.q, e.r, sign * e.mult_plus, sign * e.mult_minus, tag});
  }
  return out;
}

// Canonical entry list from pieces carrying one combined multiplicity pair.
std::vector<FiberEntry> canonical_entries(const std::vector<Piece>& pieces,
                                          const std::vector<std::array<int, 2>>& mults) {
  std::map<std::tuple<int, int, int>, FiberEntry> groups;
  for (size_t i = 0; i < pieces.size(); ++i) {
    const Piece& pc = pieces[i];
    FiberEntry e{pc.kind, pc.q, {}, mults[i][0], 0};
    if (pc.kind == FiberKind::Symmetric) {
      if (mults[i][0] != mults[i][1]) {
        throw DomainError("internal: symmetric fibre with unequal sheet multiplicities");
      }
    } else if (pc.kind == FiberKind::Split) {
      int mp = mults[i][0], mm = mults[i][1];
      if (mp == mm) {
        e.kind = FiberKind::Symmetric;
      } else {
        e.r = pc.r;
        if (mp < mm) {
          std::swap(mp, mm);
          e.r = (-pc.r) % pc.q;
        }
        e.mult_plus = mp;
        e.mult_minus = mm;
      }
    }
    if (e.mult_plus == 0 && e.mult_minus == 0) continue;
    auto key = std::make_tuple(static_cast<int>(e.kind), e.mult_plus, e.mult_minus);
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(key, std::move(e));
      continue;
    }
    FiberEntry& g = it->second;
    if (e.kind == FiberKind::Split) g.r = crt(g.r, g.q, e.r, e.q);
    g.q = g.q * e.q;
  }
  std::vector<FiberEntry> out;
  for (auto& [key, e] : groups) out.push_back(std::move(e));
  return out;
}

std::vector<Rational> sqrt_series(const std::vector<Rational>& f, const Rational& root0, int terms) {
  std::vector<Rational> r(static_cast<size_t>(terms), 0);
  if (terms == 0) return r;
  r[0] = root0;
  Rational inv2r = Rational(1) / (2 * root0);
  for (int n = 1; n < terms; ++n) {
    Rational acc = n < static_cast<int>(f.size()) ? f[static_cast<size_t>(n)] : Rational(0);
    for (int i = 1; i < n; ++i) acc -= r[static_cast<size_t>(i)] * r[static_cast<size_t>(n - i)];
    r[static_cast<size_t>(n)] = acc * inv2r;
  }
  return r;
}

// S with S^2 = p mod modulus, S = r mod q, modulus a power of q.
Poly hensel_sqrt(const Poly& p, const Poly& r, const Poly& modulus) {
  Poly s = r % modulus;
  for (int it = 0; it < 64; ++it) {
    Poly err = (s * s - p) % modulus;
    if (err.is_zero()) return s;
    Poly inv = inverse_mod(s * Rational(2), modulus);
    s = (s - err * inv) % modulus;
  }
  throw DomainError("Hensel lifting of the sheet polynomial failed");
}

// Coefficient vector of poly reduced modulo m, padded to deg m entries.
std::vector<Rational> reduced_coeffs(const Poly& poly, const Poly& m) {
  Poly red = poly % m;
  std::vector<Rational> v(static_cast<size_t>(m.degree()), 0);
  for (int i = 0; i <= red.degree(); ++i) v[static_cast<size_t>(i)] = red.coeff(i);
  return v;
}

int infinity_order_odd(const HyperellipticCurve& c, const Poly& a, const Poly& b) {
  int ord = 1 << 30;
  if (!a.is_zero()) ord = std::min(ord, -2 * a.degree());
  if (!b.is_zero()) ord = std::min(ord, -2 * b.degree() - c.p().degree());
  return ord;
}

// ord of A + s B y at the even-model infinite place with sheet s.
int infinity_order_even(const HyperellipticCurve& c, const Poly& a, const Poly& b, int s) {
  const int g = c.genus();
  int top = -1;
  if (!a.is_zero()) top = a.degree();
  if (!b.is_zero()) top = std::max(top, b.degree() + g + 1);
  Poly norm = a * a - b * b * c.p();
  int len = 2 * top - norm.degree() + 2;
  std::vector<Rational> series(static_cast<size_t>(len), 0);
  if (!a.is_zero()) {
    Poly arev = a.reversed(top);
    for (int i = 0; i <= arev.degree() && i < len; ++i) series[static_cast<size_t>(i)] += arev.coeff(i);
  }
  if (!b.is_zero()) {
    int shift = top - b.degree() - g - 1;
    Poly brev = b.reversed(b.degree());
    std::vector<Rational> rs = c.infinity_series(len);
    for (int i = 0; i <= brev.degree(); ++i) {
      for (int j = 0; shift + i + j < len; ++j) {
        series[static_cast<size_t>(shift + i + j)] += s * brev.coeff(i) * rs[static_cast<size_t>(j)];
      }
    }
  }
  for (int i = 0; i < len; ++i) {
    if (series[static_cast<size_t>(i)] != 0) return i - top;
  }
  throw DomainError("internal: infinite order expansion did not terminate");
}

}  // namespace

// ---------------------------------------------------------------- curve

HyperellipticCurve::HyperellipticCurve(Poly p) {
  if (p.degree() < 1) throw InputError("curve polynomial must have degree >= 1");
  if (!is_squarefree(p)) throw InputError("curve polynomial is not squarefree: " + p.str());
  Data d{p, p.degree() % 2 == 1 ? Model::Odd : Model::Even, (p.degree() - 1) / 2, 0};
  if (d.model == Model::Even && !rational_sqrt(p.leading(), d.sqrt_leading)) {
    throw InputError("even model needs a square leading coefficient, got " + p.leading().get_str());
  }
  d_ = std::make_shared<const Data>(std::move(d));
}

HyperellipticCurve::HyperellipticCurve(Model declared, Poly p) : HyperellipticCurve(std::move(p)) {
  if (declared != model()) throw InputError("declared model does not match the degree of p");
}

std::vector<Rational> HyperellipticCurve::infinity_series(int terms) const {
  if (model() != Model::Even) throw DomainError("infinity series is defined for even models only");
  Poly rev = p().reversed(p().degree());
  return sqrt_series(rev.coeffs(), sqrt_leading(), terms);
}

std::string HyperellipticCurve::str() const { return "y^2 = " + p().str(); }

// ---------------------------------------------------------------- divisor

Divisor::Divisor(HyperellipticCurve curve) : curve_(std::move(curve)) {}

Divisor::Divisor(HyperellipticCurve curve, std::vector<FiberEntry> entries, std::array<int, 2> infinity)
    : curve_(std::move(curve)), inf_(infinity) {
  if (curve_.model() == Model::Odd && inf_[1] != 0) throw DomainError("odd model has a single place at infinity");
  std::vector<Atom> atoms;
  for (auto& e : entries) atoms.push_back({e.kind, e.q, e.r, e.mult_plus, e.mult_minus, 0});
  auto pieces = refine(curve_, std::move(atoms), 1);
  std::vector<std::array<int, 2>> mults;
  for (const auto& pc : pieces) mults.push_back(pc.mults[0]);
  entries_ = canonical_entries(pieces, mults);
}

Divisor Divisor::point(const HyperellipticCurve& c, const Place& place, int mult) {
  switch (place.kind) {
    case Place::Kind::Infinite: {
      if (place.index < 0 || place.index >= c.places_at_infinity()) throw InputError("no such place at infinity");
      std::array<int, 2> inf{0, 0};
      inf[static_cast<size_t>(place.index)] = mult;
      return Divisor(c, {}, inf);
    }
    case Place::Kind::Branch:
      if (c.p().eval(place.x) != 0) throw InputError("x = " + place.x.get_str() + " is not a branch point");
      return Divisor(c, {{FiberKind::Branch, Poly::linear_root(place.x), {}, mult, 0}});
    case Place::Kind::Finite: {
      Rational v = c.p().eval(place.x);
      if (v == 0) return Divisor(c, {{FiberKind::Branch, Poly::linear_root(place.x), {}, mult, 0}});
      Rational y0;
      if (!rational_sqrt(v, y0)) {
        throw InputError("place over x = " + place.x.get_str() + " has irrational y; use the full fibre");
      }
      if (place.sheet != 1 && place.sheet != -1) throw InputError("sheet must be +1 or -1");
      return Divisor(c, {{FiberKind::Split, Poly::linear_root(place.x), Poly::constant(place.sheet * y0), mult, 0}});
    }
  }
  throw InputError("unknown place kind");
}

Divisor Divisor::fiber(const HyperellipticCurve& c, const Rational& x0, int mult) {
  return Divisor(c, {{FiberKind::Symmetric, Poly::linear_root(x0), {}, mult, mult}});
}

Divisor Divisor::of_polynomial(const HyperellipticCurve& c, const Poly& poly) {
  if (poly.is_zero()) throw DomainError("undefined divisor");
  std::vector<FiberEntry> entries;
  for (const auto& f : squarefree_decomposition(poly)) {
    entries.push_back({FiberKind::Symmetric, f.factor, {}, f.multiplicity, f.multiplicity});
  }
  std::array<int, 2> inf{0, 0};
  if (c.model() == Model::Odd) {
    inf[0] = -2 * poly.degree();
  } else {
    inf = {-poly.degree(), -poly.degree()};
  }
  return Divisor(c, std::move(entries), inf);
}

Divisor Divisor::hyperelliptic_pencil(const HyperellipticCurve& c) {
  return c.model() == Model::Odd ? Divisor(c, {}, {2, 0}) : Divisor(c, {}, {1, 1});
}

int Divisor::degree() const {
  int deg = inf_[0] + inf_[1];
  for (const auto& e : entries_) {
    switch (e.kind) {
      case FiberKind::Branch: deg += e.q.degree() * e.mult_plus; break;
      case FiberKind::Split: deg += e.q.degree() * (e.mult_plus + e.mult_minus); break;
      case FiberKind::Symmetric: deg += 2 * e.q.degree() * e.mult_plus; break;
    }
  }
  return deg;
}

bool Divisor::is_effective() const {
  if (inf_[0] < 0 || inf_[1] < 0) return false;
  for (const auto& e : entries_) {
    if (e.mult_plus < 0 || (e.kind == FiberKind::Split && e.mult_minus < 0)) return false;
  }
  return true;
}

int Divisor::mult_at(const Place& place) const {
  if (place.kind == Place::Kind::Infinite) {
    if (place.index < 0 || place.index >= curve_.places_at_infinity()) throw InputError("no such place at infinity");
    return inf_[static_cast<size_t>(place.index)];
  }
  Rational v = curve_.p().eval(place.x);
  Rational y0 = 0;
  if (v != 0 && !rational_sqrt(v, y0)) {
    throw InputError("place over x = " + place.x.get_str() + " has irrational y");
  }
  y0 *= place.sheet;
  for (const auto& e : entries_) {
    if (e.q.eval(place.x) != 0) continue;
    switch (e.kind) {
      case FiberKind::Branch:
      case FiberKind::Symmetric: return e.mult_plus;
      case FiberKind::Split: return e.r.eval(place.x) == y0 ? e.mult_plus : e.mult_minus;
    }
  }
  return 0;
}

std::pair<Divisor, Divisor> Divisor::split_signs() const {
  Divisor zero(curve_);
  return {max(*this, zero), -min(*this, zero)};
}

Divisor Divisor::operator+(const Divisor& o) const {
  if (!(curve_ == o.curve_)) throw DomainError("divisors live on different curves");
  std::vector<FiberEntry> all = entries_;
  all.insert(all.end(), o.entries_.begin(), o.entries_.end());
  return Divisor(curve_, std::move(all), {inf_[0] + o.inf_[0], inf_[1] + o.inf_[1]});
}

Divisor Divisor::operator-() const { return *this * -1; }

Divisor Divisor::operator-(const Divisor& o) const { return *this + (-o); }

Divisor Divisor::operator*(int k) const {
  Divisor out(curve_);
  out.inf_ = {inf_[0] * k, inf_[1] * k};
  if (k == 0) return out;
  for (auto e : entries_) {
    e.mult_plus *= k;
    e.mult_minus *= k;
    out.entries_.push_back(std::move(e));
  }
  return Divisor(curve_, out.entries_, out.inf_);
}

std::string Divisor::str() const {
  std::ostringstream os;
  bool first = true;
  auto term = [&](int m, const std::string& what) {
    if (m == 0) return;
    if (!first) os << (m < 0 ? " - " : " + ");
    else if (m < 0) os << "-";
    first = false;
    if (std::abs(m) != 1) os << std::abs(m) << "*";
    os << what;
  };
  for (const auto& e : entries_) {
    switch (e.kind) {
      case FiberKind::Branch: term(e.mult_plus, "B[" + e.q.str() + "]"); break;
      case FiberKind::Symmetric: term(e.mult_plus, "F[" + e.q.str() + "]"); break;
      case FiberKind::Split:
        term(e.mult_plus, "P[" + e.q.str() + "; y=" + e.r.str() + "]");
        term(e.mult_minus, "P[" + e.q.str() + "; y=" + (-e.r).str() + "]");
        break;
    }
  }
  if (curve_.model() == Model::Odd) {
    term(inf_[0], "inf");
  } else {
    term(inf_[0], "inf0");
    term(inf_[1], "inf1");
  }
  return first ? "0" : os.str();
}

namespace {

Divisor pointwise(const Divisor& a, const Divisor& b, bool take_min) {
  if (!(a.curve() == b.curve())) throw DomainError("divisors live on different curves");
  std::vector<Atom> atoms = atoms_of(a, 0, 1);
  auto more = atoms_of(b, 1, 1);
  atoms.insert(atoms.end(), more.begin(), more.end());
  auto pieces = refine(a.curve(), std::move(atoms), 2);
  std::vector<std::array<int, 2>> mults;
  auto pick = [&](int u, int v) { return take_min ? std::min(u, v) : std::max(u, v); };
  for (const auto& pc : pieces) {
    mults.push_back({pick(pc.mults[0][0], pc.mults[1][0]), pick(pc.mults[0][1], pc.mults[1][1])});
  }
  std::array<int, 2> inf{pick(a.infinity()[0], b.infinity()[0]), pick(a.infinity()[1], b.infinity()[1])};
  std::vector<FiberEntry> entries = canonical_entries(pieces, mults);
  return Divisor(a.curve(), std::move(entries), inf);
}

}  // namespace

Divisor min(const Divisor& a, const Divisor& b) { return pointwise(a, b, true); }
Divisor max(const Divisor& a, const Divisor& b) { return pointwise(a, b, false); }

// ---------------------------------------------------------------- functions

MeromorphicFunction::MeromorphicFunction(HyperellipticCurve curve, Poly a, Poly b, Poly h)
    : curve_(std::move(curve)), a_(std::move(a)), b_(std::move(b)), h_(std::move(h)) {
  if (h_.is_zero()) throw DomainError("zero denominator");
  normalize();
}

void MeromorphicFunction::normalize() {
  if (a_.is_zero() && b_.is_zero()) {
    h_ = Poly{1};
    return;
  }
  Rational lc = h_.leading();
  a_ *= Rational(1) / lc;
  b_ *= Rational(1) / lc;
  h_ = h_.monic();
  Poly g = gcd(gcd(a_, b_), h_);
  if (g.degree() >= 1) {
    a_ = a_ / g;
    b_ = b_ / g;
    h_ = h_ / g;
  }
}

MeromorphicFunction MeromorphicFunction::x(const HyperellipticCurve& c) { return {c, Poly{0, 1}}; }
MeromorphicFunction MeromorphicFunction::y(const HyperellipticCurve& c) { return {c, Poly{}, Poly{1}}; }
MeromorphicFunction MeromorphicFunction::constant(const HyperellipticCurve& c, const Rational& v) {
  return {c, Poly::constant(v)};
}

MeromorphicFunction MeromorphicFunction::operator+(const MeromorphicFunction& o) const {
  return {curve_, a_ * o.h_ + o.a_ * h_, b_ * o.h_ + o.b_ * h_, h_ * o.h_};
}

MeromorphicFunction MeromorphicFunction::operator-(const MeromorphicFunction& o) const { return *this + o * Rational(-1); }

MeromorphicFunction MeromorphicFunction::operator*(const MeromorphicFunction& o) const {
  return {curve_, a_ * o.a_ + b_ * o.b_ * curve_.p(), a_ * o.b_ + b_ * o.a_, h_ * o.h_};
}

MeromorphicFunction MeromorphicFunction::operator*(const Rational& s) const { return {curve_, a_ * s, b_ * s, h_}; }

MeromorphicFunction MeromorphicFunction::operator/(const MeromorphicFunction& o) const {
  if (o.is_zero()) throw DomainError("division by the zero function");
  Poly norm = o.a_ * o.a_ - o.b_ * o.b_ * curve_.p();
  MeromorphicFunction inv(curve_, o.h_ * o.a_, -(o.h_ * o.b_), norm);
  return *this * inv;
}

std::string MeromorphicFunction::str() const {
  std::string num;
  if (b_.is_zero()) {
    num = a_.str();
  } else if (a_.is_zero()) {
    num = "(" + b_.str() + ")*y";
  } else {
    num = a_.str() + " + (" + b_.str() + ")*y";
  }
  if (h_.degree() == 0) return num;
  return "(" + num + ") / (" + h_.str() + ")";
}

Divisor divisor_of(const MeromorphicFunction& f) {
  if (f.is_zero()) throw DomainError("undefined divisor");
  const HyperellipticCurve& c = f.curve();
  const Poly& a = f.a();
  const Poly& b = f.b();
  std::vector<FiberEntry> entries;
  Poly g = b.is_zero() ? a.monic() : (a.is_zero() ? b.monic() : gcd(a, b));
  Poly a1 = a / g;
  Poly b1 = b / g;
  for (const auto& sf : squarefree_decomposition(g)) {
    entries.push_back({FiberKind::Symmetric, sf.factor, {}, sf.multiplicity, sf.multiplicity});
  }
  if (!b1.is_zero()) {
    Poly norm = a1 * a1 - b1 * b1 * c.p();
    for (const auto& sf : squarefree_decomposition(norm)) {
      Poly branch = gcd(sf.factor, c.p());
      Poly rest = (sf.factor / branch).monic();
      if (rest.degree() >= 1) {
        Poly r = ((-a1) * inverse_mod(b1, rest)) % rest;
        entries.push_back({FiberKind::Split, rest, r, sf.multiplicity, 0});
      }
    }
    Poly branch_zeros = a1.is_zero() ? c.p().monic() : gcd(a1, c.p());
    if (branch_zeros.degree() >= 1) entries.push_back({FiberKind::Branch, branch_zeros, {}, 1, 0});
  }
  std::array<int, 2> inf{0, 0};
  if (c.model() == Model::Odd) {
    inf[0] = infinity_order_odd(c, a, b);
  } else {
    inf = {infinity_order_even(c, a, b, 1), infinity_order_even(c, a, b, -1)};
  }
  Divisor numerator(c, std::move(entries), inf);
  return numerator - Divisor::of_polynomial(c, f.h());
}

Divisor canonical_divisor(const HyperellipticCurve& c) {
  const int g = c.genus();
  return c.model() == Model::Odd ? Divisor(c, {}, {2 * g - 2, 0}) : Divisor(c, {}, {g - 1, g - 1});
}

Divisor one_form_divisor(const MeromorphicFunction& f) { return divisor_of(f) + canonical_divisor(f.curve()); }

// ---------------------------------------------------------------- Riemann-Roch

RiemannRochSpace riemann_roch_space(const Divisor& d) {
  const HyperellipticCurve& c = d.curve();
  const int g = c.genus();

  struct Congruence {
    Poly modulus;
    Poly sheet;  // zero for "divides A and B separately" conditions
    int sign;
    bool on_a;
    bool on_b;
  };
  std::vector<Congruence> conds;
  Poly h{1};
  for (const auto& e : d.entries()) {
    switch (e.kind) {
      case FiberKind::Branch: {
        int ex = ceil_half(e.mult_plus);
        int cc = 2 * ex - e.mult_plus;
        h *= e.q.pow(ex);
        if (ceil_half(cc) > 0) conds.push_back({e.q.pow(ceil_half(cc)), {}, 1, true, false});
        if (ceil_half(cc - 1) > 0) conds.push_back({e.q.pow(ceil_half(cc - 1)), {}, 1, false, true});
        break;
      }
      case FiberKind::Symmetric: {
        int ex = std::max(0, e.mult_plus);
        int cc = ex - e.mult_plus;
        h *= e.q.pow(ex);
        if (cc > 0) {
          conds.push_back({e.q.pow(cc), {}, 1, true, false});
          conds.push_back({e.q.pow(cc), {}, 1, false, true});
        }
        break;
      }
      case FiberKind::Split: {
        int ex = std::max({0, e.mult_plus, e.mult_minus});
        h *= e.q.pow(ex);
        int cp = ex - e.mult_plus, cm = ex - e.mult_minus;
        int top = std::max(cp, cm);
        if (top == 0) break;
        Poly s = hensel_sqrt(c.p(), e.r, e.q.pow(top));
        if (cp > 0) conds.push_back({e.q.pow(cp), s, 1, true, true});
        if (cm > 0) conds.push_back({e.q.pow(cm), s, -1, true, true});
        break;
      }
    }
  }
  const int hdeg = h.degree();

  int na, nb;
  if (c.model() == Model::Odd) {
    int n = d.infinity()[0] + 2 * hdeg;
    na = n >= 0 ? n / 2 : -1;
    int m = n - c.p().degree();
    nb = m >= 0 ? m / 2 : -1;
  } else {
    int top = std::max(d.infinity()[0], d.infinity()[1]) + hdeg;
    na = top;
    nb = top - (g + 1);
  }
  RiemannRochSpace out;
  if (na < 0 && nb < 0) return out;
  const int ca = std::max(0, na + 1), cb = std::max(0, nb + 1);
  const int cols = ca + cb;
  RationalMatrix rows;

  for (const auto& cond : conds) {
    const int dm = cond.modulus.degree();
    std::vector<RationalRow> block(static_cast<size_t>(dm), RationalRow(static_cast<size_t>(cols), 0));
    if (cond.on_a) {
      Poly mono{1};
      for (int i = 0; i < ca; ++i) {
        auto v = reduced_coeffs(mono, cond.modulus);
        for (int k = 0; k < dm; ++k) block[static_cast<size_t>(k)][static_cast<size_t>(i)] = v[static_cast<size_t>(k)];
        mono = (mono * Poly{0, 1}) % cond.modulus;
      }
    }
    if (cond.on_b) {
      Poly mono = cond.sheet.is_zero() ? Poly{1} : (cond.sheet * Rational(cond.sign)) % cond.modulus;
      for (int j = 0; j < cb; ++j) {
        auto v = reduced_coeffs(mono, cond.modulus);
        for (int k = 0; k < dm; ++k) block[static_cast<size_t>(k)][static_cast<size_t>(ca + j)] = v[static_cast<size_t>(k)];
        mono = (mono * Poly{0, 1}) % cond.modulus;
      }
    }
    for (auto& r : block) rows.push_back(std::move(r));
  }

  if (c.model() == Model::Even) {
    const int top = std::max(d.infinity()[0], d.infinity()[1]) + hdeg;
    const int lowest = std::min(d.infinity()[0], d.infinity()[1]) + hdeg;
    std::vector<Rational> rs = c.infinity_series(std::max(1, top - lowest + 2));
    for (int s_idx = 0; s_idx < 2; ++s_idx) {
      const int sign = s_idx == 0 ? 1 : -1;
      const int allowed = d.infinity()[static_cast<size_t>(s_idx)] + hdeg;
      // coefficient of t^k, k = -top .. -allowed-1, must vanish
      for (int k = -top; k <= -allowed - 1; ++k) {
        RationalRow row(static_cast<size_t>(cols), 0);
        if (-k >= 0 && -k < ca) row[static_cast<size_t>(-k)] = 1;
        for (int j = 0; j < cb; ++j) {
          int idx = k + j + g + 1;
          if (idx < 0) continue;
          row[static_cast<size_t>(ca + j)] += sign * rs[static_cast<size_t>(idx)];
        }
        rows.push_back(std::move(row));
      }
    }
  }

  for (const auto& v : nullspace(std::move(rows), cols)) {
    std::vector<Rational> av(v.begin(), v.begin() + ca), bv(v.begin() + ca, v.end());
    out.basis.emplace_back(c, Poly(av), Poly(bv), h);
  }
  out.dimension = static_cast<int>(out.basis.size());
  return out;
}

int h0(const Divisor& d) {
  if (d.degree() < 0) return 0;
  return riemann_roch_space(d).dimension;
}

RiemannRochReport riemann_roch_check(const Divisor& d) {
  RiemannRochReport rep;
  rep.h0_d = h0(d);
  rep.h0_k_minus_d = h0(canonical_divisor(d.curve()) - d);
  rep.lhs = rep.h0_d - rep.h0_k_minus_d;
  rep.rhs = d.degree() - d.curve().genus() + 1;
  rep.ok = rep.lhs == rep.rhs;
  return rep;
}

bool linearly_equivalent(const Divisor& a, const Divisor& b) {
  if (a.degree() != b.degree()) return false;
  return h0(a - b) > 0;
}

Pencil pencil_of(const MeromorphicFunction& f) {
  if (f.is_constant() || f.is_zero()) throw DomainError("pencil requires a non-constant function");
  Divisor div = divisor_of(f);
  auto [zeros, poles] = div.split_signs();
  Pencil pencil{poles.degree(), MeromorphicFunction::constant(f.curve(), 1), f, poles,
                min(poles, div + poles), 2};
  return pencil;
}

std::vector<Place> rational_points(const HyperellipticCurve& c, int height_bound) {
  std::set<Rational> seen;
  std::vector<Place> out;
  for (int den = 1; den <= height_bound; ++den) {
    for (int num = -height_bound; num <= height_bound; ++num) {
      Rational x(num, den);
      x.canonicalize();
      if (!seen.insert(x).second) continue;
      Rational v = c.p().eval(x), root;
      if (v == 0) {
        out.push_back(Place::branch(x));
      } else if (rational_sqrt(v, root)) {
        out.push_back(Place::finite(x, 1));
        out.push_back(Place::finite(x, -1));
      }
    }
  }
  return out;
}

PencilProbeReport unique_pencil_probe(const HyperellipticCurve& c, int d, int samples, std::uint64_t seed) {
  if (d < 1) throw InputError("pencil probe degree must be >= 1");
  PencilProbeReport rep;
  rep.degree = d;
  rep.samples = samples;
  rep.seed = seed;
  std::vector<Divisor> deg1, deg2;
  for (const auto& pl : rational_points(c, 4)) deg1.push_back(Divisor::point(c, pl));
  for (int i = 0; i < c.places_at_infinity(); ++i) deg1.push_back(Divisor::point(c, Place::infinity(i)));
  for (int x = -3; x <= 3; ++x) {
    if (c.p().eval(Rational(x)) != 0) deg2.push_back(Divisor::fiber(c, x));
  }
  std::mt19937_64 rng(seed);
  const Divisor g12 = Divisor::hyperelliptic_pencil(c);
  std::vector<Divisor> class_reps;
  for (int s = 0; s < samples; ++s) {
    Divisor div(c);
    int remaining = d;
    while (remaining > 0) {
      bool use2 = remaining >= 2 && !deg2.empty() && (deg1.empty() || rng() % 3 == 0);
      if (use2) {
        div = div + deg2[rng() % deg2.size()];
        remaining -= 2;
      } else {
        if (deg1.empty()) throw DomainError("curve has no rational degree-1 places to sample from");
        div = div + deg1[rng() % deg1.size()];
        remaining -= 1;
      }
    }
    PencilProbeSample sample{div, h0(div), -1, false};
    if (sample.h0 >= 2) {
      ++rep.with_h0_ge_2;
      sample.contains_g12 = d >= 2 && h0(div - g12) >= 1;
      rep.all_equivalent_to_hyperelliptic = rep.all_equivalent_to_hyperelliptic && sample.contains_g12;
      for (size_t k = 0; k < class_reps.size(); ++k) {
        if (linearly_equivalent(div, class_reps[k])) {
          sample.equivalence_class = static_cast<int>(k);
          break;
        }
      }
      if (sample.equivalence_class < 0) {
        sample.equivalence_class = static_cast<int>(class_reps.size());
        class_reps.push_back(div);
      }
    }
    rep.entries.push_back(std::move(sample));
  }
  rep.distinct_classes = static_cast<int>(class_reps.size());
  if (rep.with_h0_ge_2 == 0) rep.all_equivalent_to_hyperelliptic = false;
  return rep;
}

int h0_of_doubled_pencil(const HyperellipticCurve& c) { return h0(Divisor::hyperelliptic_pencil(c) * 2); }

}  // namespace spectralab::curve
