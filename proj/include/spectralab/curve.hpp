#pragma once

// Exact arithmetic on hyperelliptic curves y^2 = p(x) over Q.
//
// Divisors are Galois-stable: a finite part is a list of fibre entries, each
// attached to a monic squarefree polynomial q(x) whose roots are the x
// coordinates of the points involved. Three entry kinds cover every
// rational divisor without factoring over Q:
//
//   Branch     q | p, one point per root, one multiplicity.
//   Split      q coprime to p, sheet polynomial r with r^2 = p (mod q);
//              mult_plus on the points (x0, r(x0)), mult_minus on (x0, -r(x0)).
//   Symmetric  q coprime to p, both points over every root, same multiplicity.
//
// A rational point (x0, y0) is Split(x - x0, y0). A canonical divisor has
// pairwise coprime q's and merged entries, so structural equality is
// divisor equality.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spectralab/rational_poly.hpp"

namespace spectralab::curve {

enum class Model { Odd, Even };

class HyperellipticCurve {
 public:
  /// Throws InputError unless p is squarefree of degree >= 1; even models
  /// need a leading coefficient that is a rational square so that both
  /// places at infinity are rational.
  explicit HyperellipticCurve(Poly p);
  HyperellipticCurve(Model declared, Poly p);

  const Poly& p() const { return d_->p; }
  Model model() const { return d_->model; }
  int genus() const { return d_->genus; }
  int euler_characteristic() const { return 2 - 2 * d_->genus; }
  int places_at_infinity() const { return d_->model == Model::Odd ? 1 : 2; }
  /// sqrt of the leading coefficient (even model), 0 for odd models.
  const Rational& sqrt_leading() const { return d_->sqrt_leading; }
  /// Power series of t^(g+1) * y at t = 1/x on the +1 sheet, even model only.
  std::vector<Rational> infinity_series(int terms) const;

  std::string str() const;
  friend bool operator==(const HyperellipticCurve& a, const HyperellipticCurve& b) { return a.p() == b.p(); }

 private:
  struct Data {
    Poly p;
    Model model;
    int genus;
    Rational sqrt_leading;
  };
  std::shared_ptr<const Data> d_;
};

/// A single geometric place, used to build divisors and query multiplicities.
struct Place {
  enum class Kind { Finite, Branch, Infinite };
  Kind kind = Kind::Finite;
  Rational x;    // Finite and Branch
  int sheet = 1; // Finite: +1/-1 selects y = sheet*sqrt(p(x)); Infinite: unused
  int index = 0; // Infinite: 0 or 1

  static Place finite(const Rational& x, int sheet) { return {Kind::Finite, x, sheet, 0}; }
  static Place branch(const Rational& x) { return {Kind::Branch, x, 0, 0}; }
  static Place infinity(int index = 0) { return {Kind::Infinite, 0, 0, index}; }
};

enum class FiberKind { Branch, Split, Symmetric };

struct FiberEntry {
  FiberKind kind;
  Poly q;
  Poly r;  // Split only
  int mult_plus = 0;
  int mult_minus = 0;  // Split only

  friend bool operator==(const FiberEntry&, const FiberEntry&) = default;
};

class Divisor {
 public:
  explicit Divisor(HyperellipticCurve curve);
  /// Builds and canonicalises; entries may overlap.
  Divisor(HyperellipticCurve curve, std::vector<FiberEntry> entries, std::array<int, 2> infinity = {0, 0});

  static Divisor point(const HyperellipticCurve& c, const Place& place, int mult = 1);
  /// Full fibre of x over x0 (both sheets, or the branch point twice).
  static Divisor fiber(const HyperellipticCurve& c, const Rational& x0, int mult = 1);
  /// Divisor of a nonzero polynomial in x.
  static Divisor of_polynomial(const HyperellipticCurve& c, const Poly& poly);
  /// Polar divisor of x: the g^1_2 class.
  static Divisor hyperelliptic_pencil(const HyperellipticCurve& c);

  const HyperellipticCurve& curve() const { return curve_; }
  const std::vector<FiberEntry>& entries() const { return entries_; }
  const std::array<int, 2>& infinity() const { return inf_; }

  int degree() const;
  bool is_effective() const;
  bool is_zero() const { return entries_.empty() && inf_[0] == 0 && inf_[1] == 0; }
  int mult_at(const Place& place) const;
  /// (positive part, negated negative part)
  std::pair<Divisor, Divisor> split_signs() const;

  Divisor operator+(const Divisor& o) const;
  Divisor operator-(const Divisor& o) const;
  Divisor operator-() const;
  Divisor operator*(int k) const;
  friend bool operator==(const Divisor& a, const Divisor& b) { return a.entries_ == b.entries_ && a.inf_ == b.inf_; }

  std::string str() const;

 private:
  HyperellipticCurve curve_;
  std::vector<FiberEntry> entries_;
  std::array<int, 2> inf_{0, 0};
};

/// Pointwise minimum / maximum of two divisors on the same curve.
Divisor min(const Divisor& a, const Divisor& b);
Divisor max(const Divisor& a, const Divisor& b);

/// f = (A(x) + B(x) y) / h(x), h monic, common factors removed.
class MeromorphicFunction {
 public:
  MeromorphicFunction(HyperellipticCurve curve, Poly a, Poly b = {}, Poly h = Poly{1});
  static MeromorphicFunction x(const HyperellipticCurve& c);
  static MeromorphicFunction y(const HyperellipticCurve& c);
  static MeromorphicFunction constant(const HyperellipticCurve& c, const Rational& v);

  const HyperellipticCurve& curve() const { return curve_; }
  const Poly& a() const { return a_; }
  const Poly& b() const { return b_; }
  const Poly& h() const { return h_; }
  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  bool is_constant() const { return b_.is_zero() && a_.degree() <= 0 && h_.degree() == 0; }

  MeromorphicFunction operator+(const MeromorphicFunction& o) const;
  MeromorphicFunction operator-(const MeromorphicFunction& o) const;
  MeromorphicFunction operator*(const MeromorphicFunction& o) const;
  /// Throws DomainError on division by zero.
  MeromorphicFunction operator/(const MeromorphicFunction& o) const;
  MeromorphicFunction operator*(const Rational& s) const;
  friend bool operator==(const MeromorphicFunction& f, const MeromorphicFunction& g) {
    return f.a_ == g.a_ && f.b_ == g.b_ && f.h_ == g.h_;
  }

  std::string str() const;

 private:
  void normalize();
  HyperellipticCurve curve_;
  Poly a_, b_, h_;
};

/// (f) = N_f - P_f. Throws DomainError("undefined divisor") for f = 0.
Divisor divisor_of(const MeromorphicFunction& f);
/// Divisor of the 1-form dx/y.
Divisor canonical_divisor(const HyperellipticCurve& c);
/// Divisor of f dx/y.
Divisor one_form_divisor(const MeromorphicFunction& f);

struct RiemannRochSpace {
  int dimension = 0;
  std::vector<MeromorphicFunction> basis;
};

/// H^0(D) with an explicit basis, by exact linear algebra over monomials.
RiemannRochSpace riemann_roch_space(const Divisor& d);
int h0(const Divisor& d);

struct RiemannRochReport {
  int h0_d = 0;
  int h0_k_minus_d = 0;
  int lhs = 0;  // h0(D) - h0(K - D)
  int rhs = 0;  // deg D - g + 1
  bool ok = false;
};
RiemannRochReport riemann_roch_check(const Divisor& d);

/// D ~ D' iff deg D = deg D' and h0(D - D') > 0.
bool linearly_equivalent(const Divisor& a, const Divisor& b);

struct Pencil {
  int degree = 0;
  MeromorphicFunction f0;
  MeromorphicFunction f1;
  Divisor divisor;     // the complete divisor class host, P_f
  Divisor base_locus;
  int span_dimension = 0;
  bool base_point_free() const { return base_locus.is_zero(); }
};
/// Pencil spanned by {1, f} inside H^0(P_f). Throws DomainError for constant f.
Pencil pencil_of(const MeromorphicFunction& f);

/// Rational points of small height (x = a/b, |a|,|b| <= bound), both sheets.
std::vector<Place> rational_points(const HyperellipticCurve& c, int height_bound);

struct PencilProbeSample {
  Divisor divisor;
  int h0 = 0;
  int equivalence_class = -1;  // index among h0 >= 2 classes, -1 otherwise
  bool contains_g12 = false;  // D ~ g^1_2 + E with E effective
};

struct PencilProbeReport {
  int degree = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<PencilProbeSample> entries;
  int with_h0_ge_2 = 0;
  int distinct_classes = 0;
  bool all_equivalent_to_hyperelliptic = true;
  std::string label = "probe: randomized evidence, not a proof";
};
/// Samples random effective degree-d divisors built from rational points,
/// rational branch points, places at infinity and rational fibres.
PencilProbeReport unique_pencil_probe(const HyperellipticCurve& c, int d, int samples, std::uint64_t seed);

/// h0(2 D) for D = g^1_2.
int h0_of_doubled_pencil(const HyperellipticCurve& c);

}  // namespace spectralab::curve
