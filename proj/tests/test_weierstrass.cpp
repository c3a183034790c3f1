#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spectralab/error.hpp"
#include "spectralab/mesh.hpp"
#include "spectralab/spectral.hpp"
#include "spectralab/weierstrass.hpp"

using namespace spectralab;
using namespace spectralab::weierstrass;
using curve::Divisor;
using curve::HyperellipticCurve;
using curve::MeromorphicFunction;
using spectralab::Poly;

namespace {

constexpr double kPi = std::numbers::pi;

double dist(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

// Closed-form Enneper surface with basepoint 0.
Vec3 enneper_exact(Complex z) {
  Complex z3 = z * z * z;
  return {std::real(z - z3 / 3.0), std::real(Complex(0, 1) * (z + z3 / 3.0)), std::real(z * z)};
}

HyperellipticCurve curve_from_roots(const std::vector<long>& rs) {
  Poly p{1};
  for (long r : rs) p = p * Poly::linear_root(r);
  return HyperellipticCurve(p);
}

}  // namespace

TEST_CASE("rational function basics") {
  RationalFunction f{CPoly{{1.0, 0.0, 1.0}}, CPoly{{0.0, 0.0, 1.0}}};  // (1 + z^2) / z^2
  CHECK(f.order_at(0.0) == -2);
  CHECK(f.order_at(Complex(0, 1)) == 1);
  CHECK(f.order_at(2.0) == 0);
  auto [low, c] = f.laurent(0.0, 4);
  CHECK(low == -2);
  CHECK(std::abs(c[0] - 1.0) < 1e-14);
  CHECK(std::abs(c[1]) < 1e-14);
  CHECK(std::abs(c[2] - 1.0) < 1e-14);
  auto poles = f.poles();
  REQUIRE(poles.size() == 1);
  CHECK(std::abs(poles[0]) < 1e-12);

  // A cancelled factor is not a pole; a multiple root is found once.
  RationalFunction g{CPoly{{-1.0, 1.0}}, CPoly{{1.0, -3.0, 3.0, -1.0}}};  // (z-1) / -(z-1)^3
  auto gp = g.poles();
  REQUIRE(gp.size() == 1);
  CHECK(std::abs(gp[0] - 1.0) < 1e-10);
  CHECK(g.order_at(gp[0]) == -2);
}

TEST_CASE("stereographic projection") {
  auto s = stereographic(0.0);
  CHECK(s[2] == doctest::Approx(-1.0));
  auto e = stereographic(1.0);
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[2] == doctest::Approx(0.0));
  auto big = stereographic(1e8);
  CHECK(big[2] == doctest::Approx(1.0));
}

TEST_CASE("planar branching divisors") {
  CHECK(branching_divisor(enneper()).total_order == 0);
  auto cat = branching_divisor(catenoid());
  CHECK(cat.total_order == 0);
  CHECK(cat.identity_holds);

  PlanarData cubic{identity_function(), {CPoly{{0.0, 0.0, 1.0}}, CPoly{{1.0}}}, {}, "z^2 dz"};
  auto b = branching_divisor(cubic);
  REQUIRE(b.points.size() == 1);
  CHECK(std::abs(b.points[0].z) < 1e-12);
  CHECK(b.points[0].multiplicity == 2);
  CHECK(b.identity_holds);

  // Gauss map 1/z: a double zero of h is cancelled by the pole of phi.
  RationalFunction inv{CPoly{{1.0}}, CPoly{{0.0, 1.0}}};
  PlanarData cancel{inv, {CPoly{{0.0, 0.0, 1.0}}, CPoly{{1.0}}}, {}, "inverse"};
  auto bc = branching_divisor(cancel);
  CHECK(bc.total_order == 0);
  CHECK(bc.identity_holds);

  PlanarData bad{inv, constant_function(1.0), {}, "bad"};
  CHECK_THROWS_WITH_AS(branching_divisor(bad), "not an immersion datum", DomainError);
  bad.punctures.push_back(0.0);
  CHECK(branching_divisor(bad).total_order == 0);

  PlanarData flat{constant_function(0.5), constant_function(1.0), {}, "flat"};
  CHECK_THROWS_AS(branching_divisor(flat), DomainError);
}

TEST_CASE("catenoid and helicoid periods") {
  for (double r : {0.5, 1.0, 3.0}) {
    auto p = period(catenoid(), Loop::circle(0.0, r));
    for (size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(p.quadrature[k]) < 1e-8);
      CHECK(std::abs(p.quadrature[k] - p.residue[k]) < 1e-8);
    }
    auto h = period(helicoid(), Loop::circle(0.0, r));
    CHECK(std::abs(h.quadrature[0]) < 1e-8);
    CHECK(std::abs(h.quadrature[1]) < 1e-8);
    CHECK(std::abs(h.quadrature[2] + 4 * kPi) < 1e-8);
    for (size_t k = 0; k < 3; ++k) CHECK(std::abs(h.quadrature[k] - h.residue[k]) < 1e-8);
  }
  // Off-centre circle still enclosing the puncture.
  auto h = period(helicoid(), Loop::circle(Complex(0.3, -0.2), 1.0));
  CHECK(std::abs(h.quadrature[2] + 4 * kPi) < 1e-8);
}

TEST_CASE("period properties") {
  // Null-homotopic loop.
  auto z = period(helicoid(), Loop::circle(2.0, 0.5));
  for (double v : z.quadrature) CHECK(std::abs(v) < 1e-9);
  for (double v : z.residue) CHECK(v == 0.0);

  // A square around the puncture is homologous to the circle.
  Loop square = Loop::polygon({Complex(1, 1), Complex(-1, 1), Complex(-1, -1), Complex(1, -1)});
  auto sq = period(helicoid(), square);
  CHECK(std::abs(sq.quadrature[2] + 4 * kPi) < 1e-8);
  CHECK_FALSE(sq.residue_available);

  // Additivity: the loop traversed twice.
  Loop twice = Loop::polygon({Complex(1, 1), Complex(-1, 1), Complex(-1, -1), Complex(1, -1), Complex(1, 1),
                              Complex(-1, 1), Complex(-1, -1), Complex(1, -1)});
  CHECK(std::abs(period(helicoid(), twice).quadrature[2] + 8 * kPi) < 1e-8);

  // Two punctures: residues add.
  PlanarData two{identity_function(), {CPoly{{Complex(0, 1)}}, CPoly{{0.0, -1.0, 0.0, 1.0}}}, {0.0, 1.0, -1.0}, "two"};
  auto big = period(two, Loop::circle(0.0, 2.0));
  for (size_t k = 0; k < 3; ++k) CHECK(std::abs(big.quadrature[k] - big.residue[k]) < 1e-8);

  CHECK_THROWS_AS(period(catenoid(), Loop::circle(1.0, 1.0)), DomainError);
  CHECK_THROWS_AS(period(catenoid(), Loop::polygon({Complex(-1, 0), Complex(1, 0), Complex(0, 1)})), DomainError);
  CHECK_THROWS_AS(period(catenoid(), Loop::circle(0.0, -1.0)), InputError);
}

TEST_CASE("Enneper immersion matches the closed form") {
  auto d = enneper();
  CHECK(dist(evaluate_immersion(d, 0.0, 0.0), {0, 0, 0}) == 0.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    Complex p(u(rng), u(rng));
    CHECK(dist(evaluate_immersion(d, 0.0, p), enneper_exact(p)) < 1e-10);
  }
}

TEST_CASE("catenoid radius law") {
  auto d = catenoid();
  const Complex base = 1.0;
  std::vector<Complex> pts;
  for (double r : {0.3, 0.7, 1.0, 1.6, 2.5})
    for (double t : {0.0, 0.9, 2.0, 3.0, -2.5}) pts.push_back(std::polar(r, t));
  auto xs = evaluate_immersion(d, base, pts);
  // Axis through (2, 0); the waist radius at height 0 gives the scale.
  auto radius = [](const Vec3& x) { return std::hypot(x[0] - 2.0, x[1]); };
  const double c = radius(evaluate_immersion(d, base, Complex(0, 1)));
  CHECK(c == doctest::Approx(2.0).epsilon(1e-10));
  for (auto& x : xs) CHECK(std::abs(radius(x) - c * std::cosh(x[2] / c)) < 1e-6);

  // Homotopic paths agree; the loop around 0 changes nothing for the catenoid.
  Complex p(-0.5, 0.8);
  auto direct = evaluate_immersion(d, base, p);
  auto around = evaluate_immersion(d, base, p, {Complex(1, -1), Complex(-1, -1), Complex(-1, 0.5)});
  CHECK(dist(direct, around) < 1e-9);
  CHECK_THROWS_AS(evaluate_immersion(d, base, Complex(-1, 0)), DomainError);
}

TEST_CASE("helicoid is multivalued") {
  auto d = helicoid();
  Complex p(-0.5, 0.8);
  auto upper = evaluate_immersion(d, 1.0, p, {Complex(0, 1)});
  auto lower = evaluate_immersion(d, 1.0, p, {Complex(0, -1), Complex(-1, -1)});
  CHECK(std::abs((lower[2] - upper[2]) - 4 * kPi) < 1e-8);
  CHECK(std::abs(lower[0] - upper[0]) < 1e-9);
}

TEST_CASE("local identities") {
  auto en = local_identity_check(enneper(), Complex(-1, -1), Complex(1, 1), 50, 1e-5);
  CHECK(en.samples.size() == 2500);
  CHECK(en.failures == 0);

  auto cat = local_identity_check(catenoid(), Complex(-2, -2), Complex(2, 2), 12, 1e-5);
  CHECK(cat.failures == 0);
  CHECK(cat.worst_normal < 1e-6);
  CHECK(cat.samples.size() > 100);

  auto hel = local_identity_check(helicoid(), Complex(0.2, 0.2), Complex(2, 1), 8, 1e-5);
  CHECK(hel.failures == 0);

  // A coarse stencil is reported per sample rather than thrown.
  auto coarse = local_identity_check(enneper(), Complex(-1, -1), Complex(1, 1), 5, 1e-5, 0.3);
  CHECK(coarse.failures > 0);
  CHECK(coarse.samples.size() == 25);
}

TEST_CASE("curve branching divisor") {
  HyperellipticCurve c(Poly::monomial(7) - Poly{1});
  REQUIRE(c.genus() == 3);
  auto x = MeromorphicFunction::x(c);
  auto one = MeromorphicFunction::constant(c, 1);
  auto b = branching_divisor(CurveData{x, one});
  CHECK(b.b.is_zero());
  CHECK(b.identity_holds);
  CHECK(b.total_order == 0);
  auto k_minus = curve::canonical_divisor(c) - b.polar * 2;
  CHECK(k_minus.is_zero());
  CHECK(curve::h0(curve::canonical_divisor(c) - b.b) == 3);

  // Genus 2 has no room for a degree-2 Gauss map.
  HyperellipticCurve g2(Poly::monomial(5) - Poly{1});
  CHECK_THROWS_AS(require_section_space(MeromorphicFunction::x(g2)), DomainError);
  CHECK_THROWS_AS(branching_divisor(CurveData{MeromorphicFunction::x(g2), MeromorphicFunction::constant(g2, 1)}),
                  DomainError);

  // omega with a pole is rejected.
  auto pole = one / (x - MeromorphicFunction::constant(c, 2));
  CHECK_THROWS_AS(branching_divisor(CurveData{x, pole}), DomainError);
}

TEST_CASE("fuzzed valid pairs satisfy B = (omega) - 2 P_phi") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> small(-3, 3);
  std::vector<std::vector<long>> roots = {{-3, -2, -1, 0, 1, 2, 3}, {-3, -2, -1, 1, 2, 3, 4}, {-4, -3, -2, -1, 0, 1, 2, 3, 4}};
  int checked = 0;
  for (auto& rs : roots) {
    HyperellipticCurve c = curve_from_roots(rs);
    auto x = MeromorphicFunction::x(c);
    auto k0 = curve::canonical_divisor(c);
    for (int trial = 0; trial < 8; ++trial) {
      int a = small(rng), s = small(rng);
      MeromorphicFunction phi = x + MeromorphicFunction::constant(c, s);
      if (trial % 3 == 1) phi = MeromorphicFunction::constant(c, 1) / (x - MeromorphicFunction::constant(c, a));
      if (trial % 3 == 2 && a != s)
        phi = (x + MeromorphicFunction::constant(c, s)) / (x - MeromorphicFunction::constant(c, a));
      auto polar = divisor_of(phi).split_signs().second;
      auto space = curve::riemann_roch_space(k0 - polar * 2);
      REQUIRE(space.dimension >= 1);
      MeromorphicFunction f = space.basis[0];
      for (size_t i = 1; i < space.basis.size(); ++i) f = f + space.basis[i] * Rational(small(rng));
      if (f.is_zero()) f = space.basis[0];
      auto br = branching_divisor(CurveData{phi, f});
      CHECK(br.identity_holds);
      CHECK(br.b.is_effective());
      CHECK(br.total_order == 2 * c.genus() - 2 - 2 * polar.degree());
      ++checked;
    }
  }
  CHECK(checked == 24);
}

TEST_CASE("index bound ledger") {
  auto torus = index_bound_check(1, 0);
  CHECK(torus.bound == doctest::Approx(-1.0 / 3.0));
  CHECK(torus.pass);

  mesh::Mesh cube = mesh::build_hyperelliptic_cover(mesh::cube_cover_spec(3));
  REQUIRE(cube.genus() == 3);
  auto ind = spectral::index_of_map(cube, 0.05);
  auto g3 = index_bound_check(3, ind);
  CHECK(g3.bound == doctest::Approx(1.0));
  CHECK(ind.index >= 1);
  CHECK(g3.pass);

  // Mutations: the verdict follows 3 ind >= 2 h0 - 3 exactly.
  for (int h0 = 0; h0 <= 8; ++h0) {
    for (int idx = 0; idx <= 4; ++idx) CHECK(index_bound_check(h0, idx).pass == (3 * idx >= 2 * h0 - 3));
  }
  CHECK_FALSE(index_bound_check(4, 1).pass);
  CHECK(index_bound_check(4, 2).pass);
}
