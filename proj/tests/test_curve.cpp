#include <random>

#include "curve_oracle.hpp"
#include "doctest.h"
#include "spectralab/curve.hpp"
#include "spectralab/error.hpp"

using namespace spectralab;
using namespace spectralab::curve;

namespace {

HyperellipticCurve x5m1() { return HyperellipticCurve(Poly{-1, 0, 0, 0, 0, 1}); }

// Curves with plenty of rational points, odd and even models, genus 1..4.
std::vector<HyperellipticCurve> fuzz_curves() {
  Poly x{0, 1};
  auto lin = [](int r) { return Poly{-r, 1}; };
  std::vector<HyperellipticCurve> out;
  out.emplace_back(x * lin(1) * lin(-1));                                                  // g = 1
  out.emplace_back(x * lin(1) * lin(-1) * lin(2) * lin(-2));                               // g = 2
  out.emplace_back(lin(1) * lin(-1) * lin(2) * lin(-2) * lin(3) * lin(-3));                // g = 2 even
  out.emplace_back(x * lin(1) * lin(-1) * lin(2) * lin(-2) * lin(3) * lin(-3));            // g = 3
  out.emplace_back(lin(1) * lin(-1) * lin(2) * lin(-2) * lin(3) * lin(-3) * lin(4) * lin(-4));  // g = 3 even
  out.emplace_back(x * lin(1) * lin(-1) * lin(2) * lin(-2) * lin(3) * lin(-3) * lin(4) * lin(-4));  // g = 4
  return out;
}

std::vector<oracle::PlaceMult> random_divisor(const HyperellipticCurve& c, const std::vector<Place>& pool,
                                              std::mt19937_64& rng, int terms, int lo, int hi) {
  std::vector<oracle::PlaceMult> d;
  std::uniform_int_distribution<int> mult(lo, hi);
  for (int i = 0; i < terms; ++i) {
    d.push_back({pool[rng() % pool.size()], mult(rng)});
  }
  (void)c;
  return d;
}

std::vector<Place> place_pool(const HyperellipticCurve& c) {
  std::vector<Place> pool = rational_points(c, 5);
  for (int i = 0; i < c.places_at_infinity(); ++i) pool.push_back(Place::infinity(i));
  return pool;
}

}  // namespace

TEST_CASE("curve construction") {
  CHECK(x5m1().genus() == 2);
  CHECK(x5m1().model() == Model::Odd);
  CHECK(HyperellipticCurve(Poly{-1, 0, 0, 0, 0, 0, 0, 1}).genus() == 3);
  CHECK(HyperellipticCurve(Poly{1, 0, 0, 0, 0, 0, 1}).model() == Model::Even);
  CHECK_THROWS_AS(HyperellipticCurve(Poly{1, -2, 1}), InputError);  // not squarefree
  CHECK_THROWS_AS(HyperellipticCurve(Poly{3}), InputError);
  CHECK_THROWS_AS(HyperellipticCurve(Poly{1, 0, 0, 0, 0, 0, 2}), InputError);  // non-square leading coefficient
}

TEST_CASE("divisor of x and y on y^2 = x^5 - 1") {
  auto c = x5m1();
  Divisor dx = divisor_of(MeromorphicFunction::x(c));
  CHECK(dx == Divisor::fiber(c, 0) - Divisor::point(c, Place::infinity(), 2));
  CHECK(dx.degree() == 0);
  Divisor dy = divisor_of(MeromorphicFunction::y(c));
  Divisor branch(c, {{FiberKind::Branch, Poly{-1, 0, 0, 0, 0, 1}, {}, 1, 0}});
  CHECK(dy == branch - Divisor::point(c, Place::infinity(), 5));
  CHECK(dy.mult_at(Place::branch(1)) == 1);
  CHECK(dy.mult_at(Place::infinity()) == -5);
}

TEST_CASE("divisor of zero is undefined") {
  auto c = x5m1();
  CHECK_THROWS_AS(divisor_of(MeromorphicFunction::constant(c, 0)), DomainError);
}

TEST_CASE("canonical divisor") {
  CHECK(canonical_divisor(x5m1()) == Divisor::point(x5m1(), Place::infinity(), 2));
  HyperellipticCurve g3(Poly{-1, 0, 0, 0, 0, 0, 0, 1});
  CHECK(canonical_divisor(g3) == Divisor::point(g3, Place::infinity(), 4));
  for (const auto& c : fuzz_curves()) {
    CHECK(canonical_divisor(c).degree() == 2 * c.genus() - 2);
    CHECK(h0(canonical_divisor(c)) == c.genus());
    CHECK(h0(Divisor(c)) == 1);
  }
}

TEST_CASE("h0 of small divisors") {
  auto c = x5m1();
  CHECK(h0(Divisor::point(c, Place::infinity(), 2)) == 2);
  CHECK(h0(Divisor::point(c, Place::infinity(), 1)) == 1);
  CHECK(h0(Divisor::point(c, Place::infinity(), -1)) == 0);
  CHECK(h0(Divisor::point(c, Place::infinity(), 5)) == 4);
  for (int g = 2; g <= 4; ++g) {
    Poly p = Poly::monomial(2 * g + 1) - Poly{1};
    CHECK(h0(canonical_divisor(HyperellipticCurve(p))) == g);
  }
}

TEST_CASE("orders agree with local expansions") {
  std::mt19937_64 rng(7);
  for (const auto& c : fuzz_curves()) {
    auto pool = place_pool(c);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int trial = 0; trial < 8; ++trial) {
      Poly a, b, h{1};
      for (int i = 0; i < 4; ++i) a += Poly::monomial(i, coef(rng));
      for (int i = 0; i < 2; ++i) b += Poly::monomial(i, coef(rng));
      h = Poly::linear_root(-coef(rng)) * Poly::linear_root(-coef(rng));
      if (a.is_zero() && b.is_zero()) continue;
      MeromorphicFunction f(c, a, b, h);
      Divisor d = divisor_of(f);
      CHECK(d.degree() == 0);
      for (const auto& pl : pool) {
        auto ch = oracle::chart(c, pl, 40);
        CHECK(d.mult_at(pl) == oracle::order(ch, f));
      }
    }
  }
}

TEST_CASE("h0 matches the local-expansion oracle") {
  std::mt19937_64 rng(11);
  for (const auto& c : fuzz_curves()) {
    auto pool = place_pool(c);
    for (int trial = 0; trial < 12; ++trial) {
      auto d = random_divisor(c, pool, rng, 1 + static_cast<int>(rng() % 3), -1, 3);
      Divisor div = oracle::to_divisor(c, d);
      CAPTURE(div.str());
      CHECK(h0(div) == oracle::h0(c, d));
    }
  }
}

TEST_CASE("Riemann-Roch holds on fuzzed divisors") {
  std::mt19937_64 rng(2024);
  for (const auto& c : fuzz_curves()) {
    auto pool = place_pool(c);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto d = random_divisor(c, pool, rng, 1 + static_cast<int>(rng() % 4), -2, 3);
      Divisor div = oracle::to_divisor(c, d);
      if (trial % 3 == 0) div = div + Divisor::fiber(c, Rational(static_cast<long>(rng() % 7) - 3, 5), 1);
      if (trial % 5 == 0) div = div + Divisor::of_polynomial(c, Poly{2, 0, 1}) * -1;
      auto rep = riemann_roch_check(div);
      if (!rep.ok) ++failures;
      int h = rep.h0_d;
      CHECK(h >= 0);
      if (div.degree() < 0) CHECK(h == 0);
      if (div.degree() >= 0) CHECK(h <= div.degree() + 1);
      if (div.degree() > 2 * c.genus() - 2) CHECK(h == div.degree() - c.genus() + 1);
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("h0 is invariant under linear equivalence") {
  std::mt19937_64 rng(5);
  for (const auto& c : fuzz_curves()) {
    auto pool = place_pool(c);
    for (int trial = 0; trial < 10; ++trial) {
      Divisor div = oracle::to_divisor(c, random_divisor(c, pool, rng, 3, -1, 2));
      MeromorphicFunction f(c, Poly(std::vector<Rational>{Rational(static_cast<long>(rng() % 5) + 1), 1, 1}), Poly{1}, Poly{1, 0, 1});
      Divisor shifted = div + divisor_of(f);
      CHECK(h0(shifted) == h0(div));
      CHECK(linearly_equivalent(div, shifted));
    }
  }
}

TEST_CASE("pointwise min and max") {
  auto c = x5m1();
  Divisor a = Divisor::point(c, Place::infinity(), 3) + Divisor::point(c, Place::branch(1), -1);
  Divisor b = Divisor::point(c, Place::infinity(), 1) + Divisor::point(c, Place::branch(1), 2);
  CHECK(min(a, b) == Divisor::point(c, Place::infinity(), 1) + Divisor::point(c, Place::branch(1), -1));
  CHECK(max(a, b) == Divisor::point(c, Place::infinity(), 3) + Divisor::point(c, Place::branch(1), 2));
}

TEST_CASE("pencils") {
  auto c = x5m1();
  Pencil px = pencil_of(MeromorphicFunction::x(c));
  CHECK(px.degree == 2);
  CHECK(px.base_point_free());
  Pencil px2 = pencil_of(MeromorphicFunction::x(c) * MeromorphicFunction::x(c));
  CHECK(px2.degree == 4);
  Pencil py = pencil_of(MeromorphicFunction::y(c));
  CHECK(py.degree == 5);
  CHECK_THROWS_AS(pencil_of(MeromorphicFunction::constant(c, 3)), DomainError);
}

TEST_CASE("unique pencil probe") {
  auto c = fuzz_curves()[1];
  auto rep = unique_pencil_probe(c, 2, 30, 1);
  CHECK(rep.with_h0_ge_2 > 0);
  CHECK(rep.distinct_classes == 1);
  CHECK(rep.all_equivalent_to_hyperelliptic);
  auto rep1 = unique_pencil_probe(c, 1, 20, 1);
  CHECK(rep1.with_h0_ge_2 == 0);
  auto g3 = fuzz_curves()[3];
  auto rep3 = unique_pencil_probe(g3, 3, 40, 3);
  CHECK(rep3.all_equivalent_to_hyperelliptic);
}

TEST_CASE("h0 of the doubled hyperelliptic pencil") {
  for (int g = 2; g <= 4; ++g) {
    CHECK(h0_of_doubled_pencil(HyperellipticCurve(Poly::monomial(2 * g + 1) - Poly{1})) == 3);
  }
}
