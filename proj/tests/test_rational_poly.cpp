#include "doctest.h"
#include "spectralab/error.hpp"
#include "spectralab/rational_linalg.hpp"
#include "spectralab/rational_poly.hpp"

using namespace spectralab;

TEST_CASE("parse rationals") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-7/4") == Rational(-7, 4));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK_THROWS_AS(parse_rational(""), InputError);
}

TEST_CASE("division and gcd") {
  Poly a{-1, 0, 0, 0, 0, 1};  // x^5 - 1
  Poly b{-1, 1};              // x - 1
  auto [q, r] = divmod(a, b);
  CHECK(r.is_zero());
  CHECK(q == Poly({1, 1, 1, 1, 1}));
  CHECK(gcd(a, a.derivative()) == Poly{1});
  CHECK(gcd(Poly{-1, 0, 1}, Poly{1, 1}) == Poly{1, 1});
  Poly inv = inverse_mod(Poly{0, 1}, Poly{1, 0, 1});  // x^-1 mod x^2+1 = -x
  CHECK(inv == Poly({0, -1}));
}

TEST_CASE("squarefree decomposition reconstructs the polynomial") {
  Poly p = Poly{-1, 1}.pow(3) * Poly{1, 0, 1} * Poly{2, 1}.pow(2);
  auto parts = squarefree_decomposition(p);
  Poly back{1};
  for (const auto& f : parts) back *= f.factor.pow(f.multiplicity);
  CHECK(back == p.monic());
  CHECK(valuation(p, Poly{-1, 1}) == 3);
  CHECK(valuation(p, Poly{2, 1}) == 2);
  CHECK_FALSE(is_squarefree(p));
}

TEST_CASE("rational sqrt") {
  Rational r;
  CHECK(rational_sqrt(Rational(9, 4), r));
  CHECK(r == Rational(3, 2));
  CHECK_FALSE(rational_sqrt(Rational(2), r));
  CHECK_FALSE(rational_sqrt(Rational(-4), r));
}

TEST_CASE("rank and nullspace") {
  RationalMatrix m{{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
  CHECK(rank(m) == 2);
  auto ns = nullspace(m, 3);
  REQUIRE(ns.size() == 1);
  for (const auto& row : m) {
    Rational dot = 0;
    for (size_t i = 0; i < 3; ++i) dot += row[i] * ns[0][i];
    CHECK(dot == 0);
  }
}
