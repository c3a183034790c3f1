#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectralab/error.hpp"
#include "spectralab/mesh.hpp"
#include "spectralab/spectral.hpp"

using namespace spectralab;
using namespace spectralab::spectral;
using mesh::Mesh;

namespace {

constexpr double kPi = std::numbers::pi;

int count_in_band(const std::vector<double>& v, double center, double rel) {
  int n = 0;
  for (double x : v) {
    if (std::abs(x - center) <= rel * center) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("assembly identities") {
  Mesh m = mesh::build_sphere(2);
  auto d = mesh::constant_density(m, 1.0);
  auto ops = assemble(m, d);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.vertex_count());
  CHECK((ops.stiffness * ones).norm() < 1e-12);
  CHECK(Eigen::VectorXd(ops.mass * ones).sum() == doctest::Approx(mesh::total_area(m)).epsilon(1e-12));
  CHECK(ops.area == doctest::Approx(mesh::total_area(m)).epsilon(1e-12));
  CHECK((SparseMatrix(ops.stiffness.transpose()) - ops.stiffness).norm() < 1e-12);

  auto d3 = mesh::constant_density(m, 3.0);
  auto ops3 = assemble(m, d3);
  CHECK((ops3.stiffness - ops.stiffness).norm() < 1e-12);
  CHECK((ops3.mass - 9.0 * ops.mass).norm() < 1e-12 * ops3.mass.norm());

  auto tp = assemble(m, d, MassRule::ThreePoint);
  CHECK(tp.area == doctest::Approx(ops.area).epsilon(1e-12));
}

TEST_CASE("assembly errors") {
  Mesh m = mesh::build_sphere(1);
  Mesh bad = m;
  bad.lengths[0] = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(assemble(bad, mesh::constant_density(bad)), InputError);
  mesh::ConformalDensity zero;
  zero.values.assign(static_cast<size_t>(m.vertex_count()), 1.0);
  for (int v : m.triangles[0]) zero.values[static_cast<size_t>(v)] = 0.0;
  CHECK_THROWS_AS(assemble(m, zero), InputError);
}

TEST_CASE("round sphere spectrum") {
  Mesh m = mesh::build_sphere(5);
  auto s = spectrum(m, mesh::constant_density(m), 4);
  for (int i = 1; i <= 3; ++i) CHECK(std::abs(s.eigenvalues[static_cast<size_t>(i)] - 2.0) < 0.02);
  CHECK(std::abs(s.eigenvalues[4] - 6.0) < 0.06);
  CHECK(std::abs(s.eigenvalues[0]) <= 1e-8 * s.eigenvalues[1]);
  CHECK(std::abs(s.normalized[1] - 8 * kPi) < 0.01 * 8 * kPi);
  for (size_t i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
  for (double r : s.residuals) CHECK(r <= 1e-8);
  // The lowest eigenvector is constant.
  Eigen::VectorXd u0 = s.vectors.col(0);
  CHECK((u0.array() - u0.mean()).abs().maxCoeff() < 1e-6 * std::abs(u0.mean()));
}

TEST_CASE("flat torus spectra") {
  Mesh sq = mesh::build_flat_torus({0, 1}, 64);
  auto s = spectrum(sq, mesh::constant_density(sq), 5);
  CHECK(std::abs(s.eigenvalues[1] - 4 * kPi * kPi) < 0.01 * 4 * kPi * kPi);
  CHECK(count_in_band(s.eigenvalues, s.eigenvalues[1], 0.01) == 4);

  Mesh hex = mesh::build_flat_torus(std::polar(1.0, kPi / 3), 48);
  auto h = spectrum(hex, mesh::constant_density(hex), 7);
  const double target = 8 * kPi * kPi / std::sqrt(3.0);
  CHECK(std::abs(h.normalized[1] - target) < 0.01 * target);
  CHECK(count_in_band(h.normalized, h.normalized[1], 0.01) == 6);
}

TEST_CASE("counting function") {
  Mesh m = mesh::build_sphere(4);
  auto s = spectrum(m, mesh::constant_density(m), 6);
  CHECK(counting_function(s, 0.0) == 0);
  CHECK(counting_function(s, 2.0) == 1);
  CHECK(counting_function(s, 2.5) == 4);
  int prev = 0;
  for (double l = 0; l < 6.0; l += 0.25) {
    int n = counting_function(s, l);
    CHECK(n >= prev);
    prev = n;
  }
  CHECK_THROWS_AS(counting_function(s, 100.0), DomainError);
}

TEST_CASE("Yang-Yau check") {
  auto r0 = yang_yau_check(0, 8 * kPi, 0.0);
  CHECK(r0.bound == doctest::Approx(8 * kPi));
  CHECK(r0.margin == doctest::Approx(0.0));
  CHECK(r0.pass);
  CHECK_FALSE(r0.strict_expected);
  auto r1 = yang_yau_check(1, 8 * kPi * kPi / std::sqrt(3.0), 0.0);
  CHECK(r1.bound == doctest::Approx(16 * kPi));
  CHECK(r1.margin > 0);
  CHECK(r1.strict_expected);
  auto r2 = yang_yau_check(2, 16 * kPi, 0.0);
  CHECK(r2.bound == doctest::Approx(16 * kPi));
  CHECK_FALSE(r2.strict_expected);
  auto r3 = yang_yau_check(3, 1.0, 0.0);
  CHECK(r3.bound == doctest::Approx(24 * kPi));
  CHECK(r3.strict_expected);
  CHECK_FALSE(yang_yau_check(0, 8 * kPi * 1.02, 0.01 * 8 * kPi).pass);
}

TEST_CASE("Schrodinger index") {
  Mesh m = mesh::build_sphere(4);
  auto d = mesh::constant_density(m);
  std::vector<double> zero(m.triangles.size(), 0.0), two(m.triangles.size(), 2.0), one(m.triangles.size(), 1.0);
  auto r0 = schrodinger_index(m, d, zero, 0.1);
  CHECK(r0.index == 0);
  CHECK(r0.nullity == 1);
  auto r2 = schrodinger_index(m, d, two, 0.1);
  CHECK(r2.index == 1);
  CHECK(r2.nullity == 3);
  auto r1 = schrodinger_index(m, d, one, 0.1);
  CHECK(r1.index == 1);
  CHECK(r1.nullity == 0);
  // Nullity is monotone under band widening.
  auto wide = schrodinger_index(m, d, two, 0.5);
  CHECK(wide.index + wide.nullity >= r2.nullity);
}

TEST_CASE("index of maps and the two routes") {
  Mesh sphere = mesh::build_sphere(4);
  auto id = index_of_map(sphere, 0.1);
  CHECK(id.index == 1);
  CHECK(id.nullity == 3);

  Mesh z2 = mesh::build_hyperelliptic_cover(mesh::polar_cover_spec(4));
  auto r = index_of_map(z2, 0.1);
  CHECK(r.index >= 2);
  CHECK(r.index == 3);  // regression value: 0 and the double eigenvalue near 3/4
  CHECK(r.nullity == 3);

  Mesh g2 = mesh::build_hyperelliptic_cover(mesh::octahedral_cover_spec(3));
  for (const Mesh* m : {&sphere, &z2, &g2}) {
    auto d = mesh::pullback_density(*m);
    auto counted = index_of_map(*m, 0.1);
    auto potential = schrodinger_index(*m, d, pullback_potential(*m, d), 0.1);
    CHECK(counted.index == potential.index);
    CHECK(counted.nullity == potential.nullity);
  }
}

TEST_CASE("pullback potential of the identity is 2") {
  Mesh m = mesh::build_sphere(2);
  for (double v : pullback_potential(m, mesh::pullback_density(m))) CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("lambda1 degree bound") {
  Mesh sphere = mesh::build_sphere(4);
  auto r = lambda1_degree_bound_check(sphere, mesh::constant_density(sphere), 0.01 * 8 * kPi);
  CHECK(r.pass);
  CHECK(std::abs(r.lambda1_bar - 8 * kPi) < 0.01 * 8 * kPi);

  Mesh g2 = mesh::build_hyperelliptic_cover(mesh::octahedral_cover_spec(4));
  auto pb = lambda1_degree_bound_check(g2, mesh::pullback_density(g2), 0.01 * 16 * kPi);
  CHECK(pb.pass);
  CHECK(pb.degree == 2);

  std::vector<double> bump(static_cast<size_t>(g2.vertex_count()));
  auto base = mesh::pullback_density(g2);
  for (size_t v = 0; v < bump.size(); ++v) {
    double z = g2.projection[v].z();
    bump[v] = base.values[v] * (1.0 + 0.8 * std::exp(-8.0 * (1.0 - z) * (1.0 - z)) * (g2.sheet[v] == 0 ? 1.0 : 0.2));
  }
  auto bumped = lambda1_degree_bound_check(g2, mesh::make_density(g2, bump), 0.01 * 16 * kPi);
  CHECK(bumped.pass);
  CHECK(bumped.strict);
}

TEST_CASE("scale invariance and refinement") {
  Mesh m = mesh::build_sphere(3);
  auto a = spectrum(m, mesh::constant_density(m, 1.0), 5);
  auto b = spectrum(m, mesh::constant_density(m, 2.5), 5);
  for (int i = 1; i <= 5; ++i) {
    CHECK(std::abs(a.normalized[static_cast<size_t>(i)] - b.normalized[static_cast<size_t>(i)]) <
          1e-7 * a.normalized[static_cast<size_t>(i)]);
  }
  std::vector<double> err;
  for (int r = 2; r <= 5; ++r) {
    Mesh s = mesh::build_sphere(r);
    err.push_back(std::abs(spectrum(s, mesh::constant_density(s), 1).eigenvalues[1] - 2.0));
  }
  // Second order: each refinement divides the error by about 4.
  for (size_t i = 1; i < err.size(); ++i) {
    double ratio = err[i - 1] / err[i];
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("solver failure carries diagnostics") {
  Mesh m = mesh::build_sphere(3);
  auto ops = assemble(m, mesh::constant_density(m));
  SolverOptions o;
  o.max_iters = 1;
  o.tol = 1e-14;
  try {
    eigen_solve_count(ops.stiffness, ops.mass, 6, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > 1e-14);
  }
}
