#include <algorithm>
#include <cmath>
#include <map>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "spectralab/error.hpp"
#include "spectralab/mesh.hpp"

using namespace spectralab;
using namespace spectralab::mesh;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("sphere counts") {
  Mesh m0 = build_sphere(0);
  CHECK(m0.vertex_count() == 12);
  CHECK(m0.face_count() == 20);
  CHECK(m0.euler_characteristic() == 2);
  for (int r = 1; r <= 3; ++r) {
    Mesh m = build_sphere(r);
    CHECK(m.face_count() == 20 * (1 << (2 * r)));
    CHECK(m.euler_characteristic() == 2);
    validate(m);
  }
  Mesh oct = build_sphere(2, SphereBase::Octahedral);
  CHECK(oct.face_count() == 8 * 16);
  CHECK(oct.euler_characteristic() == 2);
  CHECK_THROWS_AS(build_sphere(-1), InputError);
}

TEST_CASE("sphere area converges to 4 pi") {
  Mesh m = build_sphere(5);
  CHECK(std::abs(total_area(m) - 4 * kPi) / (4 * kPi) < 0.002);
}

TEST_CASE("flat torus geometry") {
  Mesh sq = build_flat_torus({0.0, 1.0}, 8);
  validate(sq);
  CHECK(sq.euler_characteristic() == 0);
  CHECK(total_area(sq) == doctest::Approx(1.0).epsilon(1e-12));
  Mesh hex = build_flat_torus(std::polar(1.0, kPi / 3), 8);
  validate(hex);
  CHECK(hex.euler_characteristic() == 0);
  CHECK(total_area(hex) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  // Hexagonal lattice splits into equilateral triangles.
  for (const auto& l : hex.lengths) {
    CHECK(l[0] == doctest::Approx(1.0 / 8));
    CHECK(l[1] == doctest::Approx(1.0 / 8));
    CHECK(l[2] == doctest::Approx(1.0 / 8));
  }
  for (double s : angle_sums(hex)) CHECK(s == doctest::Approx(2 * kPi).epsilon(1e-9));
  for (double s : angle_sums(sq)) CHECK(s == doctest::Approx(2 * kPi).epsilon(1e-9));
  CHECK_THROWS_AS(build_flat_torus({1.0, -1.0}, 8), InputError);
  CHECK_THROWS_AS(build_flat_torus({0.0, 1.0}, 2), InputError);
}

TEST_CASE("branched covers have the expected topology") {
  struct Case {
    BranchedCoverSpec spec;
    int chi;
  };
  std::vector<Case> cases{{polar_cover_spec(2), 2},
                          {tetrahedral_cover_spec(2), 0},
                          {octahedral_cover_spec(2), -2},
                          {cube_cover_spec(3), -4}};
  for (const auto& c : cases) {
    Mesh m = build_hyperelliptic_cover(c.spec);
    validate(m);
    CHECK(m.euler_characteristic() == c.chi);
    CHECK(m.euler_characteristic() == 4 - static_cast<int>(c.spec.branch_points.size()));
    CHECK(m.cone_points.size() == c.spec.branch_points.size());
    CHECK(is_connected(m));
    // Intrinsic angles: 2 pi everywhere on the base sphere scale except cones at twice the base angle.
    Mesh base = build_sphere(c.spec.refinement, c.spec.base);
    auto base_sums = angle_sums(base);
    auto sums = angle_sums(m);
    std::vector<int> cone(m.positions.size(), 0);
    for (const auto& cp : m.cone_points) {
      cone[static_cast<size_t>(cp.vertex)] = 1;
      CHECK(cp.angle_over_2pi == 2);
    }
    for (size_t v = 0; v < m.positions.size(); ++v) {
      // Find the matching base vertex by position.
      double best = 1e9;
      size_t bv = 0;
      for (size_t w = 0; w < base.positions.size(); ++w) {
        double d = (base.positions[w] - m.positions[v]).norm();
        if (d < best) {
          best = d;
          bv = w;
        }
      }
      double expect = cone[v] ? 2 * base_sums[bv] : base_sums[bv];
      CHECK(sums[v] == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("octahedral branch points snap exactly") {
  Mesh m = build_hyperelliptic_cover(octahedral_cover_spec(3));
  CHECK(m.snap_distance < 1e-12);
  CHECK(m.genus() == 2);
}

TEST_CASE("cover involution is an isometry commuting with the projection") {
  Mesh m = build_hyperelliptic_cover(octahedral_cover_spec(2));
  auto inv = cover_involution(m);
  std::map<std::array<int, 3>, size_t> tris;
  auto sorted = [](std::array<int, 3> t) {
    std::sort(t.begin(), t.end());
    return t;
  };
  for (size_t t = 0; t < m.triangles.size(); ++t) tris[sorted(m.triangles[t])] = t;
  for (size_t v = 0; v < inv.size(); ++v) {
    CHECK(inv[static_cast<size_t>(inv[v])] == static_cast<int>(v));
    CHECK((m.projection[static_cast<size_t>(inv[v])] - m.projection[v]).norm() < 1e-12);
  }
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    std::array<int, 3> img{};
    for (int k = 0; k < 3; ++k) img[static_cast<size_t>(k)] = inv[static_cast<size_t>(m.triangles[t][static_cast<size_t>(k)])];
    auto it = tris.find(sorted(img));
    REQUIRE(it != tris.end());
    auto a = m.lengths[t], b = m.lengths[it->second];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int k = 0; k < 3; ++k) CHECK(a[static_cast<size_t>(k)] == doctest::Approx(b[static_cast<size_t>(k)]));
  }
}

TEST_CASE("cover errors") {
  BranchedCoverSpec close = octahedral_cover_spec(1);
  close.branch_points[1] = close.branch_points[0];
  CHECK_THROWS_AS(build_hyperelliptic_cover(close), InputError);
  BranchedCoverSpec odd = octahedral_cover_spec(1);
  odd.branch_points.pop_back();
  odd.pairing.clear();
  CHECK_THROWS_AS(build_hyperelliptic_cover(odd), InputError);
  BranchedCoverSpec bad_pair = octahedral_cover_spec(1);
  bad_pair.pairing = {{{0, 1}}, {{0, 2}}, {{4, 5}}};
  CHECK_THROWS_AS(build_hyperelliptic_cover(bad_pair), InputError);
}

TEST_CASE("densities") {
  Mesh s = build_sphere(2);
  auto one = pullback_density(s);
  for (double v : one.values) CHECK(v == 1.0);
  CHECK(one.zero_set.empty());
  Mesh cover = build_hyperelliptic_cover(octahedral_cover_spec(2));
  auto pb = pullback_density(cover);
  std::vector<int> cones;
  for (const auto& c : cover.cone_points) cones.push_back(c.vertex);
  std::sort(cones.begin(), cones.end());
  CHECK(pb.zero_set == cones);
  Mesh torus = build_flat_torus({0, 1}, 4);
  CHECK_THROWS_AS(pullback_density(torus), InputError);
  std::vector<double> bad(s.positions.size(), 1.0);
  bad[0] = -1;
  CHECK_THROWS_AS(make_density(s, bad), InputError);
  std::vector<double> adjacent(s.positions.size(), 1.0);
  auto nbrs = vertex_neighbors(s);
  adjacent[0] = 0;
  adjacent[static_cast<size_t>(nbrs[0][0])] = 0;
  CHECK_THROWS_AS(make_density(s, adjacent), InputError);
}

TEST_CASE("OFF and sidecar round trip") {
  auto dir = std::filesystem::temp_directory_path() / "spectralab_mesh_test";
  std::filesystem::create_directories(dir);
  Mesh cover = build_hyperelliptic_cover(tetrahedral_cover_spec(1));
  std::string path = (dir / "cover.off").string();
  save_mesh(cover, path);
  Mesh back = load_mesh(path);
  CHECK(back.triangles == cover.triangles);
  CHECK(back.cone_points == cover.cone_points);
  CHECK(back.projection.size() == cover.projection.size());
  CHECK(back.projection_degree == 2);
  CHECK(back.euler_characteristic() == 0);

  Mesh torus = build_flat_torus(std::polar(1.0, kPi / 3), 5);
  std::string tpath = (dir / "torus.off").string();
  save_mesh(torus, tpath);
  Mesh tback = load_mesh(tpath);
  CHECK(total_area(tback) == doctest::Approx(total_area(torus)));

  std::string spath = (dir / "spec.json").string();
  write_cover_spec(octahedral_cover_spec(3), spath);
  auto spec = read_cover_spec(spath);
  CHECK(spec.branch_points.size() == 6);
  CHECK(spec.base == SphereBase::Octahedral);
  CHECK(spec.refinement == 3);
  CHECK_THROWS_AS(read_off((dir / "missing.off").string()), InputError);
}

TEST_CASE("roots of unity covers") {
  for (int n : {5, 6, 7, 8}) {
    CAPTURE(n);
    auto m = mesh::build_hyperelliptic_cover(mesh::roots_of_unity_cover_spec(n, 3));
    CHECK(m.genus() == (n - 1) / 2);
    CHECK(m.cone_points.size() == static_cast<size_t>(n % 2 ? n + 1 : n));
    CHECK(m.projection_degree == 2);
  }
  CHECK_THROWS_AS(mesh::roots_of_unity_cover_spec(2, 3), InputError);
}
