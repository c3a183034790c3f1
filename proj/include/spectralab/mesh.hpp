#pragma once

// Closed oriented triangle meshes with intrinsic edge lengths.
//
// Geometry used by the solvers is the per-triangle edge length table, so
// abstract surfaces (flat tori, glued double covers) need no embedding.
// `positions` holds an embedding when there is one, or planar
// fundamental-domain coordinates for tori.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace spectralab::mesh {

using Vec3 = Eigen::Vector3d;

struct ConePoint {
  int vertex = 0;
  int angle_over_2pi = 1;
  friend bool operator==(const ConePoint&, const ConePoint&) = default;
};

struct Mesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
  /// lengths[t][k] is the length of the edge opposite corner k of triangle t.
  std::vector<std::array<double, 3>> lengths;
  std::vector<ConePoint> cone_points;
  /// Sphere-valued map, one unit vector per vertex; empty when absent.
  std::vector<Vec3> projection;
  /// Degree of the projection (0 when absent).
  int projection_degree = 0;
  /// Double covers: sheet of each vertex (0 or 1), -1 for branch vertices.
  std::vector<int> sheet;
  /// Largest distance moved when snapping branch points to vertices.
  double snap_distance = 0.0;

  int vertex_count() const { return static_cast<int>(positions.size()); }
  int face_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const;
  int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
  /// Genus from chi, assuming a closed orientable surface.
  int genus() const { return (2 - euler_characteristic()) / 2; }
  bool has_projection() const { return !projection.empty(); }
};

enum class SphereBase { Icosahedral, Octahedral };

/// Subdivided platonic solid projected to the unit sphere, identity projection.
Mesh build_sphere(int refinement, SphereBase base = SphereBase::Icosahedral);

/// n x n grid on the lattice Z + tau Z, split along the shorter diagonal.
Mesh build_flat_torus(std::complex<double> tau, int n);

struct BranchedCoverSpec {
  std::vector<Vec3> branch_points;
  /// Pairs of indices into branch_points joined by slits; consecutive pairs when empty.
  std::vector<std::array<int, 2>> pairing;
  int refinement = 3;
  SphereBase base = SphereBase::Icosahedral;
};

/// Two copies of the base sphere cut along the slits and cross-glued.
/// Branch vertices are shared by both sheets and become 4 pi cone points.
Mesh build_hyperelliptic_cover(const BranchedCoverSpec& spec);

/// Genus-2 cover branched over the six octahedron vertices.
BranchedCoverSpec octahedral_cover_spec(int refinement);
/// Genus-3 cover branched over the eight cube vertices.
BranchedCoverSpec cube_cover_spec(int refinement);
/// Torus cover branched over four tetrahedron vertices.
BranchedCoverSpec tetrahedral_cover_spec(int refinement);
/// Sphere double cover branched at the poles (the map z^2).
BranchedCoverSpec polar_cover_spec(int refinement);

/// y^2 = x^n - 1: branched over the n-th roots of unity on the equator, plus the
/// north pole (x = infinity) when n is odd. Genus floor((n - 1) / 2).
BranchedCoverSpec roots_of_unity_cover_spec(int n, int refinement);

/// Vertex map of the sheet swap on a double cover.
std::vector<int> cover_involution(const Mesh& m);

struct ConformalDensity {
  std::vector<double> values;
  std::vector<int> zero_set;
};

/// Checks f >= 0 and that zeros are isolated; fills zero_set. Throws InputError.
ConformalDensity make_density(const Mesh& m, std::vector<double> values);
ConformalDensity constant_density(const Mesh& m, double value = 1.0);
/// Square root of the round metric pulled back through the projection,
/// relative to the mesh metric. Throws InputError without a projection.
ConformalDensity pullback_density(const Mesh& m);

double triangle_area(const std::array<double, 3>& l);
double total_area(const Mesh& m);
/// Sum of intrinsic corner angles at each vertex.
std::vector<double> angle_sums(const Mesh& m);
/// Per-vertex neighbour lists.
std::vector<std::vector<int>> vertex_neighbors(const Mesh& m);
bool is_connected(const Mesh& m);

/// Closed, consistently oriented, positive areas. Throws InputError.
void validate(const Mesh& m);

/// Recomputes lengths from positions.
void lengths_from_positions(Mesh& m);

// ---- files

/// ASCII OFF with positions and faces.
void write_off(const Mesh& m, const std::string& path);
/// Reads OFF; lengths come from positions unless the sidecar supplies them.
Mesh read_off(const std::string& path);
/// {"cone_points": [...], "projection": [...], "edge_lengths": [...]}.
void write_sidecar(const Mesh& m, const std::string& path);
void read_sidecar(Mesh& m, const std::string& path);
/// Mesh plus sidecar at path + ".json" when present.
Mesh load_mesh(const std::string& off_path);
void save_mesh(const Mesh& m, const std::string& off_path);

BranchedCoverSpec read_cover_spec(const std::string& path);
void write_cover_spec(const BranchedCoverSpec& spec, const std::string& path);

void write_density(const ConformalDensity& d, const std::string& path);
std::vector<double> read_density_values(const std::string& path);

}  // namespace spectralab::mesh
