#include "spectralab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <utility>

#include "spectralab/error.hpp"

namespace spectralab::mesh {

namespace {

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Mesh platonic(SphereBase base) {
  Mesh m;
  if (base == SphereBase::Octahedral) {
    m.positions = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return m;
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  m.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                 {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : m.positions) p.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  return m;
}

void subdivide(Mesh& m) {
  std::map<Edge, int> mid;
  auto midpoint = [&](int a, int b) {
    auto [it, fresh] = mid.try_emplace(undirected(a, b), 0);
    if (fresh) {
      it->second = static_cast<int>(m.positions.size());
      m.positions.push_back((m.positions[static_cast<size_t>(a)] + m.positions[static_cast<size_t>(b)]).normalized());
    }
    return it->second;
  };
  std::vector<std::array<int, 3>> out;
  out.reserve(m.triangles.size() * 4);
  for (const auto& t : m.triangles) {
    int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    out.push_back({t[0], ab, ca});
    out.push_back({ab, t[1], bc});
    out.push_back({ca, bc, t[2]});
    out.push_back({ab, bc, ca});
  }
  m.triangles = std::move(out);
}

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

// Angular distance from unit vector q to the minor great-circle arc a..b.
double arc_distance(const Vec3& q, const Vec3& a, const Vec3& b) {
  Vec3 n = a.cross(b);
  if (n.norm() < 1e-12) return std::min(angle_between(q, a), angle_between(q, b));
  n.normalize();
  Vec3 qp = q - q.dot(n) * n;
  if (qp.norm() > 1e-14 && a.cross(qp).dot(n) >= 0 && qp.cross(b).dot(n) >= 0) {
    return std::asin(std::min(1.0, std::abs(q.dot(n))));
  }
  return std::min(angle_between(q, a), angle_between(q, b));
}

// Vertex path from s to t following the arc between their positions.
std::vector<int> slit_path(const Mesh& m, const std::vector<std::vector<int>>& nbrs, int s, int t,
                           const std::vector<bool>& blocked) {
  const Vec3& a = m.positions[static_cast<size_t>(s)];
  const Vec3& b = m.positions[static_cast<size_t>(t)];
  const bool antipodal = a.cross(b).norm() < 1e-9;
  std::vector<double> dist(m.positions.size(), std::numeric_limits<double>::infinity());
  std::vector<int> prev(m.positions.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<size_t>(s)] = 0;
  pq.push({0, s});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[static_cast<size_t>(v)]) continue;
    if (v == t) break;
    for (int w : nbrs[static_cast<size_t>(v)]) {
      if (w != t && blocked[static_cast<size_t>(w)]) continue;
      const Vec3& pv = m.positions[static_cast<size_t>(v)];
      const Vec3& pw = m.positions[static_cast<size_t>(w)];
      double cost = (pv - pw).norm();
      if (!antipodal) cost += 4.0 * arc_distance((pv + pw).normalized(), a, b);
      if (dist[static_cast<size_t>(v)] + cost < dist[static_cast<size_t>(w)]) {
        dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + cost;
        prev[static_cast<size_t>(w)] = v;
        pq.push({dist[static_cast<size_t>(w)], w});
      }
    }
  }
  if (prev[static_cast<size_t>(t)] < 0) throw InputError("slits intersect: no free path between branch points");
  std::vector<int> path{t};
  while (path.back() != s) path.push_back(prev[static_cast<size_t>(path.back())]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Corner index of vertex v in triangle t, or -1.
int corner_of(const std::array<int, 3>& t, int v) {
  for (int k = 0; k < 3; ++k) {
    if (t[static_cast<size_t>(k)] == v) return k;
  }
  return -1;
}

}  // namespace

int Mesh::edge_count() const {
  std::set<Edge> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) edges.insert(undirected(t[static_cast<size_t>(k)], t[static_cast<size_t>((k + 1) % 3)]));
  }
  return static_cast<int>(edges.size());
}

void lengths_from_positions(Mesh& m) {
  m.lengths.resize(m.triangles.size());
  for (size_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = m.positions[static_cast<size_t>(t[static_cast<size_t>((k + 1) % 3)])];
      const Vec3& q = m.positions[static_cast<size_t>(t[static_cast<size_t>((k + 2) % 3)])];
      m.lengths[i][static_cast<size_t>(k)] = (p - q).norm();
    }
  }
}

Mesh build_sphere(int refinement, SphereBase base) {
  if (refinement < 0) throw InputError("refinement must be >= 0");
  Mesh m = platonic(base);
  for (int r = 0; r < refinement; ++r) subdivide(m);
  lengths_from_positions(m);
  m.projection = m.positions;
  m.projection_degree = 1;
  return m;
}

Mesh build_flat_torus(std::complex<double> tau, int n) {
  if (!(tau.imag() > 0)) throw InputError("torus modulus needs Im(tau) > 0");
  if (n < 3) throw InputError("torus grid needs n >= 3");
  Mesh m;
  auto id = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::complex<double> z = (static_cast<double>(i) + static_cast<double>(j) * tau) / static_cast<double>(n);
      m.positions.emplace_back(z.real(), z.imag(), 0.0);
    }
  }
  const std::complex<double> e1 = 1.0 / static_cast<double>(n), e2 = tau / static_cast<double>(n);
  const bool main_diagonal = std::abs(e1 + e2) <= std::abs(e2 - e1);
  // Triangle corners as lattice offsets; lengths from offset differences.
  using Offset = std::array<std::array<int, 2>, 3>;
  std::vector<Offset> cells;
  if (main_diagonal) {
    cells = {Offset{{{0, 0}, {1, 0}, {1, 1}}}, Offset{{{0, 0}, {1, 1}, {0, 1}}}};
  } else {
    cells = {Offset{{{0, 0}, {1, 0}, {0, 1}}}, Offset{{{1, 0}, {1, 1}, {0, 1}}}};
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (const auto& c : cells) {
        std::array<int, 3> t{};
        std::array<double, 3> l{};
        for (int k = 0; k < 3; ++k) {
          t[static_cast<size_t>(k)] = id(i + c[static_cast<size_t>(k)][0], j + c[static_cast<size_t>(k)][1]);
          const auto& p = c[static_cast<size_t>((k + 1) % 3)];
          const auto& q = c[static_cast<size_t>((k + 2) % 3)];
          l[static_cast<size_t>(k)] = std::abs(static_cast<double>(p[0] - q[0]) * e1 + static_cast<double>(p[1] - q[1]) * e2);
        }
        m.triangles.push_back(t);
        m.lengths.push_back(l);
      }
    }
  }
  return m;
}

std::vector<std::vector<int>> vertex_neighbors(const Mesh& m) {
  std::vector<std::set<int>> sets(m.positions.size());
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[static_cast<size_t>(k)], b = t[static_cast<size_t>((k + 1) % 3)];
      sets[static_cast<size_t>(a)].insert(b);
      sets[static_cast<size_t>(b)].insert(a);
    }
  }
  std::vector<std::vector<int>> out;
  out.reserve(sets.size());
  for (auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

bool is_connected(const Mesh& m) {
  if (m.positions.empty()) return false;
  auto nbrs = vertex_neighbors(m);
  std::vector<bool> seen(m.positions.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  size_t count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : nbrs[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == m.positions.size();
}

Mesh build_hyperelliptic_cover(const BranchedCoverSpec& spec) {
  const size_t nb = spec.branch_points.size();
  if (nb < 2 || nb % 2 != 0) throw InputError("branched cover needs an even number (>= 2) of branch points");
  Mesh base = build_sphere(spec.refinement, spec.base);
  const auto nbrs = vertex_neighbors(base);

  // Snap branch points to vertices.
  std::vector<int> bv;
  double snap = 0.0;
  for (const auto& raw : spec.branch_points) {
    if (raw.norm() < 1e-12) throw InputError("branch point must be a nonzero 3-vector");
    Vec3 p = raw.normalized();
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t v = 0; v < base.positions.size(); ++v) {
      double d = (base.positions[v] - p).norm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(v);
      }
    }
    snap = std::max(snap, bd);
    bv.push_back(best);
  }
  std::vector<bool> is_branch(base.positions.size(), false);
  for (int v : bv) {
    if (is_branch[static_cast<size_t>(v)]) throw InputError("branch points closer than mesh resolution");
    is_branch[static_cast<size_t>(v)] = true;
  }
  for (int v : bv) {
    for (int w : nbrs[static_cast<size_t>(v)]) {
      if (is_branch[static_cast<size_t>(w)]) throw InputError("branch points closer than mesh resolution");
    }
  }

  std::vector<std::array<int, 2>> pairing = spec.pairing;
  if (pairing.empty()) {
    for (size_t i = 0; i < nb; i += 2) pairing.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  }
  if (pairing.size() * 2 != nb) throw InputError("slit pairing must cover every branch point once");
  {
    std::vector<int> used(nb, 0);
    for (const auto& pr : pairing) {
      for (int i : pr) {
        if (i < 0 || static_cast<size_t>(i) >= nb) throw InputError("slit pairing index out of range");
        ++used[static_cast<size_t>(i)];
      }
    }
    for (int u : used) {
      if (u != 1) throw InputError("slit pairing must cover every branch point once");
    }
  }

  // Slits as vertex paths; interior vertices must be disjoint from everything else.
  std::vector<bool> blocked = is_branch;
  std::vector<std::vector<int>> paths;
  for (const auto& pr : pairing) {
    int s = bv[static_cast<size_t>(pr[0])], t = bv[static_cast<size_t>(pr[1])];
    auto path = slit_path(base, nbrs, s, t, blocked);
    for (size_t i = 1; i + 1 < path.size(); ++i) blocked[static_cast<size_t>(path[i])] = true;
    paths.push_back(std::move(path));
  }

  // Per-vertex incident triangles, and the side flag: crossed[t][k] means
  // corner k of triangle t takes the other sheet's copy of its vertex.
  std::vector<std::vector<int>> incident(base.positions.size());
  for (size_t t = 0; t < base.triangles.size(); ++t) {
    for (int v : base.triangles[t]) incident[static_cast<size_t>(v)].push_back(static_cast<int>(t));
  }
  std::vector<std::array<bool, 3>> crossed(base.triangles.size(), {false, false, false});
  for (const auto& path : paths) {
    for (size_t i = 1; i + 1 < path.size(); ++i) {
      const int v = path[i], prev = path[i - 1], next = path[i + 1];
      // Sweep counterclockwise around v from edge (v, next) to edge (v, prev).
      int current = -1;
      for (int t : incident[static_cast<size_t>(v)]) {
        const auto& tri = base.triangles[static_cast<size_t>(t)];
        int k = corner_of(tri, v);
        if (tri[static_cast<size_t>((k + 1) % 3)] == next) current = t;
      }
      if (current < 0) throw InputError("internal: slit edge missing from mesh");
      for (size_t guard = 0; guard <= incident[static_cast<size_t>(v)].size(); ++guard) {
        const auto& tri = base.triangles[static_cast<size_t>(current)];
        int k = corner_of(tri, v);
        crossed[static_cast<size_t>(current)][static_cast<size_t>(k)] = true;
        int far = tri[static_cast<size_t>((k + 2) % 3)];
        if (far == prev) break;
        int following = -1;
        for (int t : incident[static_cast<size_t>(v)]) {
          const auto& o = base.triangles[static_cast<size_t>(t)];
          int ko = corner_of(o, v);
          if (o[static_cast<size_t>((ko + 1) % 3)] == far) following = t;
        }
        current = following;
      }
    }
  }

  Mesh m;
  const int nv = base.vertex_count();
  std::vector<std::array<int, 2>> copy(static_cast<size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    if (is_branch[static_cast<size_t>(v)]) {
      int id = m.vertex_count();
      copy[static_cast<size_t>(v)] = {id, id};
      m.positions.push_back(base.positions[static_cast<size_t>(v)]);
      m.sheet.push_back(-1);
      m.cone_points.push_back({id, 2});
    } else {
      for (int s = 0; s < 2; ++s) {
        copy[static_cast<size_t>(v)][static_cast<size_t>(s)] = m.vertex_count();
        m.positions.push_back(base.positions[static_cast<size_t>(v)]);
        m.sheet.push_back(s);
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (size_t t = 0; t < base.triangles.size(); ++t) {
      std::array<int, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        int sheet = crossed[t][static_cast<size_t>(k)] ? 1 - s : s;
        tri[static_cast<size_t>(k)] = copy[static_cast<size_t>(base.triangles[t][static_cast<size_t>(k)])][static_cast<size_t>(sheet)];
      }
      m.triangles.push_back(tri);
      m.lengths.push_back(base.lengths[t]);
    }
  }
  m.projection = m.positions;
  m.projection_degree = 2;
  m.snap_distance = snap;
  return m;
}

BranchedCoverSpec octahedral_cover_spec(int refinement) {
  BranchedCoverSpec s;
  s.branch_points = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  s.pairing = {{{0, 1}}, {{2, 3}}, {{4, 5}}};
  s.refinement = refinement;
  s.base = SphereBase::Octahedral;
  return s;
}

BranchedCoverSpec cube_cover_spec(int refinement) {
  BranchedCoverSpec s;
  for (int x : {1, -1}) {
    for (int y : {1, -1}) {
      s.branch_points.push_back(Vec3(x, y, 1).normalized());
      s.branch_points.push_back(Vec3(x, y, -1).normalized());
    }
  }
  s.refinement = refinement;
  s.base = SphereBase::Octahedral;
  return s;
}

BranchedCoverSpec tetrahedral_cover_spec(int refinement) {
  BranchedCoverSpec s;
  s.branch_points = {Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(), Vec3(-1, 1, -1).normalized(),
                     Vec3(-1, -1, 1).normalized()};
  s.refinement = refinement;
  s.base = SphereBase::Icosahedral;
  return s;
}

BranchedCoverSpec polar_cover_spec(int refinement) {
  BranchedCoverSpec s;
  s.branch_points = {{0, 0, 1}, {0, 0, -1}};
  s.refinement = refinement;
  s.base = SphereBase::Octahedral;
  return s;
}

BranchedCoverSpec roots_of_unity_cover_spec(int n, int refinement) {
  if (n < 3) throw InputError("need at least 3 roots of unity");
  BranchedCoverSpec s;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    s.branch_points.push_back(Vec3(std::cos(t), std::sin(t), 0));
  }
  if (n % 2 == 1) s.branch_points.push_back(Vec3(0, 0, 1));
  s.refinement = refinement;
  s.base = SphereBase::Icosahedral;
  return s;
}

std::vector<int> cover_involution(const Mesh& m) {
  if (m.sheet.size() != m.positions.size()) throw InputError("mesh is not a double cover");
  std::map<std::array<long long, 3>, std::array<int, 2>> by_position;
  auto key = [](const Vec3& p) {
    return std::array<long long, 3>{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9), std::llround(p.z() * 1e9)};
  };
  std::vector<int> out(m.positions.size());
  for (size_t v = 0; v < m.positions.size(); ++v) {
    if (m.sheet[v] < 0) {
      out[v] = static_cast<int>(v);
      continue;
    }
    auto& slot = by_position.try_emplace(key(m.positions[v]), std::array<int, 2>{-1, -1}).first->second;
    slot[static_cast<size_t>(m.sheet[v])] = static_cast<int>(v);
  }
  for (size_t v = 0; v < m.positions.size(); ++v) {
    if (m.sheet[v] < 0) continue;
    const auto& slot = by_position.at(key(m.positions[v]));
    out[v] = slot[static_cast<size_t>(1 - m.sheet[v])];
  }
  return out;
}

ConformalDensity make_density(const Mesh& m, std::vector<double> values) {
  if (values.size() != m.positions.size()) throw InputError("density size does not match vertex count");
  ConformalDensity d;
  for (size_t v = 0; v < values.size(); ++v) {
    if (!std::isfinite(values[v]) || values[v] < 0) throw InputError("density must be finite and non-negative");
    if (values[v] == 0) d.zero_set.push_back(static_cast<int>(v));
  }
  if (!d.zero_set.empty()) {
    auto nbrs = vertex_neighbors(m);
    for (int v : d.zero_set) {
      for (int w : nbrs[static_cast<size_t>(v)]) {
        if (values[static_cast<size_t>(w)] == 0) throw InputError("non-isolated zero in density");
      }
    }
  }
  d.values = std::move(values);
  return d;
}

ConformalDensity constant_density(const Mesh& m, double value) {
  return make_density(m, std::vector<double>(m.positions.size(), value));
}

ConformalDensity pullback_density(const Mesh& m) {
  if (!m.has_projection()) throw InputError("mesh carries no projection");
  // The mesh metric is the pulled-back round metric away from branch
  // vertices; d(projection) vanishes at the branch vertices.
  std::vector<double> values(m.positions.size(), 1.0);
  for (const auto& c : m.cone_points) {
    if (m.projection_degree > 1) values[static_cast<size_t>(c.vertex)] = 0.0;
  }
  return make_density(m, std::move(values));
}

double triangle_area(const std::array<double, 3>& l) {
  // Kahan's stable Heron formula.
  std::array<double, 3> s = l;
  std::sort(s.begin(), s.end(), std::greater<>());
  const double a = s[0], b = s[1], c = s[2];
  double q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return q <= 0 ? 0.0 : 0.25 * std::sqrt(q);
}

double total_area(const Mesh& m) {
  double a = 0;
  for (const auto& l : m.lengths) a += triangle_area(l);
  return a;
}

std::vector<double> angle_sums(const Mesh& m) {
  std::vector<double> sums(m.positions.size(), 0.0);
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& l = m.lengths[t];
    for (int k = 0; k < 3; ++k) {
      double a = l[static_cast<size_t>(k)], b = l[static_cast<size_t>((k + 1) % 3)], c = l[static_cast<size_t>((k + 2) % 3)];
      double cosv = std::clamp((b * b + c * c - a * a) / (2 * b * c), -1.0, 1.0);
      sums[static_cast<size_t>(m.triangles[t][static_cast<size_t>(k)])] += std::acos(cosv);
    }
  }
  return sums;
}

void validate(const Mesh& m) {
  if (m.lengths.size() != m.triangles.size()) throw InputError("mesh lengths do not match triangles");
  const int nv = m.vertex_count();
  std::map<Edge, int> directed;
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw InputError("triangle references a missing vertex");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) throw InputError("degenerate triangle");
    if (!(triangle_area(m.lengths[t]) > 0)) throw InputError("degenerate triangle");
    for (int k = 0; k < 3; ++k) {
      Edge e{tri[static_cast<size_t>(k)], tri[static_cast<size_t>((k + 1) % 3)]};
      if (++directed[e] > 1) throw InputError("inconsistent triangle orientation");
    }
  }
  for (const auto& [e, count] : directed) {
    if (!directed.count({e.second, e.first})) throw InputError("mesh has a boundary edge");
  }
  for (const auto& c : m.cone_points) {
    if (c.vertex < 0 || c.vertex >= nv || c.angle_over_2pi < 1) throw InputError("invalid cone point");
  }
  if (!m.projection.empty() && m.projection.size() != m.positions.size()) {
    throw InputError("projection size does not match vertex count");
  }
}

}  // namespace spectralab::mesh
