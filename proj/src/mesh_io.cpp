#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "spectralab/error.hpp"
#include "spectralab/mesh.hpp"

namespace spectralab::mesh {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void write_off(const Mesh& m, const std::string& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OFF\n" << m.vertex_count() << ' ' << m.face_count() << " 0\n";
  for (const auto& p : m.positions) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : m.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  write_text(path, out.str());
}

Mesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  // Strip comments, then read whitespace separated tokens.
  std::stringstream clean;
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    clean << line << '\n';
  }
  std::string header;
  clean >> header;
  if (header != "OFF") throw InputError(path + ": missing OFF header");
  long nv = -1, nf = -1, ne = -1;
  clean >> nv >> nf >> ne;
  if (!clean || nv < 0 || nf < 0) throw InputError(path + ": bad OFF counts line");
  Mesh m;
  for (long i = 0; i < nv; ++i) {
    double x, y, z;
    if (!(clean >> x >> y >> z)) throw InputError(path + ": truncated vertex list");
    m.positions.emplace_back(x, y, z);
  }
  for (long i = 0; i < nf; ++i) {
    int k;
    std::array<int, 3> t{};
    if (!(clean >> k) || k != 3) throw InputError(path + ": only triangle faces are supported");
    if (!(clean >> t[0] >> t[1] >> t[2])) throw InputError(path + ": truncated face list");
    m.triangles.push_back(t);
  }
  for (const auto& t : m.triangles) {
    for (int v : t) {
      if (v < 0 || v >= m.vertex_count()) throw InputError(path + ": face index out of range");
    }
  }
  lengths_from_positions(m);
  return m;
}

void write_sidecar(const Mesh& m, const std::string& path) {
  json j;
  j["cone_points"] = json::array();
  for (const auto& c : m.cone_points) j["cone_points"].push_back({{"vertex", c.vertex}, {"angle_over_2pi", c.angle_over_2pi}});
  if (m.has_projection()) {
    json p = json::array();
    for (const auto& v : m.projection) p.push_back(vec_to(v));
    j["projection"] = p;
    j["projection_degree"] = m.projection_degree;
  }
  if (!m.sheet.empty()) j["sheet"] = m.sheet;
  // Abstract meshes (tori) cannot recover lengths from positions.
  bool embedded = true;
  Mesh probe = m;
  lengths_from_positions(probe);
  for (size_t t = 0; t < m.lengths.size() && embedded; ++t) {
    for (int k = 0; k < 3; ++k) {
      if (std::abs(probe.lengths[t][static_cast<size_t>(k)] - m.lengths[t][static_cast<size_t>(k)]) > 1e-12) embedded = false;
    }
  }
  if (!embedded) j["edge_lengths"] = m.lengths;
  if (m.snap_distance > 0) j["snap_distance"] = m.snap_distance;
  write_text(path, j.dump(1));
}

void read_sidecar(Mesh& m, const std::string& path) {
  json j = read_json(path);
  try {
    m.cone_points.clear();
    for (const auto& c : j.value("cone_points", json::array())) {
      m.cone_points.push_back({c.at("vertex").get<int>(), c.at("angle_over_2pi").get<int>()});
    }
    if (j.contains("projection")) {
      m.projection.clear();
      for (const auto& v : j["projection"]) m.projection.push_back(vec_from(v).normalized());
      m.projection_degree = j.value("projection_degree", 1);
    }
    if (j.contains("sheet")) m.sheet = j["sheet"].get<std::vector<int>>();
    if (j.contains("edge_lengths")) m.lengths = j["edge_lengths"].get<std::vector<std::array<double, 3>>>();
    m.snap_distance = j.value("snap_distance", 0.0);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

Mesh load_mesh(const std::string& off_path) {
  Mesh m = read_off(off_path);
  if (std::filesystem::exists(off_path + ".json")) read_sidecar(m, off_path + ".json");
  validate(m);
  return m;
}

void save_mesh(const Mesh& m, const std::string& off_path) {
  write_off(m, off_path);
  write_sidecar(m, off_path + ".json");
}

BranchedCoverSpec read_cover_spec(const std::string& path) {
  json j = read_json(path);
  BranchedCoverSpec s;
  try {
    for (const auto& p : j.at("branch_points")) s.branch_points.push_back(vec_from(p));
    if (j.contains("pairing")) s.pairing = j["pairing"].get<std::vector<std::array<int, 2>>>();
    s.refinement = j.value("refinement", 3);
    std::string base = j.value("base", "icosahedral");
    if (base == "octahedral") {
      s.base = SphereBase::Octahedral;
    } else if (base == "icosahedral") {
      s.base = SphereBase::Icosahedral;
    } else {
      throw InputError(path + ": unknown base '" + base + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return s;
}

void write_cover_spec(const BranchedCoverSpec& spec, const std::string& path) {
  json j;
  j["branch_points"] = json::array();
  for (const auto& p : spec.branch_points) j["branch_points"].push_back(vec_to(p));
  j["pairing"] = spec.pairing;
  j["refinement"] = spec.refinement;
  j["base"] = spec.base == SphereBase::Octahedral ? "octahedral" : "icosahedral";
  write_text(path, j.dump(1));
}

void write_density(const ConformalDensity& d, const std::string& path) {
  json j;
  j["density"] = d.values;
  j["zero_set"] = d.zero_set;
  write_text(path, j.dump(1));
}

std::vector<double> read_density_values(const std::string& path) {
  json j = read_json(path);
  try {
    return j.at("density").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace spectralab::mesh
