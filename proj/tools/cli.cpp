#include "spectralab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "spectralab/conformal_max.hpp"
#include "spectralab/error.hpp"
#include "spectralab/harmonic_ledger.hpp"
#include "spectralab/io.hpp"
#include "spectralab/mesh.hpp"
#include "spectralab/pool.hpp"
#include "spectralab/spectral.hpp"
#include "spectralab/weierstrass.hpp"

#ifndef SPECTRALAB_VERSION
#define SPECTRALAB_VERSION "0.0.0"
#endif

namespace spectralab::cli {

namespace fs = std::filesystem;
using io::json;
using weierstrass::Complex;

std::string version() { return SPECTRALAB_VERSION; }

namespace {

struct Context {
  std::string command;
  std::string scenario;
  std::string out_path;
  json inputs = json::object();
  json tolerances = json::object();
  std::optional<std::uint64_t> seed;

  void file(const std::string& path) { inputs[path] = io::fnv1a_file(path); }
  void builtin(const std::string& name) { inputs["builtin:" + name] = io::fnv1a(name); }
};

struct Outcome {
  json result = json::object();
  int code = Ok;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
  return out;
}

double to_double(const std::string& s) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw InputError("not a number: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw InputError("not a number: " + s);
  }
}

int to_int(const std::string& s) {
  double v = to_double(s);
  if (v != std::floor(v)) throw InputError("not an integer: " + s);
  return static_cast<int>(v);
}

Complex parse_complex(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() == 1) return {to_double(p[0]), 0.0};
  if (p.size() == 2) return {to_double(p[0]), to_double(p[1])};
  throw InputError("expected re,im: " + s);
}

// ---- mesh sources -------------------------------------------------------

struct MeshSource {
  std::string mesh_path;
  std::string builtin;
  std::string cover_spec;
  std::string density_path;
  int refinement = -1;
  bool pullback = false;
};

void add_mesh_options(CLI::App* sub, MeshSource& src) {
  sub->add_option("--mesh", src.mesh_path, "OFF mesh (sidecar <mesh>.json read when present)");
  sub->add_option("--builtin", src.builtin,
                  "sphere:R, octa-sphere:R, torus-hex:N, torus-square:N, torus:RE,IM,N, "
                  "cover-octahedral:R, cover-cube:R, cover-tetrahedral:R, cover-polar:R, cover-roots:N,R");
  sub->add_option("--cover-spec", src.cover_spec, "branched cover spec JSON");
  sub->add_option("--refinement", src.refinement, "override the cover spec refinement")->check(CLI::Range(0, 8));
  sub->add_option("--density", src.density_path, "density JSON {\"density\": [...]}");
  sub->add_flag("--pullback", src.pullback, "use the pullback density of the projection");
}

mesh::Mesh builtin_mesh(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 2) throw InputError("builtin mesh must be name:args, got " + spec);
  const std::string& name = parts[0];
  auto args = split(parts[1], ',');
  auto arg = [&](size_t i) {
    if (i >= args.size()) throw InputError("missing argument in " + spec);
    return to_int(args[i]);
  };
  auto level = [&] {
    int r = arg(0);
    if (r < 0 || r > 7) throw InputError("refinement out of range in " + spec);
    return r;
  };
  auto cells = [&](size_t i) {
    int n = arg(i);
    if (n < 3 || n > 400) throw InputError("torus size out of range in " + spec);
    return n;
  };
  if (name == "sphere") return mesh::build_sphere(level());
  if (name == "octa-sphere") return mesh::build_sphere(level(), mesh::SphereBase::Octahedral);
  if (name == "torus-hex") return mesh::build_flat_torus(std::polar(1.0, std::numbers::pi / 3), cells(0));
  if (name == "torus-square") return mesh::build_flat_torus({0.0, 1.0}, cells(0));
  if (name == "torus") {
    if (args.size() != 3) throw InputError("torus:RE,IM,N expected");
    Complex tau(to_double(args[0]), to_double(args[1]));
    if (!(tau.imag() > 0)) throw InputError("torus modulus needs Im tau > 0");
    return mesh::build_flat_torus(tau, cells(2));
  }
  if (name == "cover-octahedral") return mesh::build_hyperelliptic_cover(mesh::octahedral_cover_spec(level()));
  if (name == "cover-cube") return mesh::build_hyperelliptic_cover(mesh::cube_cover_spec(level()));
  if (name == "cover-tetrahedral") return mesh::build_hyperelliptic_cover(mesh::tetrahedral_cover_spec(level()));
  if (name == "cover-polar") return mesh::build_hyperelliptic_cover(mesh::polar_cover_spec(level()));
  if (name == "cover-roots") {
    if (args.size() != 2) throw InputError("cover-roots:N,R expected");
    const int n = arg(0), r = arg(1);
    if (n < 3 || n > 16 || r < 0 || r > 7) throw InputError("cover-roots arguments out of range");
    return mesh::build_hyperelliptic_cover(mesh::roots_of_unity_cover_spec(n, r));
  }
  throw InputError("unknown builtin mesh " + name);
}

std::pair<mesh::Mesh, mesh::ConformalDensity> load_mesh(const MeshSource& src, Context& ctx) {
  const int given = !src.mesh_path.empty() + !src.builtin.empty() + !src.cover_spec.empty();
  if (given != 1) throw InputError("give exactly one of --mesh, --builtin, --cover-spec");
  mesh::Mesh m;
  if (!src.mesh_path.empty()) {
    ctx.file(src.mesh_path);
    if (fs::exists(src.mesh_path + ".json")) ctx.file(src.mesh_path + ".json");
    m = mesh::load_mesh(src.mesh_path);
    if (ctx.scenario.empty()) ctx.scenario = fs::path(src.mesh_path).stem().string();
  } else if (!src.builtin.empty()) {
    ctx.builtin(src.builtin);
    m = builtin_mesh(src.builtin);
    if (ctx.scenario.empty()) ctx.scenario = src.builtin;
  } else {
    ctx.file(src.cover_spec);
    auto spec = mesh::read_cover_spec(src.cover_spec);
    if (src.refinement >= 0) spec.refinement = src.refinement;
    m = mesh::build_hyperelliptic_cover(spec);
    if (ctx.scenario.empty()) ctx.scenario = fs::path(src.cover_spec).stem().string();
  }
  mesh::ConformalDensity d;
  if (!src.density_path.empty()) {
    ctx.file(src.density_path);
    auto values = mesh::read_density_values(src.density_path);
    if (values.size() != static_cast<size_t>(m.vertex_count())) throw InputError("density size does not match mesh");
    d = mesh::make_density(m, std::move(values));
  } else if (src.pullback) {
    if (!m.has_projection()) throw InputError("--pullback needs a mesh with a projection");
    d = mesh::pullback_density(m);
  } else {
    d = mesh::constant_density(m);
  }
  return {std::move(m), std::move(d)};
}

json mesh_summary(const mesh::Mesh& m) {
  return {{"vertices", m.vertex_count()},
          {"faces", m.face_count()},
          {"euler_characteristic", m.euler_characteristic()},
          {"genus", m.genus()},
          {"cone_points", m.cone_points.size()}};
}

// ---- spectral commands --------------------------------------------------

struct SpectrumOptions {
  MeshSource src;
  int k = 5;
  double tol = 1e-8;
  std::optional<double> lambda;
  std::optional<double> band;
  double mesh_tol = 0.01;
};

void add_spectrum_options(CLI::App* sub, SpectrumOptions& o) {
  add_mesh_options(sub, o.src);
  sub->add_option("--k", o.k, "eigenvalues lambda_0 .. lambda_k")->check(CLI::Range(1, 200));
  sub->add_option("--tol", o.tol, "eigensolver residual tolerance")->check(CLI::Range(1e-14, 1e-2));
  sub->add_option("--lambda", o.lambda, "counting threshold (default lambda_1)");
  sub->add_option("--band", o.band, "also report the index of the projection with this band");
  sub->add_option("--mesh-tol", o.mesh_tol, "Yang-Yau tolerance relative to the bound")->check(CLI::Range(0.0, 1.0));
}

Outcome spectrum_command(const SpectrumOptions& o, Context& ctx, bool gate) {
  auto [m, d] = load_mesh(o.src, ctx);
  ctx.tolerances = {{"solver", o.tol}, {"mesh_relative", o.mesh_tol}};
  auto s = spectral::spectrum(m, d, o.k, o.tol);
  const int genus = m.genus();
  const double bound = spectral::yang_yau_bound(genus);
  auto yy = spectral::yang_yau_check(genus, s.normalized.at(1), o.mesh_tol * bound);
  const double lam = o.lambda.value_or(s.eigenvalues.at(1));
  Outcome out;
  json& r = out.result;
  r["mesh"] = mesh_summary(m);
  r["eigenvalues"] = s.eigenvalues;
  r["area"] = s.area;
  r["normalized"] = s.normalized;
  r["residuals"] = s.residuals;
  r["iterations"] = s.iterations;
  r["counting"] = {{"lambda", lam}, {"N", spectral::counting_function(s, lam)}};
  r["bound"] = bound;
  r["margin"] = yy.margin;
  r["yang_yau"] = io::to_json(yy);
  r["index"] = nullptr;
  r["nullity"] = nullptr;
  r["band"] = nullptr;
  if (o.band) {
    if (!m.has_projection()) throw InputError("--band needs a mesh with a projection");
    auto idx = spectral::index_of_map(m, *o.band, o.tol);
    r["index"] = idx.index;
    r["nullity"] = idx.nullity;
    r["band"] = idx.band;
    ctx.tolerances["band"] = *o.band;
  }
  if (gate && !yy.pass) out.code = BoundViolated;
  r["pass"] = yy.pass;
  return out;
}

struct IndexOptions {
  MeshSource src;
  double band = 0.05;
  double tol = 1e-8;
  std::optional<int> h0;
};

Outcome index_command(const IndexOptions& o, Context& ctx) {
  auto [m, d] = load_mesh(o.src, ctx);
  if (!m.has_projection()) throw InputError("index needs a mesh with a projection to the sphere");
  ctx.tolerances = {{"solver", o.tol}, {"band", o.band}};
  auto counted = spectral::index_of_map(m, o.band, o.tol);
  auto pd = mesh::pullback_density(m);
  auto potential = spectral::schrodinger_index(m, pd, spectral::pullback_potential(m, pd), o.band, o.tol);
  const bool agree = counted.index == potential.index && counted.nullity == potential.nullity;
  Outcome out;
  json& r = out.result;
  r["mesh"] = mesh_summary(m);
  r["degree"] = m.projection_degree;
  r["index"] = counted.index;
  r["nullity"] = counted.nullity;
  r["band"] = o.band;
  r["routes"] = {{"counting", io::to_json(counted)}, {"potential", io::to_json(potential)}};
  r["routes_agree"] = agree;
  bool pass = agree;
  if (o.h0) {
    auto b = weierstrass::index_bound_check(*o.h0, counted);
    r["index_bound"] = {{"h0_k_minus_b", b.h0_k_minus_b}, {"index", b.index}, {"bound", b.bound}, {"pass", b.pass}};
    pass = pass && b.pass;
  }
  r["pass"] = pass;
  if (!pass) out.code = BoundViolated;
  return out;
}

// ---- curves -------------------------------------------------------------

curve::HyperellipticCurve load_curve(const std::string& path, Context& ctx) {
  ctx.file(path);
  if (ctx.scenario.empty()) ctx.scenario = fs::path(path).stem().string();
  return io::curve_from_json(io::read_json(path));
}

json divisor_json(const curve::Divisor& d) {
  json j = {{"text", d.str()}, {"degree", d.degree()}, {"effective", d.is_effective()}};
  try {
    j["places"] = io::divisor_to_json(d);
  } catch (const DomainError&) {
    j["places"] = nullptr;
  }
  return j;
}

Outcome rr_command(const std::string& curve_path, const std::string& divisor_path, Context& ctx) {
  auto c = load_curve(curve_path, ctx);
  ctx.file(divisor_path);
  auto d = io::divisor_from_json(c, io::read_json(divisor_path));
  ctx.tolerances = {{"arithmetic", "exact"}};
  auto rep = curve::riemann_roch_check(d);
  Outcome out;
  out.result["curve"] = {{"text", c.str()}, {"genus", c.genus()}};
  out.result["divisor"] = divisor_json(d);
  out.result["riemann_roch"] = io::to_json(rep);
  out.result["pass"] = rep.ok;
  if (!rep.ok) out.code = BoundViolated;
  return out;
}

struct PencilOptions {
  std::string curve;
  std::string function;
  std::optional<int> probe;
  int samples = 50;
  std::uint64_t seed = 1;
};

Outcome pencil_command(const PencilOptions& o, Context& ctx) {
  auto c = load_curve(o.curve, ctx);
  ctx.tolerances = {{"arithmetic", "exact"}};
  Outcome out;
  json& r = out.result;
  r["curve"] = {{"text", c.str()}, {"genus", c.genus()}};
  r["h0_doubled_g12"] = curve::h0_of_doubled_pencil(c);
  if (o.function.empty() == !o.probe) throw InputError("give exactly one of --function, --probe");
  if (!o.function.empty()) {
    ctx.file(o.function);
    auto f = io::function_from_json(c, io::read_json(o.function));
    auto p = curve::pencil_of(f);
    r["pencil"] = {{"degree", p.degree},
                   {"f0", p.f0.str()},
                   {"f1", p.f1.str()},
                   {"divisor", divisor_json(p.divisor)},
                   {"base_locus", divisor_json(p.base_locus)},
                   {"base_point_free", p.base_point_free()},
                   {"span_dimension", p.span_dimension}};
    r["pass"] = true;
    return out;
  }
  if (*o.probe < 1 || o.samples < 1) throw InputError("probe degree and samples must be positive");
  ctx.seed = o.seed;
  auto rep = curve::unique_pencil_probe(c, *o.probe, o.samples, o.seed);
  json entries = json::array();
  for (auto& e : rep.entries)
    entries.push_back({{"divisor", e.divisor.str()},
                       {"h0", e.h0},
                       {"class", e.equivalence_class},
                       {"contains_g12", e.contains_g12}});
  r["probe"] = {{"degree", rep.degree},
                {"samples", rep.samples},
                {"seed", rep.seed},
                {"with_h0_ge_2", rep.with_h0_ge_2},
                {"distinct_classes", rep.distinct_classes},
                {"all_equivalent_to_hyperelliptic", rep.all_equivalent_to_hyperelliptic},
                {"label", rep.label},
                {"entries", entries}};
  // Below the genus every pencil on a hyperelliptic curve contains the g^1_2.
  const bool pass = *o.probe > c.genus() || rep.all_equivalent_to_hyperelliptic;
  r["pass"] = pass;
  if (!pass) out.code = BoundViolated;
  return out;
}

// ---- Weierstrass data ---------------------------------------------------

io::WeierstrassInput load_weierstrass(const std::string& path, Context& ctx) {
  ctx.file(path);
  if (ctx.scenario.empty()) ctx.scenario = fs::path(path).stem().string();
  return io::weierstrass_from_json(io::read_json(path));
}

struct WeierstrassOptions {
  std::string data;
  int grid = 20;
  std::string lo = "-2,-2";
  std::string hi = "2,2";
  double local_tol = 1e-5;
  double step = 1e-3;
  std::optional<int> index;
};

Outcome weierstrass_command(const WeierstrassOptions& o, Context& ctx) {
  auto in = load_weierstrass(o.data, ctx);
  if (o.index && !in.curve) throw InputError("--index applies to curve data");
  Outcome out;
  json& r = out.result;
  bool pass = true;
  if (in.curve) {
    ctx.tolerances = {{"arithmetic", "exact"}};
    auto br = weierstrass::branching_divisor(*in.curve);
    const int h0 = curve::h0(curve::canonical_divisor(br.b.curve()) - br.b);
    r["domain"] = "curve";
    r["branching"] = {{"B", divisor_json(br.b)},
                      {"omega_divisor", divisor_json(br.omega_divisor)},
                      {"polar", divisor_json(br.polar)},
                      {"total_order", br.total_order},
                      {"identity_holds", br.identity_holds}};
    r["h0_k_minus_b"] = h0;
    pass = br.identity_holds;
    if (o.index) {
      auto b = weierstrass::index_bound_check(h0, *o.index);
      r["index_bound"] = {{"h0_k_minus_b", b.h0_k_minus_b}, {"index", b.index}, {"bound", b.bound}, {"pass", b.pass}};
      pass = pass && b.pass;
    }
  } else {
    const auto& d = *in.planar;
    ctx.tolerances = {{"local", o.local_tol}, {"step", o.step}};
    auto br = weierstrass::branching_divisor(d);
    json pts = json::array();
    for (auto& p : br.points) pts.push_back({{"z", io::complex_to_json(p.z)}, {"multiplicity", p.multiplicity}});
    r["domain"] = in.domain == weierstrass::Domain::Torus ? "torus" : "plane";
    r["branching"] = {{"points", pts}, {"total_order", br.total_order}, {"identity_holds", br.identity_holds}};
    auto loc = weierstrass::local_identity_check(d, parse_complex(o.lo), parse_complex(o.hi), o.grid, o.local_tol, o.step);
    r["local"] = {{"samples", loc.samples.size()},
                  {"failures", loc.failures},
                  {"tol", loc.tol},
                  {"worst_harmonic", loc.worst_harmonic},
                  {"worst_conformal", loc.worst_conformal},
                  {"worst_metric", loc.worst_metric},
                  {"worst_normal", loc.worst_normal}};
    pass = br.identity_holds && loc.failures == 0;
  }
  r["pass"] = pass;
  if (!pass) out.code = BoundViolated;
  return out;
}

weierstrass::Loop loop_from_json(const json& j) {
  if (j.contains("circle")) {
    const json& c = j.at("circle");
    const double radius = c.at("radius").get<double>();
    if (!(radius > 0)) throw InputError("circle radius must be positive");
    return weierstrass::Loop::circle(io::complex_from_json(c.at("center")), radius);
  }
  if (j.contains("polygon")) {
    std::vector<Complex> v;
    for (auto& z : j.at("polygon")) v.push_back(io::complex_from_json(z));
    if (v.size() < 3) throw InputError("polygon needs at least 3 vertices");
    return weierstrass::Loop::polygon(std::move(v));
  }
  throw InputError("loop must be {\"circle\": ...} or {\"polygon\": ...}");
}

json loop_to_json(const weierstrass::Loop& l) {
  if (l.kind == weierstrass::Loop::Kind::Circle)
    return {{"circle", {{"center", io::complex_to_json(l.center)}, {"radius", l.radius}}}};
  json v = json::array();
  for (auto z : l.vertices) v.push_back(io::complex_to_json(z));
  return {{"polygon", v}};
}

struct PeriodsOptions {
  std::string data;
  std::string loops;
  std::vector<std::string> circles;
  double tol = 1e-10;
  double check_tol = 1e-8;
};

Outcome periods_command(const PeriodsOptions& o, Context& ctx) {
  auto in = load_weierstrass(o.data, ctx);
  if (!in.planar) throw InputError("periods need planar Weierstrass data");
  std::vector<weierstrass::Loop> loops;
  if (!o.loops.empty()) {
    ctx.file(o.loops);
    json j = io::read_json(o.loops);
    if (!j.is_array()) throw InputError("loops file must be a list");
    for (auto& l : j) loops.push_back(loop_from_json(l));
  }
  for (auto& c : o.circles) {
    auto p = split(c, ',');
    if (p.size() != 3) throw InputError("--circle expects re,im,r");
    const double radius = to_double(p[2]);
    if (!(radius > 0)) throw InputError("circle radius must be positive");
    loops.push_back(weierstrass::Loop::circle({to_double(p[0]), to_double(p[1])}, radius));
  }
  if (loops.empty()) throw InputError("no loops given");
  ctx.tolerances = {{"quadrature", o.tol}, {"residue_check", o.check_tol}};

  std::vector<weierstrass::PeriodResult> res(loops.size());
  parallel_for(static_cast<int>(loops.size()), [&](int i) {
    res[static_cast<size_t>(i)] = weierstrass::period(*in.planar, loops[static_cast<size_t>(i)], o.tol);
  });
  Outcome out;
  json list = json::array();
  bool pass = true;
  for (size_t i = 0; i < loops.size(); ++i) {
    auto& p = res[i];
    json e = {{"loop", loop_to_json(loops[i])},
              {"period", p.quadrature},
              {"error_estimate", p.max_error_estimate},
              {"residue_available", p.residue_available}};
    if (p.residue_available) {
      double diff = 0.0;
      for (int k = 0; k < 3; ++k) diff = std::max(diff, std::abs(p.quadrature[k] - p.residue[k]));
      e["residue"] = p.residue;
      e["difference"] = diff;
      e["agrees"] = diff <= o.check_tol;
      pass = pass && diff <= o.check_tol;
    }
    list.push_back(e);
  }
  out.result["periods"] = list;
  out.result["pass"] = pass;
  if (!pass) out.code = BoundViolated;
  return out;
}

// ---- ledger -------------------------------------------------------------

Outcome audit_command(const std::string& records_path, bool builtin, int refinement, Context& ctx) {
  std::vector<ledger::HarmonicMapRecord> recs;
  if (builtin == !records_path.empty()) throw InputError("give exactly one of --records, --catalog");
  if (builtin) {
    ctx.builtin("catalog:" + std::to_string(refinement));
    recs = ledger::catalog(refinement);
    if (ctx.scenario.empty()) ctx.scenario = "builtin-catalog";
  } else {
    ctx.file(records_path);
    recs = io::records_from_json(io::read_json(records_path));
    if (ctx.scenario.empty()) ctx.scenario = fs::path(records_path).stem().string();
  }
  ctx.tolerances = {{"arithmetic", "exact"}};
  std::vector<std::vector<ledger::BoundReport>> reps(recs.size());
  parallel_for(static_cast<int>(recs.size()), [&](int i) {
    ledger::validate(recs[static_cast<size_t>(i)]);
    reps[static_cast<size_t>(i)] = ledger::audit(recs[static_cast<size_t>(i)]);
  });
  Outcome out;
  json list = json::array();
  bool all = true;
  for (size_t i = 0; i < recs.size(); ++i) {
    json b = json::array();
    for (auto& rep : reps[i]) b.push_back(io::to_json(rep));
    const bool pass = ledger::all_pass(reps[i]);
    all = all && pass;
    list.push_back({{"name", recs[i].name}, {"provenance", recs[i].provenance}, {"reports", b}, {"pass", pass}});
  }
  out.result["records"] = list;
  out.result["count"] = recs.size();
  out.result["pass"] = all;
  if (!all) out.code = BoundViolated;
  return out;
}

// ---- maximize -----------------------------------------------------------

struct MaximizeOptions {
  MeshSource src;
  std::string config;
  std::optional<int> max_iters;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  std::string trace;
  std::string density_out;
  double mesh_tol = 0.02;
};

Outcome maximize_command(const MaximizeOptions& o, Context& ctx) {
  auto [m, d] = load_mesh(o.src, ctx);
  conformal::MaximizeConfig cfg;
  if (!o.config.empty()) {
    ctx.file(o.config);
    cfg = io::config_from_json(io::read_json(o.config));
  }
  if (o.max_iters) {
    if (*o.max_iters < 0) throw InputError("--max-iters must be >= 0");
    cfg.max_iters = *o.max_iters;
  }
  if (o.amplitude > 0) {
    ctx.seed = o.seed;
    auto wave = conformal::perturbed_density(m, o.amplitude, o.seed);
    for (size_t v = 0; v < d.values.size(); ++v) d.values[v] *= wave.values[v];
  }
  const double bound = spectral::yang_yau_bound(m.genus());
  ctx.tolerances = {{"residual", cfg.tol},
                    {"solver", cfg.solver_tol},
                    {"backtrack", cfg.backtrack_tol},
                    {"mesh_relative", o.mesh_tol}};
  auto s = conformal::maximize_lambda1(m, d, cfg);
  auto st = conformal::stationarity_report(m, s, cfg, o.mesh_tol * bound);
  bool monotone = true;
  for (size_t i = 1; i < s.history.size(); ++i)
    monotone = monotone && s.history[i] >= s.history[i - 1] * (1 - cfg.backtrack_tol);
  if (!o.trace.empty()) conformal::write_trace_csv(s, o.trace);
  if (!o.density_out.empty()) mesh::write_density(s.density, o.density_out);

  Outcome out;
  json& r = out.result;
  r["mesh"] = mesh_summary(m);
  r["config"] = io::config_to_json(cfg);
  r["history"] = s.history;
  r["iterations"] = s.iterations;
  r["converged"] = s.converged;
  r["stop_reason"] = s.stop_reason;
  r["eigenvalues"] = s.spectrum.eigenvalues;
  r["normalized"] = s.spectrum.normalized;
  r["area"] = s.spectrum.area;
  r["lambda1_bar"] = s.history.back();
  r["bound"] = bound;
  r["margin"] = st.yang_yau.margin;
  r["stationarity"] = {{"residual", st.residual},
                       {"cluster_width", st.cluster_width},
                       {"cluster_size", st.cluster_size},
                       {"label", st.label}};
  r["yang_yau"] = io::to_json(st.yang_yau);
  r["monotone"] = monotone;
  if (!o.trace.empty()) r["trace"] = o.trace;
  if (!o.density_out.empty()) r["density"] = o.density_out;
  const bool pass = monotone && st.yang_yau.pass;
  r["pass"] = pass;
  if (!pass) out.code = BoundViolated;
  return out;
}

// ---- catalog ------------------------------------------------------------

struct CatalogEntry {
  std::string path;
  std::string kind;
  std::string provenance;
  std::function<void(const std::string&)> write;
};

std::vector<CatalogEntry> catalog_entries(int r) {
  using mesh::BranchedCoverSpec;
  std::vector<CatalogEntry> e;
  const std::string rs = std::to_string(r);
  auto mesh_entry = [&](std::string name, std::string prov, std::function<mesh::Mesh()> build) {
    e.push_back({"meshes/" + name + ".off", "mesh", std::move(prov),
                 [build](const std::string& p) { mesh::save_mesh(build(), p); }});
  };
  mesh_entry("sphere_r" + rs, "icosahedral subdivision of the unit sphere", [r] { return mesh::build_sphere(r); });
  mesh_entry("torus_hex_24", "flat torus, tau = exp(i pi/3), 24 x 24 grid",
             [] { return mesh::build_flat_torus(std::polar(1.0, std::numbers::pi / 3), 24); });
  mesh_entry("torus_square_24", "flat torus, tau = i, 24 x 24 grid",
             [] { return mesh::build_flat_torus({0.0, 1.0}, 24); });
  struct Cover {
    const char* name;
    BranchedCoverSpec (*spec)(int);
    const char* prov;
  };
  const Cover covers[] = {
      {"octahedral", mesh::octahedral_cover_spec, "genus 2, branched over the 6 octahedron vertices"},
      {"cube", mesh::cube_cover_spec, "genus 3, branched over the 8 cube vertices"},
      {"tetrahedral", mesh::tetrahedral_cover_spec, "genus 1, branched over the 4 tetrahedron vertices"},
      {"polar", mesh::polar_cover_spec, "genus 0, branched over the two poles (z^2)"},
  };
  e.push_back({"covers/roots7.json", "cover-spec", "genus 3, y^2 = x^7 - 1: 7th roots of unity and infinity",
               [r](const std::string& p) { mesh::write_cover_spec(mesh::roots_of_unity_cover_spec(7, r), p); }});
  for (auto& c : covers) {
    auto spec = c.spec;
    e.push_back({std::string("covers/") + c.name + ".json", "cover-spec", c.prov,
                 [spec, r](const std::string& p) { mesh::write_cover_spec(spec(r), p); }});
    mesh_entry(std::string("cover_") + c.name + "_r" + rs, std::string("glued double cover: ") + c.prov,
               [spec, r] { return mesh::build_hyperelliptic_cover(spec(r)); });
  }

  struct CurveEntry {
    const char* name;
    Poly p;
    const char* prov;
  };
  const CurveEntry curves[] = {
      {"genus1", Poly{0, -1, 0, 1}, "y^2 = x^3 - x"},
      {"genus2", Poly{0, -1, 0, 0, 0, 1}, "y^2 = x^5 - x"},
      {"genus3", Poly{0, -1, 0, 0, 0, 0, 0, 1}, "y^2 = x^7 - x"},
      {"genus3_x7m1", Poly{-1, 0, 0, 0, 0, 0, 0, 1}, "y^2 = x^7 - 1"},
      {"genus4", Poly{0, -1, 0, 0, 0, 0, 0, 0, 0, 1}, "y^2 = x^9 - x"},
      {"genus2_even", Poly{-1, 0, 0, 0, 0, 0, 1}, "y^2 = x^6 - 1, two rational places at infinity"},
  };
  for (auto& c : curves) {
    Poly p = c.p;
    e.push_back({std::string("curves/") + c.name + ".json", "curve", c.prov, [p](const std::string& path) {
                   io::write_json(io::curve_to_json(curve::HyperellipticCurve(p)), path);
                 }});
  }
  e.push_back({"divisors/genus2_example.json", "divisor", "2 P_0 + P_(1,0) + P_inf on y^2 = x^5 - x",
               [](const std::string& path) {
                 curve::HyperellipticCurve c(Poly{0, -1, 0, 0, 0, 1});
                 auto d = curve::Divisor::point(c, curve::Place::branch(0), 2) +
                          curve::Divisor::point(c, curve::Place::branch(1)) +
                          curve::Divisor::point(c, curve::Place::infinity(0));
                 io::write_json(io::divisor_to_json(d), path);
               }});

  struct Planar {
    const char* name;
    weierstrass::PlanarData (*make)();
    const char* prov;
  };
  const Planar planar[] = {
      {"enneper", weierstrass::enneper, "phi = z, omega = dz"},
      {"catenoid", weierstrass::catenoid, "phi = z, omega = dz / z^2, puncture at 0"},
      {"helicoid", weierstrass::helicoid, "phi = z, omega = i dz / z^2, puncture at 0"},
  };
  for (auto& w : planar) {
    auto make = w.make;
    e.push_back({std::string("weierstrass/") + w.name + ".json", "weierstrass", w.prov,
                 [make](const std::string& p) { io::write_json(io::weierstrass_to_json(make()), p); }});
  }
  e.push_back({"weierstrass/genus3_x7m1.json", "weierstrass", "phi = x, omega = dx/y on y^2 = x^7 - 1",
               [](const std::string& p) {
                 curve::HyperellipticCurve c(Poly{-1, 0, 0, 0, 0, 0, 0, 1});
                 weierstrass::CurveData d{curve::MeromorphicFunction::x(c), curve::MeromorphicFunction::constant(c, 1)};
                 io::write_json(io::weierstrass_to_json(d), p);
               }});
  e.push_back({"records/catalog.json", "records", "closed-form harmonic map records and glued-cover projections",
               [r](const std::string& p) {
                 json list = json::array();
                 for (auto& rec : ledger::catalog(std::min(r, 2))) list.push_back(io::record_to_json(rec));
                 io::write_json({{"records", list}}, p);
               }});
  return e;
}

Outcome catalog_command(const std::string& dir, int refinement, Context& ctx) {
  if (dir.empty()) throw InputError("--out-dir is required");
  std::error_code ec;
  for (const char* sub : {"meshes", "covers", "curves", "divisors", "weierstrass", "records"}) {
    fs::create_directories(fs::path(dir) / sub, ec);
    if (ec) throw InputError("cannot create " + (fs::path(dir) / sub).string() + ": " + ec.message());
  }
  ctx.builtin("catalog:" + std::to_string(refinement));
  if (ctx.scenario.empty()) ctx.scenario = "catalog";
  auto entries = catalog_entries(refinement);
  parallel_for(static_cast<int>(entries.size()), [&](int i) {
    auto& e = entries[static_cast<size_t>(i)];
    e.write((fs::path(dir) / e.path).string());
  });
  json files = json::array();
  for (auto& e : entries) {
    const std::string full = (fs::path(dir) / e.path).string();
    json f = {{"path", e.path}, {"kind", e.kind}, {"provenance", e.provenance}, {"fnv1a", io::fnv1a_file(full)}};
    if (e.kind == "mesh" && fs::exists(full + ".json")) f["sidecar"] = e.path + ".json";
    files.push_back(f);
  }
  json manifest = {{"tool", "spectralab"}, {"version", version()}, {"refinement", refinement}, {"files", files}};
  io::write_json(manifest, (fs::path(dir) / "manifest.json").string());
  Outcome out;
  out.result["out_dir"] = dir;
  out.result["files"] = files.size();
  out.result["manifest"] = "manifest.json";
  out.result["pass"] = true;
  return out;
}

// ---- driver -------------------------------------------------------------

json header(const Context& ctx) {
  json h = {{"tool", "spectralab"},
            {"version", version()},
            {"command", ctx.command},
            {"scenario", ctx.scenario},
            {"inputs", ctx.inputs},
            {"tolerances", ctx.tolerances},
            {"threads", worker_count()}};
  h["seed"] = ctx.seed ? json(*ctx.seed) : json(nullptr);
  return h;
}

int emit(const Context& ctx, Outcome& o, std::ostream& out) {
  json report = header(ctx);
  for (auto& [k, v] : o.result.items()) report[k] = v;
  report["exit_code"] = o.code;
  if (ctx.out_path.empty()) {
    out << report.dump(2) << '\n';
  } else {
    io::write_json(report, ctx.out_path);
    out << ctx.out_path << '\n';
  }
  return o.code;
}

int batch(const std::string& path, std::ostream& out, std::ostream& err) {
  json j = io::read_json(path);
  if (!j.is_array()) throw InputError("scenario file must be a list of argument lists");
  std::vector<std::vector<std::string>> runs;
  for (auto& a : j) runs.push_back(a.get<std::vector<std::string>>());
  std::vector<int> codes(runs.size());
  std::vector<std::string> outs(runs.size()), errs(runs.size());
  parallel_for(static_cast<int>(runs.size()), [&](int i) {
    std::ostringstream o, e;
    codes[static_cast<size_t>(i)] = run(runs[static_cast<size_t>(i)], o, e);
    outs[static_cast<size_t>(i)] = o.str();
    errs[static_cast<size_t>(i)] = e.str();
  });
  int worst = Ok;
  json summary = json::array();
  for (size_t i = 0; i < runs.size(); ++i) {
    err << errs[i];
    summary.push_back({{"args", runs[i]}, {"exit_code", codes[i]}});
    worst = std::max(worst, codes[i]);
  }
  out << json({{"tool", "spectralab"},
               {"version", version()},
               {"command", "batch"},
               {"inputs", {{path, io::fnv1a_file(path)}}},
               {"threads", worker_count()},
               {"runs", summary},
               {"exit_code", worst}})
             .dump(2)
      << '\n';
  return worst;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral and harmonic-map experiments", "spectralab"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);
  app.fallthrough();

  Context ctx;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", ctx.out_path, "write the JSON report here instead of stdout");
    sub->add_option("--scenario", ctx.scenario, "label stored in the report");
  };

  SpectrumOptions spec_o, yy_o;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, normalized spectrum, counting function");
  add_spectrum_options(spectrum, spec_o);
  common(spectrum);
  auto* yy = app.add_subcommand("yy-check", "Yang-Yau bound on lambda_1 area; exit 1 when violated");
  add_spectrum_options(yy, yy_o);
  common(yy);

  IndexOptions idx_o;
  auto* index = app.add_subcommand("index", "index and nullity of the projection to the sphere");
  add_mesh_options(index, idx_o.src);
  index->add_option("--band", idx_o.band, "nullity band around 2")->check(CLI::Range(0.0, 1.0));
  index->add_option("--tol", idx_o.tol, "eigensolver tolerance")->check(CLI::Range(1e-14, 1e-2));
  index->add_option("--h0", idx_o.h0, "h0(K - B): also check ind >= (2 h0 - 3)/3")->check(CLI::Range(0, 1000));
  common(index);

  std::string rr_curve, rr_div;
  auto* rr = app.add_subcommand("rr", "Riemann-Roch identity for a divisor on a hyperelliptic curve");
  rr->add_option("--curve", rr_curve, "curve JSON")->required();
  rr->add_option("--divisor", rr_div, "divisor JSON")->required();
  common(rr);

  PencilOptions pen_o;
  auto* pencil = app.add_subcommand("pencil", "pencil of a function, or randomized pencil probe");
  pencil->add_option("--curve", pen_o.curve, "curve JSON")->required();
  pencil->add_option("--function", pen_o.function, "function JSON {a, b, h}");
  pencil->add_option("--probe", pen_o.probe, "probe degree d");
  pencil->add_option("--samples", pen_o.samples, "probe samples")->check(CLI::Range(1, 100000));
  pencil->add_option("--seed", pen_o.seed, "probe seed");
  common(pencil);

  WeierstrassOptions w_o;
  auto* weier = app.add_subcommand("weierstrass", "branching divisor and local identities of Weierstrass data");
  weier->add_option("--data", w_o.data, "Weierstrass data JSON")->required();
  weier->add_option("--grid", w_o.grid, "local check grid size")->check(CLI::Range(2, 1000));
  weier->add_option("--lo", w_o.lo, "lower-left corner re,im");
  weier->add_option("--hi", w_o.hi, "upper-right corner re,im");
  weier->add_option("--local-tol", w_o.local_tol, "local identity tolerance");
  weier->add_option("--step", w_o.step, "finite-difference step")->check(CLI::Range(1e-8, 1e-1));
  weier->add_option("--index", w_o.index, "Morse index of the Gauss map (curve data)");
  common(weier);

  PeriodsOptions p_o;
  auto* periods = app.add_subcommand("periods", "real periods of Weierstrass data along loops");
  periods->add_option("--data", p_o.data, "Weierstrass data JSON")->required();
  periods->add_option("--loops", p_o.loops, "loops JSON list");
  periods->add_option("--circle", p_o.circles, "circle re,im,r (repeatable)");
  periods->add_option("--tol", p_o.tol, "quadrature tolerance")->check(CLI::Range(1e-15, 1e-2));
  periods->add_option("--check-tol", p_o.check_tol, "quadrature vs residue tolerance");
  common(periods);

  std::string audit_records;
  bool audit_builtin = false;
  int audit_ref = 2;
  auto* audit = app.add_subcommand("branching-audit", "ledger audit of harmonic map records");
  audit->add_option("--records", audit_records, "record JSON (object, list, or {records: [...]})");
  audit->add_flag("--catalog", audit_builtin, "audit the built-in catalog");
  audit->add_option("--refinement", audit_ref, "cover refinement for the built-in catalog")->check(CLI::Range(2, 5));
  common(audit);

  MaximizeOptions m_o;
  auto* maximize = app.add_subcommand("maximize", "maximize normalized lambda_1 in a conformal class");
  add_mesh_options(maximize, m_o.src);
  maximize->add_option("--config", m_o.config, "config JSON");
  maximize->add_option("--max-iters", m_o.max_iters, "iteration cap");
  maximize->add_option("--amplitude", m_o.amplitude, "random log-perturbation of the initial density")
      ->check(CLI::Range(0.0, 5.0));
  maximize->add_option("--seed", m_o.seed, "perturbation seed");
  maximize->add_option("--trace", m_o.trace, "CSV trace path");
  maximize->add_option("--density-out", m_o.density_out, "final density JSON path");
  maximize->add_option("--mesh-tol", m_o.mesh_tol, "Yang-Yau tolerance relative to the bound");
  common(maximize);

  std::string cat_dir;
  int cat_ref = 3;
  auto* cat = app.add_subcommand("catalog", "write built-in meshes, curves, Weierstrass data and records");
  cat->add_option("--out-dir,out_dir", cat_dir, "output directory")->required();
  cat->add_option("--refinement", cat_ref, "mesh refinement")->check(CLI::Range(2, 5));
  common(cat);

  std::string batch_file;
  auto* bat = app.add_subcommand("batch", "run a list of scenarios in the SPECTRALAB_THREADS worker pool");
  bat->add_option("--scenarios", batch_file, "JSON list of argument lists")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return InputFailure;
  }

  try {
    Outcome o;
    if (spectrum->parsed()) {
      ctx.command = "spectrum";
      o = spectrum_command(spec_o, ctx, false);
    } else if (yy->parsed()) {
      ctx.command = "yy-check";
      o = spectrum_command(yy_o, ctx, true);
    } else if (index->parsed()) {
      ctx.command = "index";
      o = index_command(idx_o, ctx);
    } else if (rr->parsed()) {
      ctx.command = "rr";
      o = rr_command(rr_curve, rr_div, ctx);
    } else if (pencil->parsed()) {
      ctx.command = "pencil";
      o = pencil_command(pen_o, ctx);
    } else if (weier->parsed()) {
      ctx.command = "weierstrass";
      o = weierstrass_command(w_o, ctx);
    } else if (periods->parsed()) {
      ctx.command = "periods";
      o = periods_command(p_o, ctx);
    } else if (audit->parsed()) {
      ctx.command = "branching-audit";
      o = audit_command(audit_records, audit_builtin, audit_ref, ctx);
    } else if (maximize->parsed()) {
      ctx.command = "maximize";
      o = maximize_command(m_o, ctx);
    } else if (cat->parsed()) {
      ctx.command = "catalog";
      o = catalog_command(cat_dir, cat_ref, ctx);
    } else if (bat->parsed()) {
      return batch(batch_file, out, err);
    }
    return emit(ctx, o, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return InputFailure;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return InputFailure;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (iterations " << e.iterations() << ", residual " << e.residual()
        << ")\n";
    return SolverFailure;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return InputFailure;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return InputFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return SolverFailure;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace spectralab::cli
