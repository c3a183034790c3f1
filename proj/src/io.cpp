#include "spectralab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "spectralab/error.hpp"

namespace spectralab::io {

namespace {

using weierstrass::Complex;

template <class F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

Rational rational_from(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InputError("expected a rational string, got " + j.dump());
}

weierstrass::CPoly cpoly_from(const json& j) {
  if (!j.is_array()) throw InputError("expected a coefficient list");
  weierstrass::CPoly p;
  for (auto& c : j) p.c.push_back(complex_from_json(c));
  if (p.c.empty()) p.c.push_back(0.0);
  return p;
}

json cpoly_to(const weierstrass::CPoly& p) {
  json a = json::array();
  for (auto c : p.c) a.push_back(complex_to_json(c));
  return a;
}

weierstrass::RationalFunction rational_function_from(const json& j) {
  if (j.is_array()) return {cpoly_from(j), weierstrass::CPoly{{Complex(1.0)}}};
  if (!j.is_object() || !j.contains("num")) throw InputError("expected {\"num\": [...], \"den\": [...]}");
  weierstrass::RationalFunction f;
  f.num = cpoly_from(j.at("num"));
  if (j.contains("den")) f.den = cpoly_from(j.at("den"));
  bool zero_den = true;
  for (auto c : f.den.c) zero_den = zero_den && c == Complex(0.0);
  if (zero_den) throw InputError("zero denominator");
  return f;
}

json rational_function_to(const weierstrass::RationalFunction& f) {
  return {{"num", cpoly_to(f.num)}, {"den", cpoly_to(f.den)}};
}

int level_key(const std::string& k) {
  try {
    size_t used = 0;
    int v = std::stoi(k, &used);
    if (used == k.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw InputError("level keys must be integers, got " + k);
}

// Raw fibre entry: exact for fibres whose points are not rational.
curve::FiberEntry entry_from(const curve::HyperellipticCurve& c, const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Poly q = poly_from_json(j.at("q"));
  if (q.degree() < 1 || !is_squarefree(q)) throw InputError("fibre polynomial must be squarefree of degree >= 1");
  q = q.monic();
  const int mult = j.at("mult").get<int>();
  const bool coprime = gcd(q, c.p()).degree() == 0;
  if (kind == "branch") {
    if (!(c.p() % q).is_zero()) throw InputError("branch fibre polynomial must divide p");
    return {curve::FiberKind::Branch, q, {}, mult, 0};
  }
  if (!coprime) throw InputError("fibre polynomial must be coprime to p");
  if (kind == "symmetric") return {curve::FiberKind::Symmetric, q, {}, mult, mult};
  if (kind != "split") throw InputError("fibre kind must be branch, split or symmetric");
  Poly r = poly_from_json(j.at("r")) % q;
  if (!((r * r - c.p()) % q).is_zero()) throw InputError("split fibre needs r^2 = p mod q");
  return {curve::FiberKind::Split, q, r, mult, j.value("mult_minus", 0)};
}

json entry_to(const curve::FiberEntry& e) {
  static const char* kinds[] = {"branch", "split", "symmetric"};
  json j = {{"kind", kinds[static_cast<int>(e.kind)]}, {"q", poly_to_json(e.q)}, {"mult", e.mult_plus}};
  if (e.kind == curve::FiberKind::Split) {
    j["r"] = poly_to_json(e.r);
    j["mult_minus"] = e.mult_minus;
  }
  return j;
}

int sheet_sign(const Rational& v) { return sgn(v) >= 0 ? 1 : -1; }

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return guarded(path, [&] { return json::parse(in); });
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("cannot write " + path);
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes);
}

Poly poly_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected a coefficient list");
  std::vector<Rational> c;
  for (auto& x : j) c.push_back(rational_from(x));
  return Poly(std::move(c));
}

json poly_to_json(const Poly& p) {
  json a = json::array();
  for (auto& c : p.coeffs()) a.push_back(to_string(c));
  return a;
}

curve::HyperellipticCurve curve_from_json(const json& j) {
  return guarded("curve", [&] {
    const std::string model = j.at("model").get<std::string>();
    curve::Model m;
    if (model == "hyperelliptic-odd")
      m = curve::Model::Odd;
    else if (model == "hyperelliptic-even")
      m = curve::Model::Even;
    else
      throw InputError("unknown curve model " + model);
    return curve::HyperellipticCurve(m, poly_from_json(j.at("coeffs")));
  });
}

json curve_to_json(const curve::HyperellipticCurve& c) {
  return {{"model", c.model() == curve::Model::Odd ? "hyperelliptic-odd" : "hyperelliptic-even"},
          {"coeffs", poly_to_json(c.p())}};
}

curve::Divisor divisor_from_json(const curve::HyperellipticCurve& c, const json& j) {
  return guarded("divisor", [&] {
    if (!j.is_array()) throw InputError("divisor must be a list of places");
    curve::Divisor d(c);
    for (auto& e : j) {
      const int mult = e.value("mult", 1);
      if (e.contains("fiber")) {
        d = d + curve::Divisor::fiber(c, rational_from(e.at("fiber")), mult);
        continue;
      }
      if (e.contains("entry")) {
        d = d + curve::Divisor(c, {entry_from(c, e.at("entry"))});
        continue;
      }
      const json& place = e.at("place");
      const json& x = place.at("x");
      if (x.is_string() && (x == "inf0" || x == "inf1")) {
        const int idx = x == "inf0" ? 0 : 1;
        if (idx >= c.places_at_infinity()) throw InputError("curve has a single place at infinity");
        d = d + curve::Divisor::point(c, curve::Place::infinity(idx), mult);
        continue;
      }
      const Rational x0 = rational_from(x);
      const json& sheet = place.at("sheet");
      curve::Place p;
      if (sheet == "branch")
        p = curve::Place::branch(x0);
      else if (sheet == 1 || sheet == -1)
        p = curve::Place::finite(x0, sheet.get<int>());
      else
        throw InputError("sheet must be 1, -1 or \"branch\"");
      d = d + curve::Divisor::point(c, p, mult);
    }
    return d;
  });
}

json divisor_to_json(const curve::Divisor& d) {
  json out = json::array();
  auto place = [&](json x, json sheet, int mult) {
    if (mult != 0) out.push_back({{"place", {{"x", std::move(x)}, {"sheet", std::move(sheet)}}}, {"mult", mult}});
  };
  for (auto& e : d.entries()) {
    if (e.q.degree() != 1) {
      out.push_back({{"entry", entry_to(e)}});
      continue;
    }
    const Rational x0 = -e.q.coeff(0) / e.q.coeff(1);
    const std::string xs = to_string(x0);
    switch (e.kind) {
      case curve::FiberKind::Branch:
        place(xs, "branch", e.mult_plus);
        break;
      case curve::FiberKind::Symmetric:
        if (e.mult_plus != 0) out.push_back({{"fiber", xs}, {"mult", e.mult_plus}});
        break;
      case curve::FiberKind::Split: {
        const int s = sheet_sign(e.r.eval(x0));
        place(xs, s, e.mult_plus);
        place(xs, -s, e.mult_minus);
        break;
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    if (d.infinity()[static_cast<size_t>(i)] == 0) continue;
    out.push_back({{"place", {{"x", i == 0 ? "inf0" : "inf1"}}}, {"mult", d.infinity()[static_cast<size_t>(i)]}});
  }
  return out;
}

curve::MeromorphicFunction function_from_json(const curve::HyperellipticCurve& c, const json& j) {
  return guarded("function", [&] {
    if (j.is_string() && j == "x") return curve::MeromorphicFunction::x(c);
    if (j.is_string() && j == "y") return curve::MeromorphicFunction::y(c);
    if (!j.is_object()) throw InputError("function must be \"x\", \"y\" or {\"a\", \"b\", \"h\"}");
    Poly a = j.contains("a") ? poly_from_json(j.at("a")) : Poly{};
    Poly b = j.contains("b") ? poly_from_json(j.at("b")) : Poly{};
    Poly h = j.contains("h") ? poly_from_json(j.at("h")) : Poly{1};
    if (h.is_zero()) throw InputError("zero denominator");
    return curve::MeromorphicFunction(c, a, b, h);
  });
}

json function_to_json(const curve::MeromorphicFunction& f) {
  return {{"a", poly_to_json(f.a())}, {"b", poly_to_json(f.b())}, {"h", poly_to_json(f.h())}};
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("expected a number or [re, im], got " + j.dump());
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

WeierstrassInput weierstrass_from_json(const json& j) {
  return guarded("weierstrass data", [&] {
    WeierstrassInput in;
    const json& dom = j.at("domain");
    if (dom.is_object()) {
      in.domain = weierstrass::Domain::Curve;
      auto c = curve_from_json(dom);
      in.curve = weierstrass::CurveData{function_from_json(c, j.at("phi")), function_from_json(c, j.at("omega"))};
      return in;
    }
    const std::string d = dom.get<std::string>();
    if (d == "plane")
      in.domain = weierstrass::Domain::Plane;
    else if (d == "torus")
      in.domain = weierstrass::Domain::Torus;
    else
      throw InputError("unknown domain " + d);
    weierstrass::PlanarData p;
    p.phi = rational_function_from(j.at("phi"));
    p.h = rational_function_from(j.at("omega"));
    for (auto& z : j.value("punctures", json::array())) p.punctures.push_back(complex_from_json(z));
    p.name = j.value("name", std::string{});
    in.planar = std::move(p);
    return in;
  });
}

json weierstrass_to_json(const weierstrass::PlanarData& d, weierstrass::Domain domain) {
  json p = json::array();
  for (auto z : d.punctures) p.push_back(complex_to_json(z));
  return {{"name", d.name},
          {"domain", domain == weierstrass::Domain::Torus ? "torus" : "plane"},
          {"phi", rational_function_to(d.phi)},
          {"omega", rational_function_to(d.h)},
          {"punctures", p}};
}

json weierstrass_to_json(const weierstrass::CurveData& d) {
  return {{"domain", curve_to_json(d.phi.curve())}, {"phi", function_to_json(d.phi)}, {"omega", function_to_json(d.f)}};
}

ledger::HarmonicMapRecord record_from_json(const json& j) {
  return guarded("record", [&] {
    static const std::set<std::string> known = {
        "name",       "provenance", "euler_char", "orientable",      "target_dim", "linearly_full",
        "conformal",  "isotropy",   "q",          "m",               "energy_over_pi", "total_branching",
        "chern",      "ramification", "osculating", "genus"};
    for (auto& [k, v] : j.items())
      if (!known.count(k)) throw InputError("unknown record key " + k);
    ledger::HarmonicMapRecord r;
    r.name = j.value("name", std::string{});
    r.provenance = j.value("provenance", std::string{});
    r.euler_char = j.at("euler_char").get<int>();
    r.orientable = j.value("orientable", true);
    r.target_dim = j.at("target_dim").get<int>();
    r.linearly_full = j.value("linearly_full", true);
    r.conformal = j.value("conformal", true);
    const std::string iso = j.value("isotropy", std::string("totally-isotropic"));
    if (iso == "totally-isotropic")
      r.isotropy = ledger::Isotropy::TotallyIsotropic;
    else if (iso == "not-totally-isotropic")
      r.isotropy = ledger::Isotropy::NotTotallyIsotropic;
    else
      throw InputError("isotropy must be totally-isotropic or not-totally-isotropic");
    r.q = j.value("q", 1);
    r.m = j.value("m", r.totally_isotropic() ? r.target_dim / 2 : 1);
    if (j.contains("energy_over_pi") && !j.at("energy_over_pi").is_null())
      r.energy_over_pi = rational_from(j.at("energy_over_pi"));
    r.total_branching = j.at("total_branching").get<long>();
    const json chern = j.value("chern", json::object()), ram = j.value("ramification", json::object());
    for (auto& [k, v] : chern.items()) r.chern[level_key(k)] = v.get<long>();
    for (auto& [k, v] : ram.items()) r.ramification[level_key(k)] = v.get<long>();
    r.osculating = j.value("osculating", std::vector<long>{});
    return r;
  });
}

json record_to_json(const ledger::HarmonicMapRecord& r) {
  json chern = json::object(), ram = json::object();
  for (auto& [k, v] : r.chern) chern[std::to_string(k)] = v;
  for (auto& [k, v] : r.ramification) ram[std::to_string(k)] = v;
  json j = {{"name", r.name},
            {"provenance", r.provenance},
            {"euler_char", r.euler_char},
            {"orientable", r.orientable},
            {"target_dim", r.target_dim},
            {"linearly_full", r.linearly_full},
            {"conformal", r.conformal},
            {"isotropy", r.totally_isotropic() ? "totally-isotropic" : "not-totally-isotropic"},
            {"q", r.q},
            {"m", r.m},
            {"total_branching", r.total_branching},
            {"chern", chern},
            {"ramification", ram},
            {"osculating", r.osculating}};
  j["energy_over_pi"] = r.energy_over_pi ? json(to_string(*r.energy_over_pi)) : json(nullptr);
  return j;
}

std::vector<ledger::HarmonicMapRecord> records_from_json(const json& j) {
  std::vector<ledger::HarmonicMapRecord> out;
  if (j.is_object() && j.contains("records")) return records_from_json(j.at("records"));
  if (j.is_object()) {
    out.push_back(record_from_json(j));
    return out;
  }
  if (!j.is_array()) throw InputError("records must be an object or a list");
  for (auto& r : j) out.push_back(record_from_json(r));
  return out;
}

json to_json(const ledger::BoundReport& b) {
  return {{"name", b.name},   {"lhs", b.lhs},     {"rhs", b.rhs},
          {"slack", b.slack}, {"pass", b.pass},   {"exact", b.exact},
          {"equality_required", b.equality_required}, {"note", b.note}};
}

json to_json(const spectral::YangYauReport& r) {
  return {{"genus", r.genus},
          {"bound", r.bound},
          {"lambda1_bar", r.lambda1_bar},
          {"margin", r.margin},
          {"mesh_tolerance", r.mesh_tolerance},
          {"strict_expected", r.strict_expected},
          {"pass", r.pass}};
}

json to_json(const spectral::IndexResult& r) {
  return {{"index", r.index}, {"nullity", r.nullity}, {"band", r.band}, {"shifted", r.shifted}};
}

json to_json(const curve::RiemannRochReport& r) {
  return {{"h0_d", r.h0_d}, {"h0_k_minus_d", r.h0_k_minus_d}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.ok}};
}

conformal::MaximizeConfig config_from_json(const json& j) {
  return guarded("maximize config", [&] {
    conformal::MaximizeConfig c;
    if (!j.is_object()) throw InputError("config must be an object");
    for (auto& [k, v] : j.items()) {
      if (k == "max_iters") c.max_iters = v.get<int>();
      else if (k == "step") c.step = v.get<double>();
      else if (k == "band") c.band = v.get<double>();
      else if (k == "tol") c.tol = v.get<double>();
      else if (k == "backtrack_tol") c.backtrack_tol = v.get<double>();
      else if (k == "softmin") c.softmin = v.get<double>();
      else if (k == "max_backtracks") c.max_backtracks = v.get<int>();
      else if (k == "eigen_count") c.eigen_count = v.get<int>();
      else if (k == "solver_tol") c.solver_tol = v.get<double>();
      else if (k == "gram_floor") c.gram_floor = v.get<double>();
      else if (k == "max_log_step") c.max_log_step = v.get<double>();
      else if (k == "mass_rule") {
        const std::string rule = v.get<std::string>();
        if (rule == "centroid") c.rule = spectral::MassRule::Centroid;
        else if (rule == "three-point") c.rule = spectral::MassRule::ThreePoint;
        else throw InputError("mass_rule must be centroid or three-point");
      } else {
        throw InputError("unknown config key " + k);
      }
    }
    if (c.max_iters < 0 || c.step <= 0 || c.band < 0 || c.tol <= 0 || c.eigen_count < 2 || c.softmin <= 0)
      throw InputError("maximize config out of range");
    return c;
  });
}

json config_to_json(const conformal::MaximizeConfig& c) {
  return {{"max_iters", c.max_iters},
          {"step", c.step},
          {"band", c.band},
          {"tol", c.tol},
          {"backtrack_tol", c.backtrack_tol},
          {"softmin", c.softmin},
          {"max_backtracks", c.max_backtracks},
          {"eigen_count", c.eigen_count},
          {"solver_tol", c.solver_tol},
          {"gram_floor", c.gram_floor},
          {"max_log_step", c.max_log_step},
          {"mass_rule", c.rule == spectral::MassRule::Centroid ? "centroid" : "three-point"}};
}

}  // namespace spectralab::io
