#include "spectralab/harmonic_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spectralab/error.hpp"

namespace spectralab::ledger {

namespace {

Rational frac(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

BoundReport exact_report(std::string name, const Rational& lhs, const Rational& rhs, bool equality = false,
                         std::string note = {}) {
  BoundReport b;
  b.name = std::move(name);
  b.lhs = lhs.get_d();
  b.rhs = rhs.get_d();
  b.slack = Rational(rhs - lhs).get_d();
  b.exact = true;
  b.equality_required = equality;
  b.pass = equality ? lhs == rhs : lhs <= rhs;
  b.note = std::move(note);
  return b;
}

// Consistency identities are equalities.
BoundReport identity(std::string name, const Rational& lhs, const Rational& rhs) {
  return exact_report(std::move(name), lhs, rhs, true);
}

// 2 gamma - 2, written as -chi so the same identities serve non-orientable data.
long two_g_minus_2(const HarmonicMapRecord& r) { return -r.euler_char; }

const long* find(const std::map<int, long>& m, int k) {
  auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}

std::string level(const char* what, int p) {
  std::ostringstream s;
  s << what << "(" << p << ")";
  return s.str();
}

// Runs `f` on the double cover of a non-orientable record and halves both sides.
template <class F>
BoundReport via_cover(const HarmonicMapRecord& r, F f) {
  BoundReport b = f(nonorientable_reduce(r));
  b.lhs /= 2;
  b.rhs /= 2;
  b.slack /= 2;
  b.note = b.note.empty() ? "via oriented double cover" : b.note + "; via oriented double cover";
  return b;
}

}  // namespace

int HarmonicMapRecord::genus() const {
  if (!orientable) throw DomainError("genus of a non-orientable record");
  return (2 - euler_char) / 2;
}

void validate(const HarmonicMapRecord& r) {
  if (r.euler_char > 2) throw InputError("Euler characteristic exceeds 2");
  if (r.orientable && r.euler_char % 2 != 0) throw InputError("orientable surface with odd Euler characteristic");
  if (!r.orientable && r.euler_char > 1) throw InputError("non-orientable surface with Euler characteristic above 1");
  if (r.target_dim < 2) throw InputError("target dimension must be at least 2");
  if (r.total_branching < 0) throw InputError("total branching must be non-negative");
  if (r.totally_isotropic()) {
    if (r.target_dim % 2 != 0) throw InputError("totally isotropic map into an odd-dimensional sphere");
    if (r.m < 1 || r.target_dim != 2 * r.m) throw InputError("totally isotropic map needs n = 2m");
    if (!r.conformal) throw InputError("totally isotropic maps are conformal");
    if (!r.osculating.empty() && static_cast<int>(r.osculating.size()) != r.m + 1)
      throw InputError("osculating degrees must be delta_0 .. delta_m");
  } else {
    if (r.q < 1 || 2 * r.q > r.target_dim + 1) throw InputError("level q must satisfy 1 <= q and 2q <= n + 1");
    if (r.conformal != (r.q >= 2)) throw InputError("conformal exactly when the first nonvanishing level q >= 2");
    if (!r.osculating.empty()) throw InputError("osculating degrees belong to totally isotropic records");
  }
  if (r.energy_over_pi && *r.energy_over_pi < 0) throw InputError("energy must be non-negative");
}

std::vector<BoundReport> ledger_consistency(const HarmonicMapRecord& r) {
  std::vector<BoundReport> out;
  const long k2 = two_g_minus_2(r);
  const auto& c = r.chern;
  const auto& ram = r.ramification;

  if (auto c0 = find(c, 0)) out.push_back(identity("c1(L_0) = 0", *c0, 0));
  for (auto& [p, v] : c) {
    if (p <= 0) continue;
    if (auto cm = find(c, -p)) out.push_back(identity(level("c1(L_-p) = -c1(L_p), p=", p).c_str(), *cm, -v));
  }
  if (r.totally_isotropic()) {
    bool full = true;
    long sum = 0;
    for (int p = -r.m; p <= r.m; ++p) {
      if (auto v = find(c, p)) sum += *v;
      else full = false;
    }
    if (full) out.push_back(identity("sum of c1(L_p) = 0", sum, 0));
  }
  for (auto& [p, v] : ram) {
    out.push_back(exact_report(level("r >= 0 at p=", p), 0, v));
    auto a = find(c, p), b = find(c, p + 1);
    if (a && b) out.push_back(identity(level("ramification identity p=", p), v, k2 + *b - *a));
  }
  if (auto r0 = find(ram, 0)) out.push_back(identity("b = r(d_0)", r.total_branching, *r0));

  // Telescoped form c1(L_k) + k(2g-2) = sum_{p<k} r(d_p).
  long acc = 0;
  for (int k = 1;; ++k) {
    auto rp = find(ram, k - 1);
    if (!rp) break;
    acc += *rp;
    if (auto ck = find(c, k)) out.push_back(identity(level("telescoped sum k=", k), *ck + k * k2, acc));
  }

  if (r.totally_isotropic() && !r.osculating.empty()) {
    const auto& d = r.osculating;
    for (int k = 0; k <= r.m; ++k) {
      long prev = k == 0 ? 0 : d[static_cast<size_t>(k - 1)];
      if (auto ck = find(c, -r.m + k))
        out.push_back(identity(level("osculating c1(L_-m+k) = delta_k-1 - delta_k, k=", k), *ck,
                               prev - d[static_cast<size_t>(k)]));
    }
  }

  if (r.totally_isotropic() && r.energy_over_pi) {
    const Rational& e = *r.energy_over_pi;
    if (!r.osculating.empty())
      out.push_back(identity("E = 2 pi delta_m", e, 2 * r.osculating.back()));
    bool have = true;
    long sum = 0;
    for (int p = 1; p <= r.m; ++p) {
      if (auto v = find(c, p)) sum += *v;
      else have = false;
    }
    if (have) out.push_back(identity("E = 2 pi sum_{p>=1} c1(L_p)", e, 2 * sum));
    bool ram_full = true;
    for (int j = 0; j < r.m; ++j) ram_full = ram_full && find(ram, j);
    if (ram_full) out.push_back(identity("E = energy formula", e, energy_from_ramification(r)));
  }
  return out;
}

Rational energy_from_ramification(const HarmonicMapRecord& r) {
  if (!r.totally_isotropic()) throw DomainError("formula requires total isotropy");
  // m(m+1)(1 - gamma) = m(m+1) chi / 2.
  Rational e = Rational(r.m * (r.m + 1)) * frac(r.euler_char, 2);
  for (int j = 0; j < r.m; ++j) {
    auto v = find(r.ramification, j);
    if (!v) throw InputError(level("missing ramification index r(d_j), j=", j));
    e += Rational((r.m - j) * *v);
  }
  return 2 * e;
}

bool energy_degenerate(const HarmonicMapRecord& r) { return energy_from_ramification(r) == 0; }

std::vector<BoundReport> bound_nonisotropic(const HarmonicMapRecord& r) {
  if (r.totally_isotropic()) throw DomainError("bound requires a map that is not totally isotropic");
  std::vector<BoundReport> out;
  auto topo = [](const HarmonicMapRecord& x) {
    return exact_report("b <= -(n+1) chi / 2", x.total_branching, frac(-(x.target_dim + 1) * x.euler_char, 2));
  };
  auto case_a = [](const HarmonicMapRecord& x) {
    return exact_report("b <= q (2 gamma - 2)", x.total_branching, Rational(x.q * two_g_minus_2(x)));
  };
  if (!r.orientable) {
    out.push_back(via_cover(r, topo));
    out.push_back(via_cover(r, case_a));
    return out;
  }
  out.push_back(topo(r));
  out.push_back(case_a(r));
  out.push_back(identity("-(n+1) chi / 2 = (n+1)(gamma - 1)", frac(-(r.target_dim + 1) * r.euler_char, 2),
                         Rational((r.target_dim + 1) * (r.genus() - 1))));
  if (auto cq = find(r.chern, r.q)) {
    out.push_back(exact_report(level("c1(L_q) <= 0, q=", r.q), *cq, 0));
    out.push_back(exact_report("b <= q (2 gamma - 2) + c1(L_q)", r.total_branching, r.q * two_g_minus_2(r) + *cq));
  }
  return out;
}

BoundReport bound_isotropic(const HarmonicMapRecord& r) {
  if (!r.totally_isotropic()) throw DomainError("bound requires a totally isotropic map");
  if (!r.energy_over_pi) throw InputError("missing energy");
  if (!r.orientable) return via_cover(r, [](const HarmonicMapRecord& x) { return bound_isotropic(x); });
  Rational rhs = *r.energy_over_pi / Rational(2 * r.m) - frac((r.m + 1) * r.euler_char, 2);
  bool eq = r.m == 1;
  return exact_report(eq ? "b = E/(2 pi) - chi (Riemann-Hurwitz)" : "b <= E/(2 pi m) - (m+1) chi / 2",
                      r.total_branching, rhs, eq);
}

BoundReport bound_nonconformal(const HarmonicMapRecord& r) {
  if (r.conformal) throw DomainError("non-conformal bound requires a non-conformal map");
  if (!r.orientable) return via_cover(r, [](const HarmonicMapRecord& x) { return bound_nonconformal(x); });
  auto b = exact_report("b <= -chi", r.total_branching, -r.euler_char);
  if (-r.euler_char < 0) b.note = "bound is negative: no such map exists";
  return b;
}

BoundReport bound_extremal(int genus, int k, const ExtremalConstants& c, std::optional<long> b) {
  std::vector<std::string> missing;
  if (!c.multiplicity) missing.push_back("multiplicity constant C'");
  if (!c.korevaar) missing.push_back("Korevaar constant C");
  if (!missing.empty()) {
    std::string msg = "missing constants:";
    for (auto& s : missing) msg += " " + s + ";";
    msg.pop_back();
    throw InputError(msg);
  }
  if (genus < 0 || k < 1) throw InputError("need genus >= 0 and k >= 1");
  const double g = genus;
  const double n_cap = std::floor(*c.multiplicity * (g + k));
  // Not totally isotropic: b <= (n+1)(gamma-1) with n at its cap.
  double non_iso = (n_cap + 1) * (g - 1);
  // Totally isotropic: E = Lambda_k / 2 <= C k (gamma+1) / 2, then
  // b <= E/(2 pi m) + (m+1)(gamma-1), maximized over admissible m.
  const double e_cap = *c.korevaar * k * (g + 1) / 2;
  double iso = -std::numeric_limits<double>::infinity();
  const int m_max = std::max(1, static_cast<int>(n_cap / 2));
  for (int m = 1; m <= m_max; ++m) iso = std::max(iso, e_cap / (2 * std::numbers::pi * m) + (m + 1) * (g - 1));

  BoundReport r;
  r.name = "b <= C (gamma+1)(gamma+k) pipeline";
  r.exact = false;
  r.rhs = std::max(non_iso, iso);
  r.lhs = b ? static_cast<double>(*b) : 0.0;
  r.slack = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs;
  std::ostringstream note;
  note << "non-isotropic branch " << non_iso << " (n <= " << n_cap << "), isotropic branch " << iso
       << ", shape (gamma+1)(gamma+k) = " << (genus + 1) * (genus + k);
  r.note = note.str();
  return r;
}

HarmonicMapRecord nonorientable_reduce(const HarmonicMapRecord& r) {
  if (r.orientable) throw InputError("record is already orientable");
  HarmonicMapRecord out = r;
  out.name = r.name + " (double cover)";
  out.orientable = true;
  out.euler_char = 2 * r.euler_char;
  out.total_branching = 2 * r.total_branching;
  if (r.energy_over_pi) out.energy_over_pi = 2 * *r.energy_over_pi;
  for (auto& [p, v] : out.chern) v *= 2;
  for (auto& [p, v] : out.ramification) v *= 2;
  for (auto& v : out.osculating) v *= 2;
  return out;
}

std::vector<BoundReport> audit(const HarmonicMapRecord& r) {
  std::vector<BoundReport> out = ledger_consistency(r);
  if (r.totally_isotropic()) {
    if (r.energy_over_pi) out.push_back(bound_isotropic(r));
  } else {
    auto v = bound_nonisotropic(r);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (!r.conformal) out.push_back(bound_nonconformal(r));
  return out;
}

bool all_pass(const std::vector<BoundReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& b) { return b.pass; });
}

long ramification_total(const Poly& num0, const Poly& den0) {
  if (den0.is_zero()) throw InputError("zero denominator");
  Poly g = gcd(num0, den0);
  Poly num = num0 / g, den = den0 / g;
  const int dn = num.is_zero() ? -1 : num.degree(), dd = den.degree();
  if (dn <= 0 && dd == 0) throw DomainError("constant map");
  const int d = std::max(dn, dd);
  // Zeros of num' den - num den' count critical points at finite values and
  // k - 1 at each pole of order k.
  Poly w = num.derivative() * den - num * den.derivative();
  long finite = w.degree();
  // Local degree at infinity.
  long e_inf;
  if (dn != dd) {
    e_inf = std::abs(dn - dd);
  } else {
    Poly t = num * den.coeff(dd) - den * num.coeff(dn);
    e_inf = d - (t.is_zero() ? 0 : t.degree());
  }
  return finite + e_inf - 1;
}

// ---- catalog

HarmonicMapRecord power_map_record(int d) {
  if (d < 1) throw InputError("degree must be positive");
  HarmonicMapRecord r;
  r.name = "z^" + std::to_string(d);
  r.provenance = "closed form: z -> z^d on the Riemann sphere";
  r.euler_char = 2;
  r.target_dim = 2;
  r.m = 1;
  r.energy_over_pi = Rational(4 * d);
  r.total_branching = 2L * d - 2;
  r.chern = {{-1, -2L * d}, {0, 0}, {1, 2L * d}};
  r.ramification = {{-1, 2L * d - 2}, {0, 2L * d - 2}};
  r.osculating = {2L * d, 2L * d};
  return r;
}

HarmonicMapRecord veronese_record() {
  HarmonicMapRecord r;
  r.name = "veronese";
  r.provenance = "closed form: Veronese map S^2 -> S^4";
  r.euler_char = 2;
  r.target_dim = 4;
  r.m = 2;
  r.energy_over_pi = Rational(12);
  r.total_branching = 0;
  r.chern = {{-2, -4}, {-1, -2}, {0, 0}, {1, 2}, {2, 4}};
  r.ramification = {{-2, 0}, {-1, 0}, {0, 0}, {1, 0}};
  r.osculating = {4, 6, 6};
  return r;
}

HarmonicMapRecord veronese_rp2_record() {
  HarmonicMapRecord r = veronese_record();
  r.name = "veronese-rp2";
  r.provenance = "closed form: Veronese map factored through RP^2";
  r.orientable = false;
  r.euler_char = 1;
  r.energy_over_pi = Rational(6);
  r.chern = {{-2, -2}, {-1, -1}, {0, 0}, {1, 1}, {2, 2}};
  r.osculating = {2, 3, 3};
  return r;
}

HarmonicMapRecord clifford_torus_record() {
  HarmonicMapRecord r;
  r.name = "clifford-torus";
  r.provenance = "closed form: minimal Clifford torus in S^3";
  r.euler_char = 0;
  r.target_dim = 3;
  r.isotropy = Isotropy::NotTotallyIsotropic;
  r.conformal = true;
  r.q = 2;
  r.total_branching = 0;
  r.chern = {{0, 0}, {1, 0}, {2, 0}};
  r.ramification = {{0, 0}, {1, 0}};
  return r;
}

HarmonicMapRecord cover_projection_record(const mesh::Mesh& cover, const std::string& name) {
  if (!cover.has_projection() || cover.projection_degree < 1) throw InputError("cover has no projection");
  long b = 0;
  for (auto& cp : cover.cone_points) b += cp.angle_over_2pi - 1;
  const int chi = cover.euler_characteristic();
  const long c1 = b + chi;  // c1(L_1) = r(d_0) - (2 gamma - 2)
  HarmonicMapRecord r;
  r.name = name;
  r.provenance = "glued mesh: cone points, Euler characteristic and projection degree";
  r.euler_char = chi;
  r.target_dim = 2;
  r.m = 1;
  r.energy_over_pi = Rational(4L * cover.projection_degree);
  r.total_branching = b;
  r.chern = {{-1, -c1}, {0, 0}, {1, c1}};
  r.ramification = {{-1, b}, {0, b}};
  r.osculating = {c1, c1};
  return r;
}

std::vector<HarmonicMapRecord> catalog(int cover_refinement) {
  std::vector<HarmonicMapRecord> out;
  for (int d = 1; d <= 6; ++d) out.push_back(power_map_record(d));
  out.push_back(veronese_record());
  out.push_back(veronese_rp2_record());
  out.push_back(clifford_torus_record());
  out.push_back(cover_projection_record(
      mesh::build_hyperelliptic_cover(mesh::tetrahedral_cover_spec(cover_refinement)), "tetrahedral-cover"));
  out.push_back(cover_projection_record(
      mesh::build_hyperelliptic_cover(mesh::octahedral_cover_spec(cover_refinement)), "octahedral-cover"));
  out.push_back(
      cover_projection_record(mesh::build_hyperelliptic_cover(mesh::cube_cover_spec(cover_refinement)), "cube-cover"));
  return out;
}

}  // namespace spectralab::ledger
