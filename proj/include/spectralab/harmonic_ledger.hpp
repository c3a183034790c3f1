#pragma once

// Bookkeeping for harmonic sequences of maps M -> S^n: Chern numbers of the
// line bundles L_p, ramification indices r(d_p), osculating degrees, energy
// and total branching bounds. Records are metadata; nothing here integrates
// a map.
//
// Energies are stored exactly as multiples of pi.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spectralab/mesh.hpp"
#include "spectralab/rational_poly.hpp"

namespace spectralab::ledger {

enum class Isotropy { NotTotallyIsotropic, TotallyIsotropic };

struct HarmonicMapRecord {
  std::string name;
  std::string provenance;
  int euler_char = 2;
  bool orientable = true;
  int target_dim = 2;  // n
  bool linearly_full = true;
  bool conformal = true;
  Isotropy isotropy = Isotropy::TotallyIsotropic;
  int q = 1;  // first nonvanishing level (not totally isotropic)
  int m = 1;  // n / 2 (totally isotropic)
  std::optional<Rational> energy_over_pi;
  long total_branching = 0;  // b
  std::map<int, long> chern;          // c1(L_p)
  std::map<int, long> ramification;   // r(d_p)
  std::vector<long> osculating;       // delta_0 .. delta_m

  /// Orientable genus; throws DomainError for non-orientable records.
  int genus() const;
  bool totally_isotropic() const { return isotropy == Isotropy::TotallyIsotropic; }
};

/// Structural checks (n = 2m and conformal when totally isotropic, b >= 0,
/// chi parity). Throws InputError.
void validate(const HarmonicMapRecord& r);

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
  /// Integer/rational sides compared exactly.
  bool exact = true;
  /// Set when the bound is asserted as an equality (Riemann-Hurwitz at m = 1).
  bool equality_required = false;
  std::string note;
};

/// Ramification identities, telescoped sums, trivial L_0, conjugation
/// symmetry, osculating degrees and the energy routes. Never throws on
/// inconsistent data; each check is one report.
std::vector<BoundReport> ledger_consistency(const HarmonicMapRecord& r);

/// E / pi = 2 (m(m+1)(1 - gamma) + sum_j (m - j) r(d_j)). Throws DomainError
/// ("formula requires total isotropy") or InputError on missing ramification.
Rational energy_from_ramification(const HarmonicMapRecord& r);
/// True when the formula value is zero: no linearly full map has zero energy.
bool energy_degenerate(const HarmonicMapRecord& r);

/// b <= -(n+1) chi / 2, plus the refined q(2 gamma - 2) + c1(L_q) when c1(L_q) is present.
std::vector<BoundReport> bound_nonisotropic(const HarmonicMapRecord& r);
/// b <= E/(2 pi m) - (m+1) chi / 2; equality required at m = 1.
BoundReport bound_isotropic(const HarmonicMapRecord& r);
/// b <= -chi for non-conformal maps.
BoundReport bound_nonconformal(const HarmonicMapRecord& r);

struct ExtremalConstants {
  std::optional<double> multiplicity;  // C': n <= C' (gamma + k)
  std::optional<double> korevaar;      // C: Lambda_k <= C k (gamma + 1)
};
/// Total branching of a conformally extremal metric for lambda_k, from the two
/// branches (non-isotropic via the dimension cap, isotropic via the energy
/// cap). `b` is the observed count, if any. Throws InputError naming missing constants.
BoundReport bound_extremal(int genus, int k, const ExtremalConstants& c, std::optional<long> b = std::nullopt);

/// Oriented double cover: chi, b, E and Chern/ramification data doubled.
HarmonicMapRecord nonorientable_reduce(const HarmonicMapRecord& r);

/// Every applicable bound (non-orientable records go through the double cover).
std::vector<BoundReport> audit(const HarmonicMapRecord& r);
bool all_pass(const std::vector<BoundReport>& reports);

/// Total ramification of the rational map num/den : S^2 -> S^2, counting
/// critical points of finite values, poles and infinity. Exact.
long ramification_total(const Poly& num, const Poly& den);

// ---- catalog

HarmonicMapRecord power_map_record(int d);
HarmonicMapRecord veronese_record();
/// The Veronese map through RP^2.
HarmonicMapRecord veronese_rp2_record();
HarmonicMapRecord clifford_torus_record();
/// Holomorphic projection of a glued double cover, read off the mesh.
HarmonicMapRecord cover_projection_record(const mesh::Mesh& cover, const std::string& name);
/// z^d for d <= 6, Veronese, RP^2 Veronese, Clifford torus, glued covers of genus 1, 2, 3.
std::vector<HarmonicMapRecord> catalog(int cover_refinement = 2);

}  // namespace spectralab::ledger
