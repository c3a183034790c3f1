#pragma once

// Weierstrass data (phi, omega) and the immersion
//   X = Re int ((1 - phi^2) omega, i (1 + phi^2) omega, 2 phi omega).
//
// Planar data are numeric (complex coefficients, omega = h(z) dz). Curve
// data are exact: phi and f are functions on a hyperelliptic curve and
// omega = f dx/y.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "spectralab/curve.hpp"
#include "spectralab/spectral.hpp"

namespace spectralab::weierstrass {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<Complex, 3>;

/// Complex polynomial, ascending coefficients.
struct CPoly {
  std::vector<Complex> c;
  Complex eval(Complex z) const;
  int degree() const;
};

/// num / den with complex coefficients.
struct RationalFunction {
  CPoly num;
  CPoly den{{Complex(1.0)}};
  Complex eval(Complex z) const;
  /// Roots of the denominator (numeric, clustered).
  std::vector<Complex> poles() const;
  /// Laurent coefficients at z0: entry j is the coefficient of (z - z0)^(lowest + j).
  std::pair<int, std::vector<Complex>> laurent(Complex z0, int terms) const;
  /// Order of vanishing at z0 (negative for poles).
  int order_at(Complex z0) const;
};

RationalFunction identity_function();
RationalFunction constant_function(Complex v);

enum class Domain { Plane, Torus, Curve };

struct PlanarData {
  RationalFunction phi;
  RationalFunction h;  // omega = h(z) dz
  std::vector<Complex> punctures;
  std::string name;

  CVec3 integrand(Complex z) const;
};

/// phi = z, omega = dz.
PlanarData enneper();
/// phi = z, omega = dz / z^2, puncture at 0.
PlanarData catenoid();
/// phi = z, omega = i dz / z^2, puncture at 0.
PlanarData helicoid();

struct BranchPoint {
  Complex z;
  int multiplicity = 0;
};

struct PlanarBranching {
  std::vector<BranchPoint> points;
  int total_order = 0;
  /// (omega) - 2 P_phi at the same candidate points agrees with the min rule.
  bool identity_holds = false;
};

/// mult_p B = min over the three components of ord_p. Throws DomainError
/// ("not an immersion datum") at an undeclared pole.
PlanarBranching branching_divisor(const PlanarData& d);

struct Loop {
  enum class Kind { Circle, Polygon } kind = Kind::Circle;
  Complex center;
  double radius = 1.0;
  std::vector<Complex> vertices;  // Polygon: closed automatically

  static Loop circle(Complex c, double r) { return {Kind::Circle, c, r, {}}; }
  static Loop polygon(std::vector<Complex> v) { return {Kind::Polygon, {}, 0.0, std::move(v)}; }
};

struct PeriodResult {
  Vec3 quadrature{};
  Vec3 residue{};  // Re(2 pi i * sum of enclosed residues); circles only
  bool residue_available = false;
  double max_error_estimate = 0.0;
};

/// Real part of the loop integral of the integrand. Throws DomainError when
/// the loop passes through a pole, SolverError when quadrature fails.
PeriodResult period(const PlanarData& d, const Loop& loop, double tol = 1e-10);
std::vector<PeriodResult> periods(const PlanarData& d, const std::vector<Loop>& loops, double tol = 1e-10);

/// X(p) along the straight path from the basepoint (or a polyline through `via`).
Vec3 evaluate_immersion(const PlanarData& d, Complex base, Complex p, const std::vector<Complex>& via = {},
                        double tol = 1e-12);
std::vector<Vec3> evaluate_immersion(const PlanarData& d, Complex base, const std::vector<Complex>& points,
                                     double tol = 1e-12);

struct LocalSample {
  Complex z;
  double harmonic_residual = 0.0;
  double conformal_residual = 0.0;
  double metric_residual = 0.0;
  double normal_residual = 0.0;
  bool pass = false;
};

struct LocalIdentityReport {
  std::vector<LocalSample> samples;
  int failures = 0;
  double tol = 0.0;
  double worst_harmonic = 0.0, worst_conformal = 0.0, worst_metric = 0.0, worst_normal = 0.0;
};

/// Finite-difference checks on an n x n grid over [lo, hi] (complex corners).
/// Samples near poles and branch points are skipped.
LocalIdentityReport local_identity_check(const PlanarData& d, Complex lo, Complex hi, int n, double tol = 1e-5,
                                         double step = 1e-3);

/// Stereographic image of phi, matching the unit normal of X.
Vec3 stereographic(Complex phi);

// ---- curves

struct CurveData {
  curve::MeromorphicFunction phi;
  curve::MeromorphicFunction f;  // omega = f dx/y
};

struct CurveBranching {
  curve::Divisor b;
  curve::Divisor omega_divisor;
  curve::Divisor polar;  // P_phi
  int total_order = 0;
  bool identity_holds = false;  // B == (omega) - 2 P_phi
};

/// Throws DomainError when deg(K - 2 P_phi) < 0 (no holomorphic section exists).
void require_section_space(const curve::MeromorphicFunction& phi);
/// Min-of-orders branching divisor. Throws DomainError when B is not effective.
CurveBranching branching_divisor(const CurveData& d);

struct IndexBoundReport {
  int h0_k_minus_b = 0;
  int index = 0;
  int bound_numerator = 0;  // bound = numerator / 3
  double bound = 0.0;
  bool pass = false;
};
/// ind >= (2 h0(K - B) - 3) / 3, compared exactly.
IndexBoundReport index_bound_check(int h0_k_minus_b, int index);
IndexBoundReport index_bound_check(int h0_k_minus_b, const spectral::IndexResult& index);

}  // namespace spectralab::weierstrass
