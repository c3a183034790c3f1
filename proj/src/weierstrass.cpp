#include "spectralab/weierstrass.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "spectralab/error.hpp"

namespace spectralab::weierstrass {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroRel = 1e-9;

CPoly trimmed(CPoly p) {
  double scale = 0.0;
  for (auto& v : p.c) scale = std::max(scale, std::abs(v));
  while (!p.c.empty() && std::abs(p.c.back()) <= 1e-14 * scale) p.c.pop_back();
  return p;
}

CPoly mul(const CPoly& a, const CPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  CPoly r;
  r.c.assign(a.c.size() + b.c.size() - 1, Complex(0.0));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

CPoly add(const CPoly& a, const CPoly& b, Complex sb = 1.0) {
  CPoly r;
  r.c.assign(std::max(a.c.size(), b.c.size()), Complex(0.0));
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += sb * b.c[i];
  return trimmed(r);
}

CPoly scaled(const CPoly& a, Complex s) {
  CPoly r = a;
  for (auto& v : r.c) v *= s;
  return r;
}

CPoly derivative(const CPoly& p) {
  CPoly r;
  for (size_t i = 1; i < p.c.size(); ++i) r.c.push_back(static_cast<double>(i) * p.c[i]);
  return r;
}

// Coefficients of p(z0 + t) in t.
std::vector<Complex> taylor_shift(const CPoly& p, Complex z0) {
  std::vector<Complex> a = p.c;
  const size_t n = a.size();
  for (size_t k = 0; k + 1 < n; ++k)
    for (size_t j = n - 1; j > k; --j) a[j - 1] += z0 * a[j];
  return a;
}

// Index of the first coefficient above the noise floor.
int leading_order(const std::vector<Complex>& a) {
  double scale = 0.0;
  for (auto& v : a) scale = std::max(scale, std::abs(v));
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > kZeroRel * scale) return static_cast<int>(i);
  return -1;
}

std::vector<Complex> roots(const CPoly& p0) {
  CPoly p = trimmed(p0);
  const int n = p.degree();
  if (n <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.c[static_cast<size_t>(i)] / p.c[static_cast<size_t>(n)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> raw(es.eigenvalues().data(), es.eigenvalues().data() + n);

  // Cluster multiple roots, then polish on the derivative where the root is simple.
  std::vector<Complex> out;
  std::vector<bool> used(raw.size(), false);
  for (size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    Complex sum = raw[i];
    int k = 1;
    used[i] = true;
    for (size_t j = i + 1; j < raw.size(); ++j) {
      if (!used[j] && std::abs(raw[j] - raw[i]) < 1e-4 * std::max(1.0, std::abs(raw[i]))) {
        used[j] = true;
        sum += raw[j];
        ++k;
      }
    }
    Complex z = sum / static_cast<double>(k);
    CPoly q = p;
    for (int d = 1; d < k; ++d) q = derivative(q);
    CPoly dq = derivative(q);
    for (int it = 0; it < 8; ++it) {
      Complex f = q.eval(z), df = dq.eval(z);
      if (std::abs(df) == 0.0) break;
      Complex step = f / df;
      z -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    out.push_back(z);
  }
  return out;
}

bool near(Complex a, Complex b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)); }

void add_unique(std::vector<Complex>& pts, Complex z) {
  for (auto& p : pts)
    if (near(p, z)) return;
  pts.push_back(z);
}

// The three integrand components as rational functions of z.
std::array<RationalFunction, 3> components(const PlanarData& d) {
  const CPoly& a = d.phi.num;
  const CPoly& b = d.phi.den;
  CPoly a2 = mul(a, a), b2 = mul(b, b), ab = mul(a, b);
  CPoly den = mul(b2, d.h.den);
  std::array<RationalFunction, 3> out;
  out[0] = {mul(add(b2, a2, -1.0), d.h.num), den};
  out[1] = {mul(scaled(add(b2, a2), Complex(0.0, 1.0)), d.h.num), den};
  out[2] = {mul(scaled(ab, 2.0), d.h.num), den};
  return out;
}

std::vector<Complex> singular_points(const PlanarData& d) {
  std::vector<Complex> pts;
  for (auto& z : d.phi.poles()) add_unique(pts, z);
  for (auto& z : d.h.poles()) add_unique(pts, z);
  return pts;
}

double segment_distance(Complex p, Complex a, Complex b) {
  Complex ab = b - a;
  double len2 = std::norm(ab);
  double t = len2 == 0.0 ? 0.0 : std::clamp(std::real((p - a) * std::conj(ab)) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

struct SegmentIntegral {
  Vec3 value{};
  double error = 0.0;
};

// Re of the integral of the integrand along z(t), t in [t0, t1].
template <class Path, class Speed>
SegmentIntegral integrate_path(const PlanarData& d, Path z, Speed dz, double t0, double t1, double tol) {
  SegmentIntegral out;
  for (int k = 0; k < 3; ++k) {
    auto f = [&](double t) { return d.integrand(z(t))[static_cast<size_t>(k)] * dz(t); };
    double err = 0.0, l1 = 0.0;
    Complex v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, t0, t1, 20, tol, &err, &l1);
    if (!std::isfinite(v.real()) || !std::isfinite(err)) throw SolverError("quadrature produced non-finite values", 0, err);
    if (err > 100.0 * tol * std::max(1.0, l1)) throw SolverError("quadrature did not converge", 20, err);
    out.value[static_cast<size_t>(k)] = v.real();
    out.error = std::max(out.error, err);
  }
  return out;
}

SegmentIntegral integrate_segment(const PlanarData& d, Complex a, Complex b, double tol) {
  return integrate_path(
      d, [&](double t) { return a + t * (b - a); }, [&](double) { return b - a; }, 0.0, 1.0, tol);
}

void check_path(const std::vector<Complex>& sing, Complex a, Complex b) {
  double scale = std::max(1.0, std::abs(b - a));
  for (auto& p : sing)
    if (segment_distance(p, a, b) <= 1e-9 * scale) throw DomainError("integration path passes through a pole");
}

Vec3 plus(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

}  // namespace

Complex CPoly::eval(Complex z) const {
  Complex r = 0.0;
  for (size_t i = c.size(); i-- > 0;) r = r * z + c[i];
  return r;
}

int CPoly::degree() const {
  return static_cast<int>(trimmed(*this).c.size()) - 1;
}

Complex RationalFunction::eval(Complex z) const { return num.eval(z) / den.eval(z); }

std::vector<Complex> RationalFunction::poles() const {
  std::vector<Complex> out;
  for (auto& z : roots(den)) {
    // Cancelled factors are not poles.
    if (order_at(z) < 0) out.push_back(z);
  }
  return out;
}

std::pair<int, std::vector<Complex>> RationalFunction::laurent(Complex z0, int terms) const {
  auto a = taylor_shift(num, z0);
  auto b = taylor_shift(den, z0);
  int oa = leading_order(a), ob = leading_order(b);
  if (ob < 0) throw DomainError("zero denominator");
  if (oa < 0) throw DomainError("undefined order of the zero function");
  std::vector<Complex> aa(a.begin() + oa, a.end()), bb(b.begin() + ob, b.end());
  aa.resize(std::max(aa.size(), static_cast<size_t>(terms)), Complex(0.0));
  std::vector<Complex> q(static_cast<size_t>(terms), Complex(0.0));
  for (int j = 0; j < terms; ++j) {
    Complex s = aa[static_cast<size_t>(j)];
    for (int i = 1; i <= j && i < static_cast<int>(bb.size()); ++i) s -= bb[static_cast<size_t>(i)] * q[static_cast<size_t>(j - i)];
    q[static_cast<size_t>(j)] = s / bb[0];
  }
  return {oa - ob, q};
}

int RationalFunction::order_at(Complex z0) const { return laurent(z0, 1).first; }

RationalFunction identity_function() { return {CPoly{{0.0, 1.0}}, CPoly{{1.0}}}; }
RationalFunction constant_function(Complex v) { return {CPoly{{v}}, CPoly{{1.0}}}; }

CVec3 PlanarData::integrand(Complex z) const {
  Complex f = phi.eval(z), w = h.eval(z);
  return {(1.0 - f * f) * w, Complex(0.0, 1.0) * (1.0 + f * f) * w, 2.0 * f * w};
}

PlanarData enneper() { return {identity_function(), constant_function(1.0), {}, "enneper"}; }

PlanarData catenoid() {
  return {identity_function(), {CPoly{{1.0}}, CPoly{{0.0, 0.0, 1.0}}}, {Complex(0.0)}, "catenoid"};
}

PlanarData helicoid() {
  return {identity_function(), {CPoly{{Complex(0.0, 1.0)}}, CPoly{{0.0, 0.0, 1.0}}}, {Complex(0.0)}, "helicoid"};
}

PlanarBranching branching_divisor(const PlanarData& d) {
  if (d.h.num.degree() < 0) throw InputError("omega is identically zero");
  if (d.phi.num.degree() <= 0 && d.phi.den.degree() <= 0) throw DomainError("constant Gauss map");
  std::vector<Complex> cand;
  for (auto& z : roots(d.h.num)) add_unique(cand, z);
  for (auto& z : singular_points(d)) add_unique(cand, z);
  for (auto& z : d.punctures) add_unique(cand, z);
  auto comp = components(d);

  PlanarBranching out;
  out.identity_holds = true;
  for (auto& z : cand) {
    bool puncture = std::any_of(d.punctures.begin(), d.punctures.end(), [&](Complex p) { return near(p, z); });
    int m = std::numeric_limits<int>::max();
    for (auto& c : comp) m = std::min(m, c.order_at(z));
    if (puncture) continue;
    if (m < 0) throw DomainError("not an immersion datum");
    int identity = d.h.order_at(z) - 2 * std::max(0, -d.phi.order_at(z));
    if (identity != m) out.identity_holds = false;
    if (m > 0) {
      out.points.push_back({z, m});
      out.total_order += m;
    }
  }
  return out;
}

PeriodResult period(const PlanarData& d, const Loop& loop, double tol) {
  auto sing = singular_points(d);
  PeriodResult out;
  if (loop.kind == Loop::Kind::Circle) {
    if (!(loop.radius > 0)) throw InputError("loop radius must be positive");
    for (auto& p : sing)
      if (std::abs(std::abs(p - loop.center) - loop.radius) <= 1e-9 * std::max(1.0, loop.radius))
        throw DomainError("loop passes through a pole");
    const Complex c = loop.center;
    const double r = loop.radius;
    auto z = [&](double t) { return c + std::polar(r, t); };
    auto dz = [&](double t) { return Complex(0.0, 1.0) * std::polar(r, t); };
    for (int q = 0; q < 4; ++q) {
      auto s = integrate_path(d, z, dz, q * kPi / 2, (q + 1) * kPi / 2, tol);
      out.quadrature = plus(out.quadrature, s.value);
      out.max_error_estimate = std::max(out.max_error_estimate, s.error);
    }
    auto comp = components(d);
    out.residue_available = true;
    for (size_t k = 0; k < 3; ++k) {
      Complex res = 0.0;
      for (auto& p : comp[k].poles()) {
        if (std::abs(p - c) >= r) continue;
        int low = comp[k].order_at(p);
        if (low > -1) continue;
        auto series = comp[k].laurent(p, -low).second;
        res += series[static_cast<size_t>(-1 - low)];
      }
      out.residue[k] = std::real(Complex(0.0, 2 * kPi) * res);
    }
    return out;
  }
  const auto& v = loop.vertices;
  if (v.size() < 2) throw InputError("polygon loop needs at least two vertices");
  for (size_t i = 0; i < v.size(); ++i) {
    Complex a = v[i], b = v[(i + 1) % v.size()];
    check_path(sing, a, b);
    auto s = integrate_segment(d, a, b, tol);
    out.quadrature = plus(out.quadrature, s.value);
    out.max_error_estimate = std::max(out.max_error_estimate, s.error);
  }
  return out;
}

std::vector<PeriodResult> periods(const PlanarData& d, const std::vector<Loop>& loops, double tol) {
  std::vector<PeriodResult> out;
  out.reserve(loops.size());
  for (auto& l : loops) out.push_back(period(d, l, tol));
  return out;
}

Vec3 evaluate_immersion(const PlanarData& d, Complex base, Complex p, const std::vector<Complex>& via, double tol) {
  auto sing = singular_points(d);
  std::vector<Complex> path{base};
  path.insert(path.end(), via.begin(), via.end());
  path.push_back(p);
  Vec3 x{};
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i] == path[i + 1]) continue;
    check_path(sing, path[i], path[i + 1]);
    x = plus(x, integrate_segment(d, path[i], path[i + 1], tol).value);
  }
  return x;
}

std::vector<Vec3> evaluate_immersion(const PlanarData& d, Complex base, const std::vector<Complex>& points,
                                     double tol) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (auto& p : points) out.push_back(evaluate_immersion(d, base, p, {}, tol));
  return out;
}

Vec3 stereographic(Complex phi) {
  double n2 = std::norm(phi);
  return {2 * phi.real() / (n2 + 1), 2 * phi.imag() / (n2 + 1), (n2 - 1) / (n2 + 1)};
}

LocalIdentityReport local_identity_check(const PlanarData& d, Complex lo, Complex hi, int n, double tol,
                                         double step) {
  if (n < 1) throw InputError("grid size must be positive");
  std::vector<Complex> avoid = singular_points(d);
  for (auto& z : roots(d.h.num)) add_unique(avoid, z);

  LocalIdentityReport rep;
  rep.tol = tol;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double u = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
      double v = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
      Complex z(lo.real() + u * (hi.real() - lo.real()), lo.imag() + v * (hi.imag() - lo.imag()));
      double clearance = std::numeric_limits<double>::infinity();
      for (auto& p : avoid) clearance = std::min(clearance, std::abs(p - z));
      if (clearance < 20 * step) continue;
      // Keep the stencil small relative to the distance to the nearest singularity.
      const double s = step * std::min(1.0, clearance);

      auto dx = [&](Complex delta) { return integrate_segment(d, z, z + delta, 1e-13).value; };
      Vec3 xp = dx(s), xm = dx(-s), yp = dx(Complex(0, s)), ym = dx(Complex(0, -s));
      Eigen::Vector3d Xp(xp.data()), Xm(xm.data()), Yp(yp.data()), Ym(ym.data());
      Eigen::Vector3d Xu = (Xp - Xm) / (2 * s), Xv = (Yp - Ym) / (2 * s);
      Eigen::Vector3d lap = (Xp + Xm + Yp + Ym) / (s * s);

      Complex f = d.phi.eval(z);
      double lam = (1 + std::norm(f)) * std::abs(d.h.eval(z));
      double lam2 = lam * lam;
      double e = Xu.dot(Xu), g = Xv.dot(Xv), fuv = Xu.dot(Xv);

      LocalSample smp;
      smp.z = z;
      // Relative to the second-derivative scale lam / clearance.
      smp.harmonic_residual = lap.norm() * std::min(1.0, clearance) / std::max(1.0, lam);
      smp.conformal_residual = std::max(std::abs(e - g), 2 * std::abs(fuv)) / (e + g);
      smp.metric_residual = std::abs(0.5 * (e + g) - lam2) / lam2;
      Eigen::Vector3d nrm = Xu.cross(Xv).normalized();
      Vec3 st = stereographic(f);
      smp.normal_residual = (nrm - Eigen::Vector3d(st.data())).norm();
      smp.pass = smp.harmonic_residual <= tol && smp.conformal_residual <= tol && smp.metric_residual <= tol &&
                 smp.normal_residual <= tol;
      if (!smp.pass) ++rep.failures;
      rep.worst_harmonic = std::max(rep.worst_harmonic, smp.harmonic_residual);
      rep.worst_conformal = std::max(rep.worst_conformal, smp.conformal_residual);
      rep.worst_metric = std::max(rep.worst_metric, smp.metric_residual);
      rep.worst_normal = std::max(rep.worst_normal, smp.normal_residual);
      rep.samples.push_back(smp);
    }
  }
  return rep;
}

// ---- curves

void require_section_space(const curve::MeromorphicFunction& phi) {
  if (phi.is_constant()) throw DomainError("constant Gauss map");
  const auto& c = phi.curve();
  auto [zeros, poles] = divisor_of(phi).split_signs();
  (void)zeros;
  int deg_k = 2 * c.genus() - 2;
  if (deg_k - 2 * poles.degree() < 0) throw DomainError("deg(K - 2P_phi) < 0: no holomorphic section exists");
}

CurveBranching branching_divisor(const CurveData& d) {
  require_section_space(d.phi);
  const auto& c = d.phi.curve();
  if (!(c == d.f.curve())) throw InputError("phi and omega live on different curves");
  if (d.f.is_zero()) throw InputError("omega is identically zero");
  auto one = curve::MeromorphicFunction::constant(c, 1);
  auto phi2 = d.phi * d.phi;

  auto omega = one_form_divisor(d.f);
  auto [zeros, poles] = divisor_of(d.phi).split_signs();
  (void)zeros;
  // 1 - phi^2 and 1 + phi^2 are nonzero because phi is not constant.
  curve::Divisor m = curve::min(divisor_of(one - phi2), divisor_of(one + phi2));
  m = curve::min(m, divisor_of(d.phi));
  CurveBranching out{omega + m, omega, poles};
  if (!out.b.is_effective()) throw DomainError("not an immersion datum: branching divisor is not effective");
  out.total_order = out.b.degree();
  out.identity_holds = out.b == out.omega_divisor - out.polar * 2;
  return out;
}

IndexBoundReport index_bound_check(int h0_k_minus_b, int index) {
  IndexBoundReport r;
  r.h0_k_minus_b = h0_k_minus_b;
  r.index = index;
  r.bound_numerator = 2 * h0_k_minus_b - 3;
  r.bound = r.bound_numerator / 3.0;
  r.pass = 3 * index >= r.bound_numerator;
  return r;
}

IndexBoundReport index_bound_check(int h0_k_minus_b, const spectral::IndexResult& index) {
  return index_bound_check(h0_k_minus_b, index.index);
}

}  // namespace spectralab::weierstrass
