#include "spectralab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spectralab/error.hpp"

namespace spectralab::spectral {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Corner {
  double area;
  std::array<double, 3> cot;  // cot of the angle at each corner
};

Corner corner_data(const std::array<double, 3>& l) {
  Corner c{mesh::triangle_area(l), {}};
  if (!(c.area > 0)) throw InputError("degenerate triangle");
  for (int k = 0; k < 3; ++k) {
    double a = l[static_cast<size_t>(k)], b = l[static_cast<size_t>((k + 1) % 3)], d = l[static_cast<size_t>((k + 2) % 3)];
    c.cot[static_cast<size_t>(k)] = (b * b + d * d - a * a) / (4.0 * c.area);
  }
  return c;
}

// Local mass matrix for weight w(x) = scale * rho(x)^2 on one triangle.
Eigen::Matrix3d local_mass(double area, const std::array<double, 3>& rho, double scale, MassRule rule) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  if (rule == MassRule::Centroid) {
    double rc = (rho[0] + rho[1] + rho[2]) / 3.0;
    double w = scale * rc * rc * area / 12.0;
    out.setConstant(w);
    out.diagonal().setConstant(2.0 * w);
    return out;
  }
  // Edge midpoints, weight area / 3 each.
  for (int e = 0; e < 3; ++e) {
    int i = e, j = (e + 1) % 3;
    double r = 0.5 * (rho[static_cast<size_t>(i)] + rho[static_cast<size_t>(j)]);
    double w = scale * r * r * area / 3.0;
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();
    phi[i] = 0.5;
    phi[j] = 0.5;
    out += w * phi * phi.transpose();
  }
  return out;
}

SparseMatrix build(int n, const Triplets& t) {
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

std::array<double, 3> corner_density(const mesh::ConformalDensity& d, const std::array<int, 3>& tri) {
  std::array<double, 3> rho{};
  for (int k = 0; k < 3; ++k) rho[static_cast<size_t>(k)] = d.values[static_cast<size_t>(tri[static_cast<size_t>(k)])];
  if (rho[0] == 0 && rho[1] == 0 && rho[2] == 0) throw InputError("non-isolated zero: density vanishes on a triangle");
  return rho;
}

double default_shift(const SparseMatrix& k, const SparseMatrix& m) {
  double tk = 0, tm = 0;
  for (int i = 0; i < k.rows(); ++i) {
    tk += k.coeff(i, i);
    tm += m.coeff(i, i);
  }
  return -1e-4 * tk / tm;
}

}  // namespace

OperatorPair assemble(const mesh::Mesh& m, const mesh::ConformalDensity& density, MassRule rule) {
  const int n = m.vertex_count();
  if (density.values.size() != static_cast<size_t>(n)) throw InputError("density size does not match vertex count");
  if (m.lengths.size() != m.triangles.size()) throw InputError("mesh lengths do not match triangles");
  Triplets kt, mt;
  kt.reserve(m.triangles.size() * 9);
  mt.reserve(m.triangles.size() * 9);
  double area = 0;
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Corner c = corner_data(m.lengths[t]);
    auto rho = corner_density(density, tri);
    for (int k = 0; k < 3; ++k) {
      int i = tri[static_cast<size_t>((k + 1) % 3)], j = tri[static_cast<size_t>((k + 2) % 3)];
      double w = 0.5 * c.cot[static_cast<size_t>(k)];
      kt.emplace_back(i, j, -w);
      kt.emplace_back(j, i, -w);
      kt.emplace_back(i, i, w);
      kt.emplace_back(j, j, w);
    }
    Eigen::Matrix3d lm = local_mass(c.area, rho, 1.0, rule);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) mt.emplace_back(tri[static_cast<size_t>(a)], tri[static_cast<size_t>(b)], lm(a, b));
    }
    area += lm.sum();
  }
  return {build(n, kt), build(n, mt), area};
}

SparseMatrix potential_mass(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                            const std::vector<double>& potential, MassRule rule) {
  if (potential.size() != m.triangles.size()) throw InputError("potential needs one value per triangle");
  Triplets mt;
  mt.reserve(m.triangles.size() * 9);
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    if (!std::isfinite(potential[t])) throw InputError("potential must be finite");
    const auto& tri = m.triangles[t];
    double area = mesh::triangle_area(m.lengths[t]);
    Eigen::Matrix3d lm = local_mass(area, corner_density(density, tri), potential[t], rule);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) mt.emplace_back(tri[static_cast<size_t>(a)], tri[static_cast<size_t>(b)], lm(a, b));
    }
  }
  return build(m.vertex_count(), mt);
}

SpectrumResult eigen_solve_count(const SparseMatrix& k, const SparseMatrix& m, int count, const SolverOptions& opts) {
  const int n = static_cast<int>(k.rows());
  if (count < 1) throw InputError("eigenvalue count must be >= 1");
  if (count > n) throw InputError("more eigenvalues requested than unknowns");
  const double sigma = std::isnan(opts.shift) ? default_shift(k, m) : opts.shift;
  int block = count + (opts.guard > 0 ? opts.guard : std::max(8, count));
  block = std::min(block, n);

  Eigen::SimplicialLDLT<SparseMatrix> solver;
  SparseMatrix shifted = k - sigma * m;
  solver.compute(shifted);
  if (solver.info() != Eigen::Success) throw SolverError("factorization of the shifted operator failed", 0, 0.0);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, block);
  for (int j = 0; j < block; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = normal(rng);
  }
  x.col(0).setOnes();

  SpectrumResult out;
  Eigen::VectorXd vals;
  double worst = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    Eigen::MatrixXd y = solver.solve(m * x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    Eigen::MatrixXd kq = k * q, mq = m * q;
    Eigen::MatrixXd a = q.transpose() * kq, b = q.transpose() * mq;
    a = 0.5 * (a + a.transpose());
    b = 0.5 * (b + b.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b);
    if (ges.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz step failed", it, 0.0);
    x = q * ges.eigenvectors();
    vals = ges.eigenvalues();
    Eigen::MatrixXd kx = kq * ges.eigenvectors(), mx = mq * ges.eigenvectors();
    const double ref = std::max(std::abs(vals[count - 1]), std::abs(sigma));
    out.residuals.assign(static_cast<size_t>(count), 0.0);
    worst = 0;
    for (int j = 0; j < count; ++j) {
      double r = (kx.col(j) - vals[j] * mx.col(j)).norm() / ((std::abs(vals[j]) + ref) * mx.col(j).norm());
      out.residuals[static_cast<size_t>(j)] = r;
      worst = std::max(worst, r);
    }
    out.iterations = it;
    if (worst <= opts.tol) break;
  }
  if (worst > opts.tol) throw SolverError("eigensolver did not converge", out.iterations, worst);
  out.eigenvalues.assign(vals.data(), vals.data() + count);
  out.vectors = x.leftCols(count);
  out.area = Eigen::VectorXd(m * Eigen::VectorXd::Ones(n)).sum();
  for (double l : out.eigenvalues) out.normalized.push_back(l * out.area);
  return out;
}

SpectrumResult eigen_solve(const SparseMatrix& k, const SparseMatrix& m, int kk, double tol) {
  SolverOptions o;
  o.tol = tol;
  return eigen_solve_count(k, m, kk + 1, o);
}

SpectrumResult spectrum(const mesh::Mesh& m, const mesh::ConformalDensity& density, int kk, double tol,
                        MassRule rule) {
  OperatorPair ops = assemble(m, density, rule);
  return eigen_solve(ops.stiffness, ops.mass, kk, tol);
}

int counting_function(const SpectrumResult& s, double lambda) {
  if (s.eigenvalues.empty() || lambda > s.eigenvalues.back()) throw DomainError("insufficient spectrum");
  return static_cast<int>(std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [&](double l) { return l < lambda; }));
}

double yang_yau_bound(int genus) {
  if (genus < 0) throw InputError("genus must be >= 0");
  return 8.0 * std::numbers::pi * static_cast<double>((genus + 3) / 2);
}

YangYauReport yang_yau_check(int genus, double normalized_lambda1, double mesh_tolerance) {
  YangYauReport r;
  r.genus = genus;
  r.bound = yang_yau_bound(genus);
  r.lambda1_bar = normalized_lambda1;
  r.margin = r.bound - normalized_lambda1;
  r.mesh_tolerance = mesh_tolerance;
  r.strict_expected = genus != 0 && genus != 2;
  r.pass = r.margin >= -mesh_tolerance;
  return r;
}

namespace {

// Enough eigenvalues of (k, m) to see past `threshold`.
SpectrumResult spectrum_past(const SparseMatrix& k, const SparseMatrix& m, double threshold, double shift,
                             double tol) {
  const int n = static_cast<int>(k.rows());
  int count = std::min(n, 8);
  for (;;) {
    SolverOptions o;
    o.tol = tol;
    o.shift = shift;
    SpectrumResult s = eigen_solve_count(k, m, count, o);
    if (s.eigenvalues.back() > threshold || count == n) return s;
    count = std::min(n, 2 * count);
  }
}

}  // namespace

IndexResult schrodinger_index(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                              const std::vector<double>& potential, double band, double tol) {
  if (!(band > 0)) throw InputError("band must be > 0");
  OperatorPair ops = assemble(m, density);
  SparseMatrix mv = potential_mass(m, density, potential);
  double vmax = 0;
  for (double v : potential) vmax = std::max(vmax, v);
  double shift = -vmax + default_shift(ops.stiffness, ops.mass) - 1e-3;
  SpectrumResult s = spectrum_past(ops.stiffness - mv, ops.mass, band, shift, tol);
  IndexResult r;
  r.band = band;
  r.shifted = s.eigenvalues;
  for (double mu : s.eigenvalues) {
    if (mu < -band) ++r.index;
    else if (mu <= band) ++r.nullity;
  }
  return r;
}

std::vector<double> pullback_potential(const mesh::Mesh& m, const mesh::ConformalDensity& density) {
  if (!m.has_projection()) throw InputError("mesh carries no projection");
  std::vector<double> out(m.triangles.size());
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Corner c = corner_data(m.lengths[t]);
    // Local stiffness S_ij = area * grad(hat_i) . grad(hat_j).
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
      int i = (k + 1) % 3, j = (k + 2) % 3;
      double w = 0.5 * c.cot[static_cast<size_t>(k)];
      s(i, j) -= w;
      s(j, i) -= w;
      s(i, i) += w;
      s(j, j) += w;
    }
    double energy = 0;
    for (int comp = 0; comp < 3; ++comp) {
      Eigen::Vector3d f;
      for (int k = 0; k < 3; ++k) f[k] = m.projection[static_cast<size_t>(tri[static_cast<size_t>(k)])][comp];
      energy += f.dot(s * f);
    }
    auto rho = corner_density(density, tri);
    double rc = (rho[0] + rho[1] + rho[2]) / 3.0;
    out[t] = energy / c.area / (rc * rc);
  }
  return out;
}

IndexResult index_of_map(const mesh::Mesh& m, double band, double tol) {
  if (!(band > 0)) throw InputError("band must be > 0");
  mesh::ConformalDensity d = mesh::pullback_density(m);
  OperatorPair ops = assemble(m, d);
  SpectrumResult s = spectrum_past(ops.stiffness, ops.mass, 2.0 + band, default_shift(ops.stiffness, ops.mass), tol);
  IndexResult r;
  r.band = band;
  for (double l : s.eigenvalues) {
    r.shifted.push_back(l - 2.0);
    if (l < 2.0 - band) ++r.index;
    else if (l <= 2.0 + band) ++r.nullity;
  }
  return r;
}

DegreeBoundReport lambda1_degree_bound_check(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                                             double mesh_tolerance, double tol) {
  if (m.projection_degree < 1) throw InputError("projection degree unknown");
  SpectrumResult s = spectrum(m, density, 1, tol);
  DegreeBoundReport r;
  r.degree = m.projection_degree;
  r.lambda1_bar = s.normalized[1];
  r.bound = 8.0 * std::numbers::pi * r.degree;
  r.mesh_tolerance = mesh_tolerance;
  r.pass = r.lambda1_bar <= r.bound + mesh_tolerance;
  r.strict = r.lambda1_bar < r.bound - mesh_tolerance;
  return r;
}

}  // namespace spectralab::spectral
