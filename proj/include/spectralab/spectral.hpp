#pragma once

// P1 finite elements for the Laplacian of a conformal metric rho^2 g0.
//
// Stiffness uses cotangent weights of the mesh metric g0 (the Dirichlet
// energy is conformally invariant in 2D); the mass matrix carries rho^2.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <limits>
#include <vector>

#include "spectralab/mesh.hpp"

namespace spectralab::spectral {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MassRule { Centroid, ThreePoint };

struct OperatorPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  double area = 0.0;
};

/// Throws InputError on degenerate triangles or a density vanishing on a triangle.
OperatorPair assemble(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                      MassRule rule = MassRule::Centroid);

/// Per-triangle potential V (a function on the surface, metric g) integrated
/// against P1 hat functions in the metric rho^2 g0.
SparseMatrix potential_mass(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                            const std::vector<double>& potential, MassRule rule = MassRule::Centroid);

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 500;
  /// Extra block columns beyond the requested count; 0 picks a default.
  int guard = 0;
  std::uint64_t seed = 12345;
  /// Shift for the factorization; must lie strictly below the spectrum.
  /// NaN picks a small negative shift suitable for Laplacians.
  double shift = std::numeric_limits<double>::quiet_NaN();
};

struct SpectrumResult {
  std::vector<double> eigenvalues;
  double area = 0.0;
  std::vector<double> normalized;
  std::vector<double> residuals;
  int iterations = 0;
  /// Mass-orthonormal eigenvectors, one column per eigenvalue.
  Eigen::MatrixXd vectors;
};

/// Smallest `count` eigenpairs of K u = lambda M u by shift-invert block
/// subspace iteration with Rayleigh-Ritz. Throws SolverError on non-convergence.
SpectrumResult eigen_solve_count(const SparseMatrix& k, const SparseMatrix& m, int count,
                                 const SolverOptions& opts = {});
/// k + 1 smallest eigenpairs (lambda_0 .. lambda_k).
SpectrumResult eigen_solve(const SparseMatrix& k, const SparseMatrix& m, int kk, double tol = 1e-8);
/// Convenience: assemble and solve.
SpectrumResult spectrum(const mesh::Mesh& m, const mesh::ConformalDensity& density, int kk, double tol = 1e-8,
                        MassRule rule = MassRule::Centroid);

/// #{i : lambda_i < lambda}. Throws DomainError("insufficient spectrum") when
/// lambda exceeds the largest converged eigenvalue.
int counting_function(const SpectrumResult& s, double lambda);

struct YangYauReport {
  int genus = 0;
  double bound = 0.0;
  double lambda1_bar = 0.0;
  double margin = 0.0;
  double mesh_tolerance = 0.0;
  bool strict_expected = false;
  bool pass = false;
};
YangYauReport yang_yau_check(int genus, double normalized_lambda1, double mesh_tolerance);
double yang_yau_bound(int genus);

struct IndexResult {
  int index = 0;
  int nullity = 0;
  double band = 0.0;
  std::vector<double> shifted;  // eigenvalues minus threshold (or mu for the potential form)
};

/// Eigenvalues mu of (K - M_V) u = mu M u: index counts mu < -band, nullity |mu| <= band.
IndexResult schrodinger_index(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                              const std::vector<double>& potential, double band, double tol = 1e-8);

/// |d projection|^2 in the metric rho^2 g0, per triangle.
std::vector<double> pullback_potential(const mesh::Mesh& m, const mesh::ConformalDensity& density);

/// Counting form: index = N(2 - band), nullity = #eigenvalues in [2 - band, 2 + band],
/// under the pullback metric.
IndexResult index_of_map(const mesh::Mesh& m, double band, double tol = 1e-8);

struct DegreeBoundReport {
  int degree = 0;
  double lambda1_bar = 0.0;
  double bound = 0.0;
  double mesh_tolerance = 0.0;
  bool pass = false;
  bool strict = false;
};
/// lambda1_bar <= 8 pi deg(projection) under the given density.
DegreeBoundReport lambda1_degree_bound_check(const mesh::Mesh& m, const mesh::ConformalDensity& density,
                                             double mesh_tolerance, double tol = 1e-8);

}  // namespace spectralab::spectral
