#pragma once

// Maximization of the normalized first eigenvalue over conformal densities
// on a fixed mesh. The update flattens the cluster Gram field
// G = sum_i p_i u_i^2 over the eigenvalues within a band of lambda_1, with
// softmin weights p_i:
//   rho <- rho * (mean G / G)^theta, then rescale to unit area.
// Results are locally maximal candidates only.

#include <string>
#include <vector>

#include "spectralab/mesh.hpp"
#include "spectralab/spectral.hpp"

namespace spectralab::conformal {

struct MaximizeConfig {
  int max_iters = 200;
  double step = 0.5;              // damping exponent theta
  double band = 0.05;             // cluster: lambda_i <= (1 + band) lambda_1
  double tol = 1e-2;              // stop when the stationarity residual falls below
  double backtrack_tol = 1e-4;    // relative decrease tolerated when auditing the history
  /// Softmin temperature relative to lambda_1 for weighting the cluster.
  double softmin = 0.01;
  int max_backtracks = 6;
  int eigen_count = 8;            // lambda_1 .. lambda_count
  double solver_tol = 1e-8;
  /// Floor on G relative to its mean, keeps nodal sets from blowing up the density.
  double gram_floor = 1e-3;
  /// Cap on |log(mean G / G)| per step.
  double max_log_step = 1.0;
  spectral::MassRule rule = spectral::MassRule::Centroid;
};

struct IterationRecord {
  int iter = 0;
  double lambda1_bar = 0.0;
  double cluster_width = 0.0;
  int cluster_size = 0;
  double residual = 0.0;
  double step = 0.0;
  int backtracks = 0;
};

struct OptimizationState {
  mesh::ConformalDensity density;
  spectral::SpectrumResult spectrum;
  int iterations = 0;
  double step = 0.0;
  std::vector<double> history;  // lambda1_bar of accepted states, starting with the initial one
  std::vector<IterationRecord> trace;
  bool converged = false;
  std::string stop_reason;
};

/// Throws InputError for a disconnected mesh or a non-positive initial density,
/// SolverError on eigensolver failure, DomainError when lambda_1 collapses to 0.
OptimizationState maximize_lambda1(const mesh::Mesh& m, const mesh::ConformalDensity& initial,
                                   const MaximizeConfig& cfg = {});

struct StationarityReport {
  double residual = 0.0;       // area-weighted L2 norm of G / mean(G) - 1
  double cluster_width = 0.0;  // (lambda_last - lambda_1) / lambda_1 within the band
  int cluster_size = 0;        // implied harmonic map target: S^(cluster_size - 1)
  double lambda1_bar = 0.0;
  spectral::YangYauReport yang_yau;
  std::string label = "locally maximal candidate";
};
StationarityReport stationarity_report(const mesh::Mesh& m, const OptimizationState& s, const MaximizeConfig& cfg = {},
                                       double mesh_tolerance = 0.0);

/// Smooth positive perturbation exp(amplitude * f) of a constant density,
/// f a random combination of low-frequency waves in the vertex coordinates.
mesh::ConformalDensity perturbed_density(const mesh::Mesh& m, double amplitude, std::uint64_t seed);

/// iter,lambda1_bar,cluster_width,cluster_size,residual,step,backtracks
void write_trace_csv(const OptimizationState& s, const std::string& path);

/// Rescales so that the area of rho^2 g0 (under the mass rule) is 1.
mesh::ConformalDensity normalize_area(const mesh::Mesh& m, mesh::ConformalDensity d,
                                      spectral::MassRule rule = spectral::MassRule::Centroid);

}  // namespace spectralab::conformal
