#include "spectralab/conformal_max.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "spectralab/error.hpp"

namespace spectralab::conformal {

namespace {

struct Evaluation {
  spectral::SpectrumResult spectrum;
  std::vector<double> gram;     // G per vertex
  std::vector<double> weights;  // lumped rho^2 mass per vertex
  double mean_gram = 0.0;
  double residual = 0.0;
  int cluster_size = 0;
  double cluster_width = 0.0;
  double lambda1_bar = 0.0;
};

Evaluation evaluate(const mesh::Mesh& m, const mesh::ConformalDensity& d, const MaximizeConfig& cfg) {
  auto ops = spectral::assemble(m, d, cfg.rule);
  Evaluation e;
  e.spectrum = spectral::eigen_solve(ops.stiffness, ops.mass, cfg.eigen_count, cfg.solver_tol);
  const auto& lam = e.spectrum.eigenvalues;
  if (lam.size() < 2) throw DomainError("no first eigenvalue");
  const double l1 = lam[1];
  if (!(l1 > 1e-10 * std::max(1.0, lam.back()))) throw DomainError("lambda_1 cluster collapsed to 0");
  e.lambda1_bar = e.spectrum.normalized[1];

  size_t last = 1;
  while (last + 1 < lam.size() && lam[last + 1] <= (1 + cfg.band) * l1) ++last;
  e.cluster_size = static_cast<int>(last);
  e.cluster_width = (lam[last] - l1) / l1;

  const int n = m.vertex_count();
  Eigen::VectorXd w = ops.mass * Eigen::VectorXd::Ones(n);
  e.weights.assign(w.data(), w.data() + n);
  // Softmin weights: G is the gradient field of a smooth lower bound on lambda_1,
  // equal weights on a degenerate cluster, u_1^2 alone once a gap opens.
  const double tau = cfg.softmin * l1;
  std::vector<double> p;
  double psum = 0.0;
  for (size_t i = 1; i <= last; ++i) {
    p.push_back(std::exp(-(lam[i] - l1) / tau));
    psum += p.back();
  }
  e.gram.assign(static_cast<size_t>(n), 0.0);
  for (size_t i = 1; i <= last; ++i) {
    auto col = e.spectrum.vectors.col(static_cast<Eigen::Index>(i));
    const double c = p[i - 1] / psum;
    for (int v = 0; v < n; ++v) e.gram[static_cast<size_t>(v)] += c * col(v) * col(v);
  }
  double wsum = 0.0, gsum = 0.0;
  for (int v = 0; v < n; ++v) {
    wsum += e.weights[static_cast<size_t>(v)];
    gsum += e.weights[static_cast<size_t>(v)] * e.gram[static_cast<size_t>(v)];
  }
  e.mean_gram = gsum / wsum;
  double r2 = 0.0;
  for (int v = 0; v < n; ++v) {
    double dev = e.gram[static_cast<size_t>(v)] / e.mean_gram - 1.0;
    r2 += e.weights[static_cast<size_t>(v)] * dev * dev;
  }
  e.residual = std::sqrt(r2 / wsum);
  return e;
}

mesh::ConformalDensity propose(const mesh::Mesh& m, const mesh::ConformalDensity& d, const Evaluation& e, double theta,
                               const MaximizeConfig& cfg) {
  std::vector<double> rho = d.values;
  for (size_t v = 0; v < rho.size(); ++v) {
    if (rho[v] == 0.0) continue;
    double g = std::max(e.gram[v], cfg.gram_floor * e.mean_gram);
    double lr = std::clamp(std::log(e.mean_gram / g), -cfg.max_log_step, cfg.max_log_step);
    rho[v] *= std::exp(theta * lr);
  }
  return normalize_area(m, mesh::make_density(m, std::move(rho)), cfg.rule);
}

IterationRecord record(int iter, const Evaluation& e, double step, int backtracks) {
  return {iter, e.lambda1_bar, e.cluster_width, e.cluster_size, e.residual, step, backtracks};
}

}  // namespace

mesh::ConformalDensity normalize_area(const mesh::Mesh& m, mesh::ConformalDensity d, spectral::MassRule rule) {
  double area = spectral::assemble(m, d, rule).area;
  if (!(area > 0)) throw InputError("density has zero area");
  const double s = 1.0 / std::sqrt(area);
  for (double& v : d.values) v *= s;
  return d;
}

OptimizationState maximize_lambda1(const mesh::Mesh& m, const mesh::ConformalDensity& initial,
                                   const MaximizeConfig& cfg) {
  if (!mesh::is_connected(m)) throw InputError("mesh is disconnected");
  if (initial.values.size() != static_cast<size_t>(m.vertex_count())) throw InputError("density size mismatch");
  if (std::none_of(initial.values.begin(), initial.values.end(), [](double v) { return v > 0; }))
    throw InputError("initial density must be positive");
  if (cfg.step <= 0 || cfg.band < 0 || cfg.eigen_count < 2) throw InputError("invalid maximize configuration");

  OptimizationState s;
  s.density = normalize_area(m, mesh::make_density(m, initial.values), cfg.rule);
  Evaluation cur = evaluate(m, s.density, cfg);
  s.history.push_back(cur.lambda1_bar);
  s.trace.push_back(record(0, cur, 0.0, 0));
  double theta = cfg.step;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (cur.residual < cfg.tol) {
      s.converged = true;
      s.stop_reason = "stationarity residual below tolerance";
      break;
    }
    int backtracks = 0;
    bool accepted = false;
    double t = theta;
    mesh::ConformalDensity next;
    Evaluation ev;
    for (; backtracks <= cfg.max_backtracks; ++backtracks, t *= 0.5) {
      next = propose(m, s.density, cur, t, cfg);
      ev = evaluate(m, next, cfg);
      if (ev.lambda1_bar >= cur.lambda1_bar) {
        accepted = true;
        break;
      }
    }
    s.iterations = it;
    if (!accepted) {
      s.stop_reason = "no ascent step after backtracking";
      break;
    }
    s.density = std::move(next);
    cur = std::move(ev);
    s.history.push_back(cur.lambda1_bar);
    s.trace.push_back(record(it, cur, t, backtracks));
    theta = std::min(cfg.step, 2 * t);
  }
  if (s.stop_reason.empty()) {
    if (cur.residual < cfg.tol) {
      s.converged = true;
      s.stop_reason = "stationarity residual below tolerance";
    } else {
      s.stop_reason = "iteration limit";
    }
  }
  s.step = theta;
  s.spectrum = std::move(cur.spectrum);
  return s;
}

StationarityReport stationarity_report(const mesh::Mesh& m, const OptimizationState& s, const MaximizeConfig& cfg,
                                       double mesh_tolerance) {
  Evaluation e = evaluate(m, s.density, cfg);
  StationarityReport r;
  r.residual = e.residual;
  r.cluster_width = e.cluster_width;
  r.cluster_size = e.cluster_size;
  r.lambda1_bar = e.lambda1_bar;
  r.yang_yau = spectral::yang_yau_check(m.genus(), e.lambda1_bar, mesh_tolerance);
  return r;
}

mesh::ConformalDensity perturbed_density(const mesh::Mesh& m, double amplitude, std::uint64_t seed) {
  Eigen::Vector3d lo = m.positions.front(), hi = m.positions.front();
  for (auto& p : m.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diam = std::max((hi - lo).norm(), 1e-12);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 2 * std::numbers::pi), coef(-1.0, 1.0);
  struct Wave {
    Eigen::Vector3d k;
    double phase, a;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector3d k(normal(rng), normal(rng), normal(rng));
    k *= 3.0 / (diam * std::max(k.norm(), 1e-12));
    waves.push_back({k, uni(rng), coef(rng) / 2});
  }
  std::vector<double> rho(static_cast<size_t>(m.vertex_count()));
  for (size_t v = 0; v < rho.size(); ++v) {
    double f = 0.0;
    for (auto& w : waves) f += w.a * std::sin(w.k.dot(m.positions[v]) + w.phase);
    rho[v] = std::exp(amplitude * f);
  }
  return mesh::make_density(m, std::move(rho));
}

void write_trace_csv(const OptimizationState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out.precision(12);
  out << "iter,lambda1_bar,cluster_width,cluster_size,residual,step,backtracks\n";
  for (auto& r : s.trace)
    out << r.iter << ',' << r.lambda1_bar << ',' << r.cluster_width << ',' << r.cluster_size << ',' << r.residual << ','
        << r.step << ',' << r.backtracks << '\n';
}

}  // namespace spectralab::conformal
