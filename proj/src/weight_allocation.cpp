// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

#include "systemic/design.hpp"
#include "systemic/error.hpp"

namespace systemic {

Topology::Topology(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) : n_(n) {
  std::vector<Edge> as_edges;
  for (auto [u, v] : edges) as_edges.push_back({u, v, 1.0});
  const WeightedGraph g(n, std::move(as_edges));  // validates and canonicalizes
  if (!is_connected(g)) throw Error(ErrorKind::connectivity, "topology is not connected");
  for (const auto& e : g.edges()) edges_.emplace_back(e.u, e.v);
}

Topology Topology::of(const WeightedGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);
  return Topology(g.node_count(), std::move(edges));
}

WeightedGraph Topology::realize(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw Error(ErrorKind::dimension, "one weight per topology edge required");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < edges_.size(); ++k)
    if (weights[k] > 0.0) edges.push_back({edges_[k].first, edges_[k].second, weights[k]});
  return WeightedGraph(n_, std::move(edges));
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorKind::dimension, "cannot project an empty vector onto the simplex");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> w(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) w[k] = std::max(v[k] - theta, 0.0);
  return w;
}

namespace {

bool depends_on_lambda2_only(const MeasureDescriptor& m) {
  switch (m.id) {
    case MeasureId::hinf:
    case MeasureId::convergence_time: return true;
    case MeasureId::zeta_measure:
    case MeasureId::hp_norm: return std::isinf(m.p);
    default: return false;
  }
}

std::optional<double> try_objective(const Topology& t, std::span<const double> w, const MeasureDescriptor& m) {
  try {
    return evaluate(t.realize(w), m);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::connectivity) return std::nullopt;
    throw;
  }
}

double stationarity(std::span<const double> w, std::span<const double> g) {
  double mean = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) {
      mean += g[k];
      ++support;
    }
  if (support == 0) return 0.0;
  mean /= static_cast<double>(support);
  double worst = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) worst = std::max(worst, std::abs(g[k] - mean));
  return worst;
}

// KKT for the zero-weight edges: moving weight onto them must not help.
bool inactive_edges_ok(std::span<const double> w, std::span<const double> g, double tol) {
  double mean = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) {
      mean += g[k];
      ++support;
    }
  if (support == 0) return true;
  mean /= static_cast<double>(support);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] == 0.0 && g[k] < mean - tol) return false;
  return true;
}

double dot_diff(std::span<const double> g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * (a[k] - b[k]);
  return s;
}

WeightAllocationResult finish(const Topology& t, const MeasureDescriptor& m, std::vector<double> w, int iterations,
                              bool converged, std::vector<double> history) {
  WeightAllocationResult out;
  out.objective = evaluate(t.realize(w), m);
  out.stationarity_residual = stationarity(w, weight_gradient(t, w, m));
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] == 0.0) out.active_set.push_back(k);
  out.weights = std::move(w);
  out.iterations = iterations;
  out.converged = converged;
  out.history = std::move(history);
  return out;
}

}  // namespace

std::vector<double> weight_gradient(const Topology& t, std::span<const double> weights, const MeasureDescriptor& m) {
  m.validate();
  const WeightedGraph g = t.realize(weights);
  const auto& edges = t.edges();
  std::vector<double> grad(edges.size(), 0.0);

  if (m.id == MeasureId::local_error) {
    if (!is_connected(g)) throw Error(ErrorKind::connectivity, "graph is disconnected");
    const auto d = g.degrees();
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto [u, v] = edges[k];
      grad[k] = -0.5 * (1.0 / (d[u] * d[u]) + 1.0 / (d[v] * d[v]));
    }
    return grad;
  }

  const Spectrum spec = laplacian_spectrum(g);
  const std::size_t n = spec.size();
  std::vector<double> dlambda(n, 0.0);
  if (depends_on_lambda2_only(m)) {
    // rho = c / lambda_2; average the eigenprojections of the lambda_2 cluster
    const double lambda2 = spec.values[1];
    const double c = m.id == MeasureId::zeta_measure ? m.k : 1.0;
    std::size_t cluster = 1;
    while (cluster + 1 < n && spec.values[cluster + 1] - lambda2 <= 1e-8 * lambda2) ++cluster;
    for (std::size_t i = 1; i <= cluster; ++i) dlambda[i] = -c / (lambda2 * lambda2) / static_cast<double>(cluster);
  } else {
    dlambda = spectral_gradient(spec.values, m);
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [u, v] = edges[k];
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (dlambda[i] == 0.0) continue;
      const double diff = spec.vectors(u, i) - spec.vectors(v, i);
      s += dlambda[i] * diff * diff;
    }
    grad[k] = s;
  }
  return grad;
}

WeightAllocationResult optimize_weights(const Topology& t, const MeasureDescriptor& m, const SolverOptions& opts) {
  m.validate();
  const std::size_t edges = t.edge_count();
  std::vector<double> w(edges, 1.0 / static_cast<double>(edges));
  auto start = try_objective(t, w, m);
  if (!start) throw Error(ErrorKind::solver, "uniform weights do not connect the topology");
  double f = *start;
  std::vector<double> history{f};
  const bool nonsmooth = depends_on_lambda2_only(m);

  double step = 0.0;
  std::vector<double> prev_w, prev_g;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    const std::vector<double> g = weight_gradient(t, w, m);
    if (stationarity(w, g) < opts.tol && inactive_edges_ok(w, g, opts.tol))
      return finish(t, m, std::move(w), iter, true, std::move(history));
    const double gscale = std::max(1e-300, std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    })));

    if (nonsmooth) {
      const double trial_step = 0.1 / gscale / std::sqrt(static_cast<double>(iter + 1));
      if (trial_step * gscale < 1e-13) break;
      std::vector<double> moved(edges);
      for (std::size_t k = 0; k < edges; ++k) moved[k] = w[k] - trial_step * g[k];
      auto candidate = project_to_simplex(moved);
      if (auto fc = try_objective(t, candidate, m); fc && *fc < f) {
        w = std::move(candidate);
        f = *fc;
        history.push_back(f);
      }
      continue;
    }

    // Barzilai-Borwein trial step when curvature information is available.
    if (step == 0.0) {
      step = 1.0 / gscale;
    } else {
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < edges; ++k) {
        const double sk = w[k] - prev_w[k];
        ss += sk * sk;
        sy += sk * (g[k] - prev_g[k]);
      }
      step = sy > 0.0 ? ss / sy : 2.0 * step;
    }
    prev_w = w;
    prev_g = g;
    bool accepted = false;
    bool stalled = false;
    for (int halving = 0; halving < 80; ++halving, step *= 0.5) {
      std::vector<double> moved(edges);
      for (std::size_t k = 0; k < edges; ++k) moved[k] = w[k] - step * g[k];
      auto candidate = project_to_simplex(moved);
      if (candidate == w) {
        stalled = true;
        break;
      }
      const auto fc = try_objective(t, candidate, m);
      if (!fc) continue;  // left the connected region: halve
      // Near the optimum the predicted decrease drops below the rounding
      // error in f, so increases at that level are tolerated.
      const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
      if (*fc <= f + opts.armijo * dot_diff(g, candidate, w) + rounding) {
        w = std::move(candidate);
        f = *fc;
        history.push_back(f);
        accepted = true;
        break;
      }
    }
    if (stalled) break;
    if (!accepted) {
      if (history.size() == 1) throw Error(ErrorKind::solver, "optimize_weights: no admissible step from the start point");
      break;
    }
  }
  const std::vector<double> g = weight_gradient(t, w, m);
  const bool converged = stationarity(w, g) < opts.tol && inactive_edges_ok(w, g, opts.tol);
  return finish(t, m, std::move(w), iter, converged, std::move(history));
}

}  // namespace systemic
