// SPDX-License-Identifier: Apache-2.0
#include "systemic/sim.hpp"

#include <cmath>
#include <numeric>

#include "systemic/error.hpp"
#include "systemic/parallel.hpp"
#include "systemic/random.hpp"
#include "systemic/spectral.hpp"

namespace systemic {

namespace {

struct Plan {
  std::size_t steps = 0;
  std::size_t burn_steps = 0;
  std::size_t substeps = 1;
  double noise_dt = 0.0;
  Spectrum spectrum;
};

Plan make_plan(const WeightedGraph& g, const SimConfig& cfg) {
  const std::size_t n = g.node_count();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::config, "dt must be positive");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw Error(ErrorKind::config, "horizon must be positive");
  if (!(cfg.burn_in >= 0.0) || cfg.burn_in >= cfg.horizon)
    throw Error(ErrorKind::config, "burn_in must lie in [0, horizon)");
  if (cfg.trials == 0) throw Error(ErrorKind::config, "at least one trial is required");
  if (!cfg.x0.empty() && cfg.x0.size() != n) throw Error(ErrorKind::config, "x0 size does not match the node count");

  Plan plan;
  plan.spectrum = laplacian_spectrum(g);  // connectivity Error if disconnected
  if (cfg.dt * plan.spectrum.lambda_max() >= 2.0)
    throw Error(ErrorKind::config, "dt * lambda_n must stay below 2 for a stable explicit step");
  plan.steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  plan.burn_steps = static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
  if (plan.steps <= plan.burn_steps) throw Error(ErrorKind::config, "no samples left after burn_in");
  plan.noise_dt = cfg.noise_dt.value_or(cfg.dt);
  const double ratio = cfg.dt / plan.noise_dt;
  plan.substeps = static_cast<std::size_t>(std::llround(ratio));
  if (!(plan.noise_dt > 0.0) || plan.substeps == 0 || std::abs(ratio - static_cast<double>(plan.substeps)) > 1e-9 * ratio)
    throw Error(ErrorKind::config, "dt must be a whole multiple of noise_dt");
  return plan;
}

std::vector<double> centered(std::vector<double> x) {
  if (x.empty()) return x;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
  return x;
}

/// Steps one trial and hands y to `sample` after every step.
template <typename Sample>
void run_trial(const WeightedGraph& g, const SimConfig& cfg, const Plan& plan, std::size_t trial, Sample&& sample) {
  const std::size_t n = g.node_count();
  std::vector<double> y = cfg.x0.empty() ? std::vector<double>(n, 0.0) : centered(cfg.x0);
  std::vector<double> flow(n), dw(n);
  const double scale = std::sqrt(plan.noise_dt);
  for (std::size_t step = 0; step < plan.steps; ++step) {
    std::fill(flow.begin(), flow.end(), 0.0);
    for (const auto& e : g.edges()) {
      const double f = e.w * (y[e.u] - y[e.v]);
      flow[e.u] -= f;
      flow[e.v] += f;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] += cfg.dt * flow[i];
    if (cfg.noise) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        for (std::size_t s = 0; s < plan.substeps; ++s)
          z += keyed_normal(cfg.seed, trial, step * plan.substeps + s, i);
        dw[i] = scale * z;
        mean += dw[i];
      }
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y[i] += dw[i] - mean;
    }
    sample(step + 1, y);
  }
}

double pairwise_sum(const double* v, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += v[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, count - half);
}

}  // namespace

H2Estimate estimate_h2(const WeightedGraph& g, const SimConfig& cfg) {
  const Plan plan = make_plan(g, cfg);
  H2Estimate out;
  out.trial_means.assign(cfg.trials, 0.0);
  parallel_for(cfg.trials, [&](std::size_t trial) {
    double total = 0.0;
    run_trial(g, cfg, plan, trial, [&](std::size_t step, const std::vector<double>& y) {
      if (step <= plan.burn_steps) return;
      double sq = 0.0;
      for (double v : y) sq += v * v;
      total += sq;
    });
    out.trial_means[trial] = total / static_cast<double>(plan.steps - plan.burn_steps);
  });

  const auto count = static_cast<double>(cfg.trials);
  out.estimate = pairwise_sum(out.trial_means.data(), cfg.trials) / count;
  if (cfg.trials > 1) {
    std::vector<double> dev(cfg.trials);
    for (std::size_t i = 0; i < cfg.trials; ++i) dev[i] = (out.trial_means[i] - out.estimate) * (out.trial_means[i] - out.estimate);
    out.standard_error = std::sqrt(pairwise_sum(dev.data(), cfg.trials) / (count - 1.0) / count);
  }
  for (std::size_t i = 1; i < plan.spectrum.size(); ++i) out.closed_form += 0.5 / plan.spectrum.values[i];
  out.recommended_burn_in = 5.0 / plan.spectrum.values[1];
  out.burn_in_adequate = cfg.burn_in >= out.recommended_burn_in;
  return out;
}

std::vector<std::vector<double>> simulate_disagreement(const WeightedGraph& g, const SimConfig& cfg, std::size_t trial,
                                                       std::size_t stride) {
  const Plan plan = make_plan(g, cfg);
  if (stride == 0) throw Error(ErrorKind::config, "stride must be positive");
  std::vector<std::vector<double>> path;
  path.push_back(cfg.x0.empty() ? std::vector<double>(g.node_count(), 0.0) : centered(cfg.x0));
  run_trial(g, cfg, plan, trial, [&](std::size_t step, const std::vector<double>& y) {
    if (step % stride == 0) path.push_back(y);
  });
  return path;
}

DecayFit fit_decay(const WeightedGraph& g, const SimConfig& cfg) {
  SimConfig quiet = cfg;
  quiet.noise = false;
  const Plan plan = make_plan(g, quiet);
  const std::vector<double> y0 = centered(cfg.x0);
  double norm0 = 0.0;
  for (double v : y0) norm0 += v * v;
  if (norm0 == 0.0) throw Error(ErrorKind::config, "x0 is already at consensus");

  // Least squares of log |y| against t over the second half.
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  std::size_t used = 0;
  const std::size_t first = plan.steps / 2;
  run_trial(g, quiet, plan, 0, [&](std::size_t step, const std::vector<double>& y) {
    if (step < first) return;
    double sq = 0.0;
    for (double v : y) sq += v * v;
    if (sq <= 0.0 || !std::isfinite(sq)) return;
    const double t = static_cast<double>(step) * cfg.dt;
    const double l = 0.5 * std::log(sq);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++used;
  });
  if (used < 2) throw Error(ErrorKind::numerical, "decay fit needs at least two positive samples");
  const double k = static_cast<double>(used);
  const double slope = (k * stl - st * sl) / (k * stt - st * st);
  DecayFit fit;
  fit.rate = -slope;
  fit.lambda2 = plan.spectrum.values[1];
  fit.relative_error = std::abs(fit.rate - fit.lambda2) / fit.lambda2;
  return fit;
}

}  // namespace systemic
