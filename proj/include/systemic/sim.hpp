// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "systemic/graph.hpp"

namespace systemic {

/// Euler-Maruyama settings for dx = -L x dt + dW.
struct SimConfig {
  double dt = 1e-3;
  double horizon = 200.0;
  /// Samples before this time are discarded.
  double burn_in = 10.0;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  /// Initial state; empty means zero.
  std::vector<double> x0;
  /// Set to false for the deterministic decay run.
  bool noise = true;
  /// Resolution of the underlying Brownian path. When set, dt must be a
  /// whole multiple of it and each step sums the fine increments, so runs
  /// with different dt share one path. Defaults to dt.
  std::optional<double> noise_dt;
};

struct H2Estimate {
  /// Mean over trials of the time-averaged |M x|^2.
  double estimate = 0.0;
  double standard_error = 0.0;
  /// sum_{i>=2} 1 / (2 lambda_i), for comparison.
  double closed_form = 0.0;
  std::vector<double> trial_means;
  /// False when burn_in < 5 / lambda_2.
  bool burn_in_adequate = true;
  double recommended_burn_in = 0.0;
};

/// Runs cfg.trials independent trials in parallel. Config Error for dt,
/// horizon or trial count out of range, burn_in >= horizon, a bad x0 size,
/// or dt * lambda_n >= 2.
H2Estimate estimate_h2(const WeightedGraph& g, const SimConfig& cfg);

/// Disagreement state y = M x of one trial, recorded every `stride` steps
/// starting with y(0). The recursion y <- y - dt L y + M dW is run on y
/// itself, so shifting x0 by a constant leaves y untouched whenever M x0 is
/// computed exactly.
std::vector<std::vector<double>> simulate_disagreement(const WeightedGraph& g, const SimConfig& cfg, std::size_t trial,
                                                       std::size_t stride);

struct DecayFit {
  /// Least-squares slope of -log |M x(t)| over the second half of the run.
  double rate = 0.0;
  double lambda2 = 0.0;
  double relative_error = 0.0;
};

/// Noise-free run from cfg.x0 (which must not be consensus).
DecayFit fit_decay(const WeightedGraph& g, const SimConfig& cfg);

}  // namespace systemic
