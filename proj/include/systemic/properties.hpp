// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "systemic/measures.hpp"

namespace systemic {

enum class PropertyId { homogeneity, monotonicity, convexity, subadditivity, orthogonal, schur };

PropertyId parse_property_id(std::string_view name);
const char* to_string(PropertyId id) noexcept;

/// How check_orthogonal_invariance draws U.
enum class OrthogonalSampler { haar, permutation, identity };

struct PropertyOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  /// A comparison lhs <= rhs breaches when lhs - rhs > tol * (1 + |rhs|);
  /// equalities use |lhs - rhs| instead. Homogeneity uses tol * |rho(G)|.
  double tol = 1e-8;
  /// Node counts of the random graphs, inclusive.
  std::size_t n_min = 3;
  std::size_t n_max = 20;
  /// Mixing weights for the convexity check.
  std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  OrthogonalSampler sampler = OrthogonalSampler::haar;
};

/// One lhs-vs-rhs comparison made inside a trial.
struct Comparison {
  std::string input;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs - rhs (signed), or |lhs - rhs| for equality checks.
  double margin = 0.0;
  bool breach = false;
};

struct Violation {
  std::size_t trial = 0;
  std::string input;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct PropertyReport {
  PropertyId property = PropertyId::homogeneity;
  std::string measure;
  std::size_t trials = 0;
  std::size_t comparisons = 0;
  /// Trials whose precondition could not be established (monotonicity only).
  std::size_t skipped = 0;
  std::vector<Violation> violations;
  std::uint64_t seed = 0;
  double tol = 0.0;

  bool passed() const noexcept { return violations.empty(); }
};

/// Spectrum-level form of a measure acting on the nonzero eigenvalues.
using VectorMeasure = std::function<double(std::span<const double>)>;

// Each check draws trial t from its own generator seeded by (seed, t), so any
// trial can be replayed alone and trials may run in parallel.

/// rho(kappa G) = rho(G) / kappa for kappa in [0.1, 10].
PropertyReport check_homogeneity(const MeasureDescriptor& m, const PropertyOptions& opts);
/// rho(G + H) <= rho(G) for a random extra graph H, after confirming the
/// pseudo-inverse order with psd_order.
PropertyReport check_monotonicity(const MeasureDescriptor& m, const PropertyOptions& opts);
/// rho(a L1 + (1-a) L2) <= a rho(G1) + (1-a) rho(G2) over opts.alpha_grid.
PropertyReport check_convexity(const MeasureDescriptor& m, const PropertyOptions& opts);
/// rho(G1 + G2) <= rho(G1) + rho(G2).
PropertyReport check_subadditivity(const MeasureDescriptor& m, const PropertyOptions& opts);
/// rho evaluated on the spectrum of U L U^T equals rho(G). Haar sampling
/// requires a spectral measure; permutations relabel the graph instead and
/// work for every measure.
PropertyReport check_orthogonal_invariance(const MeasureDescriptor& m, const PropertyOptions& opts);
/// f(Dx) <= f(x) for doubly stochastic D built as a Dirichlet mixture of
/// random permutations and random positive x of length n - 1.
PropertyReport check_schur_convexity(const VectorMeasure& f, std::string name, const PropertyOptions& opts);
PropertyReport check_schur_convexity(const MeasureDescriptor& m, const PropertyOptions& opts);

PropertyReport check_property(PropertyId property, const MeasureDescriptor& m, const PropertyOptions& opts);

/// Re-runs one trial and returns every comparison it made.
std::vector<Comparison> replay_trial(PropertyId property, const MeasureDescriptor& m, const PropertyOptions& opts,
                                     std::size_t trial);

/// The checks a measure must pass given its classification: monotonicity and
/// convexity always; homogeneity and subadditivity for the convex column;
/// orthogonal invariance and Schur-convexity for the Schur-convex column.
std::vector<PropertyId> required_properties(const MeasureDescriptor& m);

/// Haar-distributed orthogonal matrix (Gram-Schmidt QR of a Gaussian matrix
/// with positive R diagonal).
Matrix random_orthogonal(std::size_t n, std::uint64_t seed);

}  // namespace systemic
