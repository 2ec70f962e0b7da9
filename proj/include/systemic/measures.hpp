// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "systemic/graph.hpp"
#include "systemic/quadrature.hpp"
#include "systemic/spectral.hpp"

namespace systemic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Decreasing convex functions for Schur-convex sums

/// A scalar function f: (0, inf) -> R with its derivative.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// f(x) -> 0 as x -> inf; required by the augmentation bound.
  bool vanishes_at_infinity = true;
};

/// Named families of decreasing convex functions, optionally with one
/// parameter: `inverse` 1/(2x), `inverse_sq` 1/(2x^2), `inverse_pow(q)`
/// 1/x^q, `exp_decay(c)` e^{-cx}, `neg_log` -log x. Every instance is sampled
/// on a log grid over [1e-3, 1e3] when built and rejected unless it is
/// non-increasing and convex there.
class FunctionRegistry {
 public:
  using Factory = std::function<ScalarFunction(std::optional<double> param)>;

  static FunctionRegistry& global();

  /// Adds a family. Throws an input Error if the name is taken.
  void add(const std::string& family, Factory factory);
  /// Builds from an id such as "inverse", "inverse_pow(1.5)" or
  /// "exp_decay:2". Throws an input Error for unknown ids and a domain Error
  /// when the sampled check fails.
  ScalarFunction make(std::string_view id) const;
  std::vector<std::string> families() const;

 private:
  FunctionRegistry();
  mutable std::mutex mutex_;
  std::map<std::string, Factory, std::less<>> factories_;
};

/// Sampled decreasing/convex check used at registration.
bool sampled_decreasing_convex(const std::function<double(double)>& f);

// ---------------------------------------------------------------------------
// Measure descriptors

enum class MeasureId {
  zeta_measure,
  hp_norm,
  h2,
  hinf,
  energy1,
  energy2,
  convergence_time,
  local_error,
  entropy,
  schur_sum,
};

MeasureId parse_measure_id(std::string_view name);
const char* to_string(MeasureId id) noexcept;

struct MeasureDescriptor {
  MeasureId id = MeasureId::energy1;
  /// Exponent for zeta_measure (1 <= p <= inf) and hp_norm (1 < p <= inf).
  double p = 1.0;
  /// Scale for zeta_measure.
  double k = 1.0;
  /// Function id for schur_sum.
  std::string f_id;

  /// Throws a domain Error on out-of-range parameters.
  void validate() const;
  std::string describe() const;
};

/// Which axiom families a measure is expected to satisfy.
struct MeasureClass {
  bool schur_convex = false;
  bool convex = false;
  /// Homogeneous of degree -1 under network scaling.
  bool homogeneous = false;
  /// Function of the Laplacian eigenvalues only.
  bool spectral = false;
};

MeasureClass classify(const MeasureDescriptor& m);

// ---------------------------------------------------------------------------
// Measures

/// Spectral zeta function sum_{i>=2} lambda_i^{-p} of a zero-snapped
/// Laplacian spectrum.
double zeta(std::span<const double> laplacian_values, double p);
double zeta(const WeightedGraph& g, double p);

/// k * zeta(p)^{1/p}; k / lambda_2 at p = inf.
double zeta_measure(const WeightedGraph& g, double p, double k);

/// H_p constant (1/2pi) B((p-1)/2, 1/2), equal to -1/B(p/2, -1/2).
double hp_constant(double p);

/// Closed-form H_p norm of the network, (hp_constant(p) * zeta(p-1))^{1/p};
/// 1/lambda_2 at p = inf. Domain Error for p <= 1.
double hp_norm(const WeightedGraph& g, double p);

/// Frequency response of the network from disturbance to centered output,
/// G(jw) = M_n (jw I + L)^{-1}, through its singular values.
class TransferModel {
 public:
  explicit TransferModel(Spectrum laplacian_spec) : spectrum_(std::move(laplacian_spec)) {}
  explicit TransferModel(const WeightedGraph& g) : spectrum_(laplacian_spectrum(g)) {}

  /// (w^2 + lambda_i^2)^{-1/2} for i >= 2 and 0 for the consensus mode,
  /// in spectrum order.
  std::vector<double> singular_values(double omega) const;
  /// Schatten p-norm raised to the p.
  double schatten_pow(double omega, double p) const;
  const Spectrum& spectrum() const noexcept { return spectrum_; }

 private:
  Spectrum spectrum_;
};

/// H_p norm by direct quadrature of the frequency integral after
/// w = tan(theta). Independent of the zeta-function identity.
double hp_norm_numeric(const WeightedGraph& g, double p, const QuadratureSettings& quad = {});

/// Any catalog measure.
double evaluate(const WeightedGraph& g, const MeasureDescriptor& m);
/// Spectral catalog measures from a zero-snapped spectrum. local_error is not
/// spectral and throws a domain Error.
double evaluate_spectrum(std::span<const double> laplacian_values, const MeasureDescriptor& m);
/// Spectral measure as a function of the nonzero eigenvalues x_i = lambda_{i+1}.
double evaluate_nonzero(std::span<const double> x, const MeasureDescriptor& m);
/// d rho / d lambda_i for smooth spectral measures (entry 0 is 0). Domain
/// Error for measures that depend on lambda_2 alone (p = inf, hinf,
/// convergence_time).
std::vector<double> spectral_gradient(std::span<const double> laplacian_values, const MeasureDescriptor& m);
/// (1/2) sum 1/d_i.
double local_error(const WeightedGraph& g);

/// -log(n * tau): the entropy measure -sum_{i>=2} log lambda_i evaluated
/// through the spanning-tree count.
double entropy_via_trees(const WeightedGraph& g);
/// log(n / tau), a closed form that circulates for the same measure. Does not
/// equal -sum log lambda_i for n > 1; kept so reports can show the gap.
double entropy_log_n_over_tau(const WeightedGraph& g);

/// Notice attached to reports that show both entropy forms.
std::string entropy_deviation_notice();

}  // namespace systemic
