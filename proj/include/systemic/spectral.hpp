// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "systemic/graph.hpp"
#include "systemic/matrix.hpp"

namespace systemic {

/// Eigendecomposition of a real symmetric matrix.
struct Spectrum {
  /// Ascending.
  std::vector<double> values;
  /// Orthonormal eigenvectors, one per column, matching `values`.
  Matrix vectors;
  /// max over i of max |M v_i - lambda_i v_i|.
  double residual = 0.0;
  /// Laplacian spectra only: lambda_1 as computed, before it was snapped to 0.
  std::optional<double> unsnapped_zero;

  std::size_t size() const noexcept { return values.size(); }
  double lambda_max() const { return values.empty() ? 0.0 : values.back(); }
};

/// Householder tridiagonalization followed by implicit-shift QL.
///
/// Eigenvalues come back ascending; each eigenvector is signed so that its
/// first component of magnitude above 1e-12 is positive. Throws a domain
/// Error when the relative asymmetry exceeds 1e-12 and NumericalError when an
/// eigenvalue needs more than 50 QL sweeps.
Spectrum eig_sym(const Matrix& m);

/// Separates the structural zero eigenvalue of a connected-graph Laplacian:
/// 1e-8 * max(1, lambda_n).
double zero_tolerance(double lambda_max);

/// Spectrum of a connected-graph Laplacian with lambda_1 snapped to exactly
/// 0. Throws a connectivity Error when lambda_2 <= zero_tolerance.
Spectrum laplacian_spectrum(const Matrix& laplacian_matrix);
Spectrum laplacian_spectrum(const WeightedGraph& g);

/// Moore-Penrose pseudo-inverse sum_{i>=2} v_i v_i^T / lambda_i.
Matrix pseudo_inverse(const Spectrum& laplacian_spec);
Matrix pseudo_inverse(const Matrix& laplacian_matrix);

/// A <= B in the positive semidefinite order: lambda_min(B - A) >= -tol.
bool psd_order(const Matrix& a, const Matrix& b, double tol);

/// I - J/n.
Matrix centering_matrix(std::size_t n);

}  // namespace systemic
