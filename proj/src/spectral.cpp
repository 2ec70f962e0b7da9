// SPDX-License-Identifier: Apache-2.0
#include "systemic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "systemic/error.hpp"

namespace systemic {

namespace {

constexpr int kMaxSweeps = 50;

// Householder reduction to tridiagonal form. On return v holds the
// accumulated orthogonal transform, d the diagonal and e the subdiagonal in
// e[1..n-1].
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of v.
void ql_implicit(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > kMaxSweeps)
          throw NumericalError("eig_sym: QL iteration did not converge for eigenvalue " + std::to_string(l), sweeps - 1);
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, ii + 1);
            v(k, ii + 1) = s * v(k, ii) + c * h;
            v(k, ii) = c * v(k, ii) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

Spectrum eig_sym(const Matrix& m) {
  if (!m.square()) throw Error(ErrorKind::dimension, "eig_sym: matrix is not square");
  if (relative_asymmetry(m) > 1e-12) throw Error(ErrorKind::domain, "eig_sym: matrix is not symmetric");
  const std::size_t n = m.rows();
  Spectrum out;
  if (n == 0) return out;

  // Work on the exactly symmetrized lower triangle.
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) v(i, j) = v(j, i) = m(i, j);
  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  ql_implicit(v, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = d[src];
    double sign = 1.0;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(v(k, src)) > 1e-12) {
        sign = v(k, src) < 0 ? -1.0 : 1.0;
        break;
      }
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
  }

  // Rayleigh quotients of the computed vectors: the eigenvalue error drops
  // to the square of the vector error.
  const Matrix mv = m * out.vectors;
  for (std::size_t c = 0; c < n; ++c) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += out.vectors(k, c) * mv(k, c);
      den += out.vectors(k, c) * out.vectors(k, c);
    }
    if (den > 0.0) out.values[c] = num / den;
  }
  for (std::size_t c = 1; c < n; ++c) out.values[c] = std::max(out.values[c], out.values[c - 1]);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t k = 0; k < n; ++k)
      out.residual = std::max(out.residual, std::abs(mv(k, c) - out.values[c] * out.vectors(k, c)));
  return out;
}

double zero_tolerance(double lambda_max) { return 1e-8 * std::max(1.0, lambda_max); }

Spectrum laplacian_spectrum(const Matrix& laplacian_matrix) {
  Spectrum s = eig_sym(laplacian_matrix);
  if (s.values.empty()) return s;
  const double tol = zero_tolerance(s.lambda_max());
  if (std::abs(s.values[0]) >= tol)
    throw Error(ErrorKind::numerical, "laplacian_spectrum: smallest eigenvalue is not zero; input is not a Laplacian");
  if (s.size() > 1 && s.values[1] <= tol)
    throw Error(ErrorKind::connectivity, "graph is disconnected (lambda_2 below the zero tolerance)");
  s.unsnapped_zero = s.values[0];
  s.values[0] = 0.0;
  return s;
}

Spectrum laplacian_spectrum(const WeightedGraph& g) { return laplacian_spectrum(laplacian(g)); }

Matrix pseudo_inverse(const Spectrum& spec) {
  const std::size_t n = spec.size();
  Matrix out(n, n);
  for (std::size_t c = 1; c < n; ++c) {
    const double inv = 1.0 / spec.values[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = spec.vectors(i, c) * inv;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * spec.vectors(j, c);
    }
  }
  // symmetric by construction up to rounding order; make it exact
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return out;
}

Matrix pseudo_inverse(const Matrix& laplacian_matrix) { return pseudo_inverse(laplacian_spectrum(laplacian_matrix)); }

bool psd_order(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::dimension, "psd_order: dimension mismatch");
  const Spectrum s = eig_sym(b - a);
  return s.values.empty() || s.values.front() >= -tol;
}

Matrix centering_matrix(std::size_t n) {
  Matrix m(n, n, -1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 1.0;
  return m;
}

}  // namespace systemic
