// SPDX-License-Identifier: Apache-2.0
#include "systemic/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "systemic/error.hpp"

namespace systemic {

namespace {

// Kronrod 15-point nodes (non-negative half) and weights; every second node
// is a Gauss 7-point node.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082,
                                                 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975,
                                                 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSettings& settings) {
  std::priority_queue<Piece> pieces;
  Piece first = gauss_kronrod(f, a, b);
  double value = first.value;
  double error = first.error;
  pieces.push(first);
  while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(value))) {
    if (pieces.size() >= settings.max_intervals)
      throw NumericalError("integrate: tolerance not met within the interval budget",
                           static_cast<int>(pieces.size()));
    const Piece worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece left = gauss_kronrod(f, worst.a, mid);
    const Piece right = gauss_kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    pieces.push(left);
    pieces.push(right);
  }
  // re-sum to shed the drift of the running updates
  double total = 0.0, total_error = 0.0;
  const std::size_t count = pieces.size();
  while (!pieces.empty()) {
    total += pieces.top().value;
    total_error += pieces.top().error;
    pieces.pop();
  }
  return {total, total_error, count};
}

}  // namespace systemic
