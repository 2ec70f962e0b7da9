// SPDX-License-Identifier: Apache-2.0
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "systemic/error.hpp"
#include "systemic/measures.hpp"
#include "systemic/random.hpp"

using namespace systemic;

namespace {

const WeightedGraph k3 = generate(Family::complete, 3);
const WeightedGraph p3 = generate(Family::path, 3);
const WeightedGraph c4 = generate(Family::cycle, 4);

WeightedGraph random_connected(Rng& rng, std::size_t n_max) {
  GeneratorParams params;
  params.edge_probability = rng.uniform(0.3, 0.9);
  params.weight_range = {{0.1, 10.0}};
  const auto n = static_cast<std::size_t>(rng.integer(3, static_cast<std::int64_t>(n_max)));
  return generate(Family::erdos_renyi, n, params, rng.bits());
}

MeasureDescriptor measure(MeasureId id, double p = 1.0, double k = 1.0, std::string f = {}) {
  return {id, p, k, std::move(f)};
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("zeta") {
  CHECK(zeta(generate(Family::complete, 4), 1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(zeta(p3, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(zeta(c4, 2.0) == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(zeta(WeightedGraph(3, {{0, 1, 1.0}}), 1.0), Error);
}

TEST_CASE("zeta_measure") {
  CHECK(zeta_measure(k3, kInfinity, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(zeta_measure(p3, 1.0, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(zeta_measure(p3, 1.0, 0.5) == doctest::Approx(evaluate(p3, measure(MeasureId::energy1))).epsilon(1e-14));
  CHECK_THROWS_AS(zeta_measure(p3, 0.5, 1.0), Error);
  CHECK_THROWS_AS(zeta_measure(p3, 2.0, 0.0), Error);

  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_connected(rng, 12);
    for (double p : {1.0, 1.5, 3.0, kInfinity}) {
      const double k = rng.uniform(0.1, 3.0);
      CHECK(close(zeta_measure(scalar_mul(2.0, g), p, k), 0.5 * zeta_measure(g, p, k), 1e-12));
    }
  }
}

TEST_CASE("hp_constant matches -1/B(p/2,-1/2) through the gamma function") {
  // tgamma at the negative argument -1/2 is fine; this is the form the
  // library avoids.
  for (double p : {1.5, 2.0, 2.5, 3.0, 4.0, 7.0, 11.0}) {
    const double beta = std::tgamma(p / 2) * std::tgamma(-0.5) / std::tgamma(p / 2 - 0.5);
    CHECK(hp_constant(p) == doctest::Approx(-1.0 / beta).epsilon(1e-13));
  }
  CHECK(hp_constant(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hp_constant(3.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK_THROWS_AS(hp_constant(1.0), Error);
}

TEST_CASE("hp_norm closed form") {
  CHECK(hp_norm(k3, 2.0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
  CHECK(hp_norm(k3, 3.0) == doctest::Approx(std::cbrt((1.0 / std::numbers::pi) * (2.0 / 9.0))).epsilon(1e-14));
  CHECK(hp_norm(p3, kInfinity) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(hp_norm(p3, 1.0), Error);
  CHECK_THROWS_AS(hp_norm(p3, 0.5), Error);
}

TEST_CASE("hp_norm_numeric fixtures") {
  CHECK(hp_norm_numeric(k3, 2.0) == doctest::Approx(0.5773502691896258).epsilon(1e-6));
  CHECK(hp_norm_numeric(c4, 2.0) == doctest::Approx(std::sqrt(5.0 / 8.0)).epsilon(1e-6));
  CHECK(hp_norm_numeric(p3, 3.0) == doctest::Approx(hp_norm(p3, 3.0)).epsilon(1e-6));
  CHECK(hp_norm_numeric(k3, 3.0) == doctest::Approx(std::cbrt(2.0 / (9.0 * std::numbers::pi))).epsilon(1e-6));
  CHECK_THROWS_AS(hp_norm_numeric(p3, 1.0), Error);

  QuadratureSettings starved;
  starved.rel_tol = 1e-15;
  starved.max_intervals = 2;
  CHECK_THROWS_AS(hp_norm_numeric(p3, 1.5, starved), NumericalError);
}

TEST_CASE("closed-form and quadrature H_p agree on random graphs") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_connected(rng, 20);
    for (double p : {1.5, 2.0, 3.0, 4.0, 7.0}) {
      const double closed = hp_norm(g, p);
      const double numeric = hp_norm_numeric(g, p);
      CHECK(std::abs(closed - numeric) / closed < 1e-6);
    }
  }
}

TEST_CASE("TransferModel singular values match a direct SVD of M (jwI + L)^-1") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_connected(rng, 8);
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const TransferModel model(g);
    for (double omega : {0.05, 0.3, 2.0, 50.0}) {
      Eigen::MatrixXcd a = oracle::dense_laplacian(g).cast<std::complex<double>>();
      a.diagonal().array() += std::complex<double>(0.0, omega);
      Eigen::MatrixXcd centering = Eigen::MatrixXcd::Identity(n, n);
      centering.array() -= 1.0 / static_cast<double>(n);
      Eigen::MatrixXcd transfer = centering * a.inverse();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(transfer);
      std::vector<double> ref(svd.singularValues().data(), svd.singularValues().data() + n);
      std::vector<double> got = model.singular_values(omega);
      std::sort(ref.begin(), ref.end());
      std::sort(got.begin(), got.end());
      for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-9 * std::max(1.0, ref.back()));
    }
  }
}

TEST_CASE("evaluate catalog fixtures") {
  CHECK(evaluate(p3, measure(MeasureId::local_error)) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(evaluate(k3, measure(MeasureId::entropy)) == doctest::Approx(-2.0 * std::log(3.0)).epsilon(1e-14));
  CHECK(evaluate(c4, measure(MeasureId::energy1)) == doctest::Approx(5.0 / 8.0).epsilon(1e-14));
  CHECK(evaluate(p3, measure(MeasureId::energy2)) == doctest::Approx(0.5 + 1.0 / 18.0).epsilon(1e-14));
  CHECK(evaluate(p3, measure(MeasureId::convergence_time)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(evaluate(k3, measure(MeasureId::hinf)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(evaluate(k3, measure(MeasureId::h2)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
  CHECK(evaluate(c4, measure(MeasureId::schur_sum, 1, 1, "inverse")) == doctest::Approx(5.0 / 8.0).epsilon(1e-14));
  CHECK(evaluate(c4, measure(MeasureId::schur_sum, 1, 1, "exp_decay(1)")) ==
        doctest::Approx(2 * std::exp(-2.0) + std::exp(-4.0)).epsilon(1e-14));
  CHECK(evaluate(c4, measure(MeasureId::schur_sum, 1, 1, "inverse_pow:2")) == doctest::Approx(9.0 / 16.0).epsilon(1e-14));

  CHECK_THROWS_AS(evaluate(p3, measure(MeasureId::schur_sum)), Error);
  CHECK_THROWS_AS(evaluate(p3, measure(MeasureId::schur_sum, 1, 1, "bogus")), Error);
  CHECK_THROWS_AS(evaluate(WeightedGraph(3, {{0, 1, 1.0}}), measure(MeasureId::local_error)), Error);
  CHECK_THROWS_AS(evaluate_spectrum(std::vector<double>{0, 1, 3}, measure(MeasureId::local_error)), Error);
}

TEST_CASE("H_2 squared equals the first-order energy") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_connected(rng, 20);
    const auto values = laplacian_spectrum(g).values;
    const double h2 = evaluate_spectrum(values, measure(MeasureId::hp_norm, 2.0));
    const double energy = evaluate_spectrum(values, measure(MeasureId::energy1));
    CHECK(std::abs(h2 * h2 - energy) <= 1e-12 * energy);
  }
}

TEST_CASE("zeta measure approaches 1/lambda_2 as p grows") {
  Rng rng(41);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_connected(rng, 15);
    const auto values = laplacian_spectrum(g).values;
    if (values[2] - values[1] < 1e-6 * values[1]) continue;  // needs a simple lambda_2
    const double limit = 1.0 / values[1];
    const double rho = evaluate_spectrum(values, measure(MeasureId::zeta_measure, 64.0, 1.0));
    // the exact gap is limit * ((1 + sum_{i>2} (lambda_2/lambda_i)^64)^{1/64} - 1)
    double tail = 0.0;
    for (std::size_t i = 2; i < values.size(); ++i) tail += std::pow(values[1] / values[i], 64.0);
    const double expected_gap = limit * (std::pow(1.0 + tail, 1.0 / 64.0) - 1.0);
    CHECK(std::abs(rho - limit - expected_gap) <= 1e-12 * limit);
    if (expected_gap < 1e-3 * limit) {
      CHECK(std::abs(rho - limit) < 1e-3 * limit);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("entropy through spanning trees") {
  CHECK(entropy_via_trees(k3) == doctest::Approx(-std::log(9.0)).epsilon(1e-14));
  CHECK(entropy_via_trees(p3) == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
  CHECK(entropy_via_trees(c4) == doctest::Approx(-std::log(16.0)).epsilon(1e-14));
  CHECK(entropy_log_n_over_tau(k3) == doctest::Approx(0.0));
  CHECK(entropy_deviation_notice().find("-log 9") != std::string::npos);

  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_connected(rng, 15);
    const double spectral = evaluate(g, measure(MeasureId::entropy));
    const double trees = entropy_via_trees(g);
    CHECK(std::abs(spectral - trees) <= 1e-8 * std::max(1.0, std::abs(spectral)));
  }
}

TEST_CASE("homogeneity of degree -1 for the convex-column measures") {
  Rng rng(61);
  const std::vector<MeasureDescriptor> measures = {
      measure(MeasureId::zeta_measure, 1.0, 0.5), measure(MeasureId::zeta_measure, 2.5, 2.0),
      measure(MeasureId::zeta_measure, kInfinity, 1.0), measure(MeasureId::hp_norm, kInfinity),
      measure(MeasureId::convergence_time), measure(MeasureId::energy1), measure(MeasureId::local_error)};
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_connected(rng, 12);
    const double kappa = rng.uniform(0.1, 10.0);
    for (const auto& m : measures) CHECK(close(evaluate(scalar_mul(kappa, g), m), evaluate(g, m) / kappa, 1e-10));
  }
}

TEST_CASE("spectral_gradient matches finite differences") {
  const std::vector<double> values{0.0, 0.7, 1.3, 2.2, 5.0};
  const std::vector<MeasureDescriptor> measures = {
      measure(MeasureId::zeta_measure, 1.7, 0.8), measure(MeasureId::hp_norm, 1.5), measure(MeasureId::hp_norm, 4.0),
      measure(MeasureId::h2), measure(MeasureId::energy1), measure(MeasureId::energy2), measure(MeasureId::entropy),
      measure(MeasureId::schur_sum, 1, 1, "exp_decay(0.5)")};
  for (const auto& m : measures) {
    const auto grad = spectral_gradient(values, m);
    CHECK(grad[0] == 0.0);
    for (std::size_t i = 1; i < values.size(); ++i) {
      auto up = values, down = values;
      const double h = 1e-6 * values[i];
      up[i] += h;
      down[i] -= h;
      const double fd = (evaluate_spectrum(up, m) - evaluate_spectrum(down, m)) / (2 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(spectral_gradient(values, measure(MeasureId::convergence_time)), Error);
}

TEST_CASE("function registry") {
  auto& registry = FunctionRegistry::global();
  CHECK(registry.make("inverse").value(2.0) == 0.25);
  CHECK(registry.make("inverse_sq").value(2.0) == 0.125);
  CHECK(registry.make("inverse_pow(3)").value(2.0) == 0.125);
  CHECK(registry.make("exp_decay:2").value(1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_FALSE(registry.make("neg_log").vanishes_at_infinity);
  CHECK_THROWS_AS(registry.make("inverse_pow"), Error);
  CHECK_THROWS_AS(registry.make("inverse(2)"), Error);
  CHECK_THROWS_AS(registry.make("exp_decay(-1)"), Error);

  CHECK_FALSE(sampled_decreasing_convex([](double x) { return x; }));
  CHECK_FALSE(sampled_decreasing_convex([](double x) { return -x * x; }));
  CHECK(sampled_decreasing_convex([](double x) { return -std::sqrt(x); }));
  CHECK_FALSE(sampled_decreasing_convex([](double x) { return 1.0 / (1.0 + x * x); }));  // not convex near 0
  CHECK(sampled_decreasing_convex([](double x) { return 1.0 / (1.0 + x); }));

  registry.add("test_rational", [](std::optional<double>) {
    return ScalarFunction{"test_rational", [](double x) { return 1.0 / (1.0 + x); },
                          [](double x) { return -1.0 / ((1.0 + x) * (1.0 + x)); }, true};
  });
  CHECK(evaluate(c4, measure(MeasureId::schur_sum, 1, 1, "test_rational")) ==
        doctest::Approx(2.0 / 3.0 + 1.0 / 5.0).epsilon(1e-14));
  registry.add("test_concave", [](std::optional<double>) {
    return ScalarFunction{"test_concave", [](double x) { return -x * x; }, [](double x) { return -2 * x; }, false};
  });
  CHECK_THROWS_AS(registry.make("test_concave"), Error);
  CHECK_THROWS_AS(registry.add("inverse", {}), Error);
}

TEST_CASE("descriptor validation and classification") {
  CHECK_THROWS_AS(measure(MeasureId::hp_norm, 1.0).validate(), Error);
  CHECK_NOTHROW(measure(MeasureId::hp_norm, kInfinity).validate());
  CHECK_NOTHROW(measure(MeasureId::zeta_measure, 1.0).validate());
  CHECK(parse_measure_id("energy1") == MeasureId::energy1);
  CHECK_THROWS_AS(parse_measure_id("nope"), Error);

  CHECK(classify(measure(MeasureId::entropy)).schur_convex);
  CHECK_FALSE(classify(measure(MeasureId::entropy)).convex);
  CHECK_FALSE(classify(measure(MeasureId::local_error)).spectral);
  CHECK(classify(measure(MeasureId::hp_norm, kInfinity)).homogeneous);
  CHECK_FALSE(classify(measure(MeasureId::hp_norm, 3.0)).homogeneous);
}
