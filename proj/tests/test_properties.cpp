// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "systemic/error.hpp"
#include "systemic/properties.hpp"

using namespace systemic;

namespace {

MeasureDescriptor measure(MeasureId id, double p = 1.0, double k = 1.0, std::string f = {}) {
  return {id, p, k, std::move(f)};
}

PropertyOptions options(std::size_t trials, std::uint64_t seed, double tol = 1e-8) {
  PropertyOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  opts.tol = tol;
  return opts;
}

const WeightedGraph k3 = generate(Family::complete, 3);
const WeightedGraph p3 = generate(Family::path, 3);

}  // namespace

TEST_CASE("homogeneity") {
  const auto zeta1 = check_homogeneity(measure(MeasureId::zeta_measure, 1.0, 0.5), options(200, 1, 1e-9));
  CHECK(zeta1.passed());
  CHECK(zeta1.trials == 200);
  CHECK(zeta1.comparisons == 200);

  const auto entropy = check_homogeneity(measure(MeasureId::entropy), options(200, 1));
  CHECK_FALSE(entropy.passed());
  CHECK(entropy.violations.size() > 150);

  const MeasureDescriptor ct = measure(MeasureId::convergence_time);
  CHECK(evaluate(scalar_mul(2.0, k3), ct) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(evaluate(scalar_mul(2.0, k3), ct) == doctest::Approx(0.5 * evaluate(k3, ct)).epsilon(1e-15));
}

TEST_CASE("monotonicity fixtures and search") {
  CHECK(psd_order(pseudo_inverse(laplacian(k3)), pseudo_inverse(laplacian(p3)), 1e-12));
  CHECK(evaluate(k3, measure(MeasureId::energy1)) == doctest::Approx(1.0 / 3.0));
  CHECK(evaluate(p3, measure(MeasureId::energy1)) == doctest::Approx(2.0 / 3.0));
  CHECK(evaluate(k3, measure(MeasureId::hinf)) == doctest::Approx(1.0 / 3.0));
  CHECK(evaluate(p3, measure(MeasureId::hinf)) == doctest::Approx(1.0));

  for (const auto& m : {measure(MeasureId::energy1), measure(MeasureId::hinf), measure(MeasureId::entropy),
                        measure(MeasureId::local_error)}) {
    const auto report = check_monotonicity(m, options(60, 2));
    CHECK(report.passed());
    CHECK(report.skipped == 0);
  }
}

TEST_CASE("convexity") {
  // (L_K3 + L_P3)/2 has edge weights (1, 1/2, 1); nonzero eigenvalues sum to 5
  // with product n * tau = 3 * 2, i.e. {2, 3}, so energy1 = 1/4 + 1/6.
  const WeightedGraph mix = graph_add(scalar_mul(0.5, k3), scalar_mul(0.5, p3));
  const double lhs = zeta_measure(mix, 1.0, 0.5);
  CHECK(lhs == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  CHECK(lhs <= 0.5);

  PropertyOptions endpoints = options(40, 3);
  endpoints.alpha_grid = {0.0, 1.0};
  const auto report = check_convexity(measure(MeasureId::energy1), endpoints);
  CHECK(report.passed());
  CHECK(report.comparisons == 80);
  for (std::size_t t = 0; t < 5; ++t)
    for (const auto& c : replay_trial(PropertyId::convexity, measure(MeasureId::energy1), endpoints, t))
      CHECK(c.lhs == c.rhs);

  CHECK(check_convexity(measure(MeasureId::zeta_measure, 2.0, 1.0), options(60, 4)).passed());
  CHECK(check_subadditivity(measure(MeasureId::energy1), options(60, 5)).passed());
  // entropy takes negative values, so rho(G1 + G2) <= rho(G1) + rho(G2) can fail
  CHECK_FALSE(check_subadditivity(measure(MeasureId::entropy), options(60, 5)).passed());

  PropertyOptions bad = options(2, 1);
  bad.alpha_grid = {1.5};
  CHECK_THROWS_AS(check_convexity(measure(MeasureId::energy1), bad), Error);
}

TEST_CASE("orthogonal invariance") {
  PropertyOptions identity = options(20, 6, 0.0);
  identity.sampler = OrthogonalSampler::identity;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto comparisons = replay_trial(PropertyId::orthogonal, measure(MeasureId::energy2), identity, t);
    REQUIRE(comparisons.size() == 1);
    CHECK(comparisons[0].lhs == doctest::Approx(comparisons[0].rhs).epsilon(1e-13));
  }

  PropertyOptions perm = options(50, 7, 1e-14);
  perm.sampler = OrthogonalSampler::permutation;
  CHECK(check_orthogonal_invariance(measure(MeasureId::local_error), perm).passed());
  CHECK_THROWS_AS(check_orthogonal_invariance(measure(MeasureId::local_error), options(5, 7)), Error);

  const Matrix u = random_orthogonal(4, 12345);
  CHECK((u.transposed() * u - Matrix::identity(4)).max_abs() < 1e-14);
  Matrix rotated = u * laplacian(generate(Family::cycle, 4)) * u.transposed();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) rotated(i, j) = rotated(j, i) = 0.5 * (rotated(i, j) + rotated(j, i));
  const double entropy = evaluate_spectrum(laplacian_spectrum(rotated).values, measure(MeasureId::entropy));
  CHECK(std::abs(entropy + std::log(16.0)) < 1e-8);

  CHECK(check_orthogonal_invariance(measure(MeasureId::entropy), options(100, 8)).passed());
}

TEST_CASE("Schur-convexity") {
  const MeasureDescriptor energy = measure(MeasureId::energy1);
  const std::vector<double> x{1.0, 3.0};
  const std::vector<double> averaged{2.0, 2.0};
  CHECK(evaluate_nonzero(averaged, energy) == doctest::Approx(0.5));
  CHECK(evaluate_nonzero(x, energy) == doctest::Approx(2.0 / 3.0));
  const std::vector<double> constant{1.7, 1.7, 1.7};
  CHECK(evaluate_nonzero(constant, energy) == evaluate_nonzero(constant, energy));

  CHECK(check_schur_convexity(energy, options(200, 9)).passed());
  CHECK(check_schur_convexity(measure(MeasureId::convergence_time), options(200, 9)).passed());

  // a Schur-concave function must be caught
  const VectorMeasure concave = [](std::span<const double> v) {
    double s = 0.0;
    for (double t : v) s -= 0.5 / t;
    return s;
  };
  CHECK_FALSE(check_schur_convexity(concave, "negated energy", options(50, 9)).passed());
  CHECK_THROWS_AS(check_schur_convexity(measure(MeasureId::local_error), options(5, 9)), Error);
}

TEST_CASE("violations replay bit-for-bit") {
  const MeasureDescriptor entropy = measure(MeasureId::entropy);
  const PropertyOptions opts = options(30, 10);
  const auto report = check_homogeneity(entropy, opts);
  REQUIRE_FALSE(report.violations.empty());
  for (const auto& v : report.violations) {
    const auto replay = replay_trial(PropertyId::homogeneity, entropy, opts, v.trial);
    REQUIRE(replay.size() == 1);
    CHECK(replay[0].lhs == v.lhs);
    CHECK(replay[0].rhs == v.rhs);
    CHECK(replay[0].input == v.input);
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const MeasureDescriptor m = measure(MeasureId::entropy);
  ::setenv("SYSTEMIC_THREADS", "1", 1);
  const auto serial = check_homogeneity(m, options(40, 11));
  ::setenv("SYSTEMIC_THREADS", "4", 1);
  const auto parallel = check_homogeneity(m, options(40, 11));
  ::unsetenv("SYSTEMIC_THREADS");
  REQUIRE(serial.violations.size() == parallel.violations.size());
  for (std::size_t i = 0; i < serial.violations.size(); ++i) {
    CHECK(serial.violations[i].trial == parallel.violations[i].trial);
    CHECK(serial.violations[i].lhs == parallel.violations[i].lhs);
  }
}

TEST_CASE("required properties follow the classification") {
  const auto entropy = required_properties(measure(MeasureId::entropy));
  CHECK(std::find(entropy.begin(), entropy.end(), PropertyId::homogeneity) == entropy.end());
  CHECK(std::find(entropy.begin(), entropy.end(), PropertyId::schur) != entropy.end());
  const auto local = required_properties(measure(MeasureId::local_error));
  CHECK(std::find(local.begin(), local.end(), PropertyId::orthogonal) == local.end());
  CHECK(std::find(local.begin(), local.end(), PropertyId::homogeneity) != local.end());
  CHECK(parse_property_id("schur") == PropertyId::schur);
  CHECK_THROWS_AS(parse_property_id("nope"), Error);
}
