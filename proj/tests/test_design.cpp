// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "systemic/design.hpp"
#include "systemic/error.hpp"
#include "systemic/random.hpp"

using namespace systemic;

namespace {

MeasureDescriptor measure(MeasureId id, double p = 1.0) { return {id, p, 1.0, {}}; }

// Minimum of the measure over a regular simplex grid with the given number
// of subdivisions; zero weights that disconnect the graph are skipped.
double grid_minimum(const Topology& t, const MeasureDescriptor& m, int steps) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t edges = t.edge_count();
  std::vector<int> counts(edges, 0);
  auto visit = [&](auto&& self, std::size_t idx, int left) -> void {
    if (idx + 1 == edges) {
      counts[idx] = left;
      std::vector<double> w(edges);
      for (std::size_t k = 0; k < edges; ++k) w[k] = static_cast<double>(counts[k]) / steps;
      try {
        best = std::min(best, evaluate(t.realize(w), m));
      } catch (const Error&) {
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[idx] = c;
      self(self, idx + 1, left - c);
    }
  };
  visit(visit, 0, steps);
  return best;
}

void check_result_consistency(const Topology& t, const MeasureDescriptor& m, const WeightAllocationResult& r) {
  double sum = 0.0;
  for (double w : r.weights) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(std::abs(r.objective - evaluate(t.realize(r.weights), m)) <= 1e-10 * std::abs(r.objective));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1 + 1e-14));
}

}  // namespace

TEST_CASE("simplex projection") {
  const std::vector<double> inside{0.2, 0.3, 0.5};
  const auto same = project_to_simplex(inside);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == doctest::Approx(inside[i]).epsilon(1e-15));

  const auto clipped = project_to_simplex(std::vector<double>{2.0, 0.0, -1.0});
  CHECK(clipped == std::vector<double>{1.0, 0.0, 0.0});

  const auto shifted = project_to_simplex(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  for (double w : shifted) CHECK(w == doctest::Approx(0.25));

  // Optimality of the projection: no other simplex point is closer.
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(5);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    const auto p = project_to_simplex(v);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
    double dist = 0.0;
    for (std::size_t i = 0; i < 5; ++i) dist += (v[i] - p[i]) * (v[i] - p[i]);
    for (int probe = 0; probe < 20; ++probe) {
      std::vector<double> q(5);
      for (auto& x : q) x = rng.exponential();
      const double s = std::accumulate(q.begin(), q.end(), 0.0);
      double d = 0.0;
      for (std::size_t i = 0; i < 5; ++i) d += (v[i] - q[i] / s) * (v[i] - q[i] / s);
      CHECK(dist <= d + 1e-12);
    }
  }
  CHECK_THROWS_AS(project_to_simplex(std::vector<double>{}), Error);
}

TEST_CASE("topology") {
  const Topology t(3, {{1, 0}, {1, 2}});
  CHECK(t.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
  const auto g = t.realize(std::vector<double>{0.25, 0.75});
  CHECK(g.weight(0, 1) == 0.25);
  CHECK(t.realize(std::vector<double>{0.0, 1.0}).edge_count() == 1);
  CHECK_THROWS_AS(Topology(4, {{0, 1}, {2, 3}}), Error);
  CHECK_THROWS_AS(Topology(3, {{0, 1}, {0, 1}}), Error);
  CHECK_THROWS_AS(t.realize(std::vector<double>{1.0}), Error);
}

TEST_CASE("weight gradient matches finite differences") {
  Rng rng(11);
  const Topology t(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}});
  for (auto id : {MeasureId::energy1, MeasureId::energy2, MeasureId::entropy, MeasureId::h2, MeasureId::local_error}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> w(t.edge_count());
      for (auto& x : w) x = rng.uniform(0.5, 2.0);
      const auto m = measure(id);
      const auto g = weight_gradient(t, w, m);
      for (std::size_t e = 0; e < w.size(); ++e) {
        const double h = 1e-6 * w[e];
        auto up = w, down = w;
        up[e] += h;
        down[e] -= h;
        const double fd = (evaluate(t.realize(up), m) - evaluate(t.realize(down), m)) / (2 * h);
        CHECK(g[e] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("symmetric topologies keep uniform weights") {
  for (auto family : {Family::complete, Family::cycle}) {
    for (std::size_t n : {3u, 4u, 5u}) {
      const auto t = Topology::of(generate(family, n));
      for (auto id : {MeasureId::energy1, MeasureId::energy2, MeasureId::entropy}) {
        const auto r = optimize_weights(t, measure(id));
        CHECK(r.converged);
        for (double w : r.weights) CHECK(w == doctest::Approx(1.0 / t.edge_count()).epsilon(1e-9));
        check_result_consistency(t, measure(id), r);
      }
    }
  }
  // unit-sum K3 has lambda = {0, 1, 1}, so energy1 = 1
  const auto k3 = optimize_weights(Topology::of(generate(Family::complete, 3)), measure(MeasureId::energy1));
  CHECK(k3.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimizer agrees with a grid oracle") {
  // two-edge path: energy1 = 1/(2 lambda_2) + 1/(2 lambda_3) with a symmetric optimum
  const Topology p3(3, {{0, 1}, {1, 2}});
  const Topology p4(4, {{0, 1}, {1, 2}, {2, 3}});
  const Topology star_plus(4, {{0, 1}, {0, 2}, {0, 3}});
  const Topology paw_minus(4, {{0, 1}, {1, 2}, {1, 3}});
  for (auto id : {MeasureId::energy1, MeasureId::energy2, MeasureId::entropy, MeasureId::h2}) {
    const auto m = measure(id);
    const auto r2 = optimize_weights(p3, m);
    CHECK(r2.converged);
    CHECK(r2.objective <= grid_minimum(p3, m, 1000) + 1e-12);
    CHECK(r2.objective >= grid_minimum(p3, m, 1000) - 1e-5 * std::abs(r2.objective));
    check_result_consistency(p3, m, r2);
    for (const auto* t : {&p4, &star_plus, &paw_minus}) {
      const auto r = optimize_weights(*t, m);
      const double grid = grid_minimum(*t, m, 200);
      CHECK(r.converged);
      CHECK(r.stationarity_residual < 1e-9);
      CHECK(r.objective <= grid + 1e-12);
      CHECK(r.objective >= grid - 1e-3 * std::abs(grid));
      check_result_consistency(*t, m, r);
    }
  }
  // the path's middle edge carries more weight than the outer ones
  const auto r = optimize_weights(p4, measure(MeasureId::energy1));
  CHECK(r.weights[1] > r.weights[0]);
  CHECK(r.weights[0] == doctest::Approx(r.weights[2]).epsilon(1e-6));
}

TEST_CASE("optimizer drives redundant edges to zero when that helps") {
  // triangle with a pendant: local_error prefers degree balance
  const Topology t(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  const auto m = measure(MeasureId::local_error);
  const auto r = optimize_weights(t, m);
  check_result_consistency(t, m, r);
  CHECK(r.objective <= grid_minimum(t, m, 100) + 1e-12);
  for (std::size_t e : r.active_set) CHECK(r.weights[e] == 0.0);
}

TEST_CASE("lambda_2 measures use improving subgradient steps") {
  const Topology p4(4, {{0, 1}, {1, 2}, {2, 3}});
  for (auto id : {MeasureId::convergence_time, MeasureId::hinf}) {
    const auto m = measure(id);
    const auto r = optimize_weights(p4, m);
    check_result_consistency(p4, m, r);
    const double grid = grid_minimum(p4, m, 200);
    CHECK(r.objective <= r.history.front());
    CHECK(r.objective <= grid * (1 + 1e-2));
  }
}

TEST_CASE("canonical form") {
  const auto c4 = generate(Family::cycle, 4);
  const auto canon = canonical_form(c4);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> perm{0, 1, 2, 3};
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i)))]);
    std::vector<Edge> relabeled;
    for (const auto& e : c4.edges()) relabeled.push_back({perm[e.u], perm[e.v], e.w});
    CHECK(canonical_form(WeightedGraph(4, relabeled)) == canon);
  }
  // the smallest bitstring avoids early pairs: (0,1) and (0,2) are absent
  CHECK(canon == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  CHECK(canonical_form(generate(Family::path, 4)) != canonical_form(generate(Family::star, 4)));
  CHECK_THROWS_AS(canonical_form(generate(Family::path, 9)), Error);
}

TEST_CASE("rewiring") {
  SUBCASE("C4 beats the paw") {
    const auto r = rewire_bruteforce(4, 4, 4.0, measure(MeasureId::energy1));
    CHECK(r.value == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
    CHECK(canonical_form(r.best) == canonical_form(generate(Family::cycle, 4)));
    REQUIRE(r.ranking.size() == 2);  // C4 and the paw
    CHECK(r.ranking[1].value == doctest::Approx(19.0 / 24.0).epsilon(1e-12));
    CHECK(r.ranking[0].labelings + r.ranking[1].labelings == r.labeled_graphs);
    CHECK(r.ranking[0].labelings == 3);
    CHECK(r.ranking[1].labelings == 12);
    CHECK(r.best.weight(r.best.edges()[0].u, r.best.edges()[0].v) == 1.0);
  }
  SUBCASE("class counts match known tallies") {
    // connected graphs on 5 nodes: 21 classes over all edge counts; 3 trees
    std::size_t total = 0;
    for (std::size_t m = 4; m <= 10; ++m) total += rewire_bruteforce(5, m, 1.0, measure(MeasureId::energy1)).ranking.size();
    CHECK(total == 21);
    const auto trees = rewire_bruteforce(5, 4, 1.0, measure(MeasureId::energy1));
    CHECK(trees.ranking.size() == 3);
    CHECK(trees.labeled_graphs == 125);  // Cayley: 5^3
    // the star is the best tree for energy1
    CHECK(canonical_form(trees.best) == canonical_form(generate(Family::star, 5)));
  }
  SUBCASE("K5 minus one edge") {
    const auto r = rewire_bruteforce(5, 9, 9.0, measure(MeasureId::energy1));
    CHECK(r.ranking.size() == 1);
    CHECK(r.labeled_graphs == 10);
  }
  SUBCASE("custom evaluator") {
    std::size_t calls = 0;
    const auto r = rewire_bruteforce(4, 3, 1.0, measure(MeasureId::energy1), [&](const WeightedGraph& g) {
      ++calls;
      return static_cast<double>(g.degrees()[0]);
    });
    CHECK(calls == 2);
    CHECK(r.ranking.size() == 2);
  }
  CHECK_THROWS_AS(rewire_bruteforce(9, 8, 1.0, measure(MeasureId::energy1)), Error);
  CHECK_THROWS_AS(rewire_bruteforce(4, 2, 1.0, measure(MeasureId::energy1)), Error);
  CHECK_THROWS_AS(rewire_bruteforce(4, 7, 1.0, measure(MeasureId::energy1)), Error);
  CHECK_THROWS_AS(rewire_bruteforce(4, 4, 0.0, measure(MeasureId::energy1)), Error);
}

TEST_CASE("fundamental limit") {
  const auto p3 = generate(Family::path, 3);
  CHECK(fundamental_limit(p3, 0, "inverse") == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(fundamental_limit(p3, 1, "inverse") == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(fundamental_limit(p3, 2, "inverse") == 0.0);
  CHECK(fundamental_limit(generate(Family::cycle, 4), 2, "inverse") == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  CHECK(fundamental_limit(generate(Family::complete, 5), 7, "inverse_sq") == 0.0);
  CHECK_THROWS_AS(fundamental_limit(p3, 1, "neg_log"), Error);
}

TEST_CASE("augmenting P3 and K3 respects the bound") {
  const auto p3 = generate(Family::path, 3);
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(std::pow(10.0, -2.0 + 5.0 * i / 50.0));
  for (double w : grid) {
    const auto r = greedy_augment(p3, 1, {{0, 2, {w}}}, "inverse");
    CHECK(r.bound == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(r.achieved >= r.bound - 1e-12);
    CHECK(r.gap >= -1e-12);
    CHECK(r.added.size() == 1);
  }
  // K3 is complete, so raise an existing edge instead
  const auto k3 = generate(Family::complete, 3);
  for (double w : grid) {
    const auto bumped = graph_add(k3, WeightedGraph(3, {{0, 1, w}}));
    const auto spec = laplacian_spectrum(bumped);
    CHECK(0.5 / spec.values[1] + 0.5 / spec.values[2] >= fundamental_limit(k3, 1, "inverse") - 1e-12);
  }
  const auto skipped = greedy_augment(k3, 1, {{0, 1, {1.0}}}, "inverse");
  CHECK(skipped.added.empty());
  CHECK(skipped.skipped.size() == 1);
  CHECK(skipped.achieved == skipped.initial);
}

TEST_CASE("greedy and exhaustive augmentation") {
  const auto path = generate(Family::path, 6);
  std::vector<CandidateEdge> cands;
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t v = u + 2; v < 6; ++v) cands.push_back({u, v, {0.5, 2.0}});
  for (std::size_t k : {1u, 2u, 3u}) {
    const auto greedy = greedy_augment(path, k, cands, "inverse");
    const auto exact = greedy_augment(path, k, cands, "inverse", AugmentStrategy::exhaustive);
    CHECK(exact.achieved <= greedy.achieved + 1e-12);
    CHECK(exact.achieved >= exact.bound - 1e-12);
    CHECK(greedy.achieved >= greedy.bound - 1e-12);
    CHECK(greedy.added.size() == k);
    if (k == 1) CHECK(greedy.achieved == doctest::Approx(exact.achieved).epsilon(1e-14));
  }
  // a repeated candidate is reported and ignored
  auto dup = cands;
  dup.push_back({2, 0, {1.0}});
  CHECK(greedy_augment(path, 1, dup, "inverse").skipped.size() == 1);
  CHECK_THROWS_AS(greedy_augment(path, 1, {}, "inverse"), Error);
  CHECK_THROWS_AS(greedy_augment(path, 1, cands, "neg_log"), Error);
  CHECK_THROWS_AS(greedy_augment(path, 1, {{0, 9, {1.0}}}, "inverse"), Error);
  CHECK_THROWS_AS(greedy_augment(path, 1, {{0, 2, {-1.0}}}, "inverse"), Error);

  std::vector<CandidateEdge> many;
  for (std::size_t u = 0; u < 12; ++u)
    for (std::size_t v = u + 2; v < 12; ++v) many.push_back({u, v, {1.0, 2.0, 3.0}});
  CHECK_THROWS_AS(greedy_augment(generate(Family::path, 12), 4, many, "inverse", AugmentStrategy::exhaustive), Error);
}

TEST_CASE("candidate parsing") {
  const auto c = parse_candidates("# candidates\nn 4\n0 2 0.5 1\n1 3 2 # note\n\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].u == 0);
  CHECK(c[0].v == 2);
  CHECK(c[0].weights == std::vector<double>{0.5, 1.0});
  CHECK(c[1].weights == std::vector<double>{2.0});
  try {
    parse_candidates("0 1 1\n0 x 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_candidates("0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_candidates("0 1 1.5x\n"), ParseError);
}
