// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include "systemic/design.hpp"
#include "systemic/error.hpp"
#include "systemic/parallel.hpp"

namespace systemic {

namespace {

using Mask = std::uint32_t;

// Pair (u, v), u < v, in row-major upper-triangle order.
std::size_t pair_index(std::size_t n, std::size_t u, std::size_t v) {
  return u * n - u * (u + 1) / 2 + (v - u - 1);
}

struct PairTable {
  std::size_t n;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  explicit PairTable(std::size_t n_) : n(n_) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  }
  // The first pair is the most significant bit, so a smaller integer is a
  // lexicographically smaller bitstring.
  Mask bit(std::size_t idx) const { return Mask{1} << (pairs.size() - 1 - idx); }
};

bool mask_connected(const PairTable& t, Mask mask) {
  std::vector<std::size_t> parent(t.n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = t.n;
  for (std::size_t i = 0; i < t.pairs.size(); ++i) {
    if (!(mask & t.bit(i))) continue;
    const auto a = find(t.pairs[i].first);
    const auto b = find(t.pairs[i].second);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

Mask canonical_mask(const PairTable& t, Mask mask) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < t.pairs.size(); ++i)
    if (mask & t.bit(i)) edges.push_back(t.pairs[i]);
  std::vector<std::size_t> perm(t.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Mask best = mask;
  do {
    Mask mapped = 0;
    for (auto [u, v] : edges) {
      auto a = perm[u], b = perm[v];
      if (a > b) std::swap(a, b);
      mapped |= t.bit(pair_index(t.n, a, b));
      if (mapped > best) break;
    }
    best = std::min(best, mapped);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> mask_edges(const PairTable& t, Mask mask) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < t.pairs.size(); ++i)
    if (mask & t.bit(i)) edges.push_back(t.pairs[i]);
  return edges;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> canonical_form(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  if (n > kMaxRewireNodes) throw Error(ErrorKind::scale, "canonical_form supports at most 8 nodes");
  const PairTable t(n);
  Mask mask = 0;
  for (const auto& e : g.edges()) mask |= t.bit(pair_index(n, e.u, e.v));
  return mask_edges(t, canonical_mask(t, mask));
}

RewireResult rewire_bruteforce(std::size_t n, std::size_t m, double alpha, const MeasureDescriptor& meas,
                               const GraphEvaluator& evaluator) {
  meas.validate();
  if (n > kMaxRewireNodes) throw Error(ErrorKind::scale, "rewire_bruteforce supports at most 8 nodes");
  if (n < 2) throw Error(ErrorKind::input, "rewire_bruteforce needs at least 2 nodes");
  const std::size_t pairs = n * (n - 1) / 2;
  if (m < n - 1 || m > pairs) throw Error(ErrorKind::input, "edge count must lie in [n-1, n(n-1)/2]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::domain, "alpha must be positive and finite");
  if (binomial(pairs, m) > 2e7) throw Error(ErrorKind::scale, "too many labeled graphs to enumerate");

  const PairTable table(n);
  std::vector<Mask> connected;
  // Gosper's hack walks the masks with m bits set in increasing order.
  const Mask limit = Mask{1} << pairs;
  for (Mask mask = (Mask{1} << m) - 1; mask < limit;) {
    if (mask_connected(table, mask)) connected.push_back(mask);
    if (mask == 0) break;
    const Mask c = mask & (~mask + 1);
    const Mask r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }

  std::vector<Mask> canon(connected.size());
  parallel_for(connected.size(), [&](std::size_t i) { canon[i] = canonical_mask(table, connected[i]); });

  std::map<Mask, std::size_t> counts;
  for (Mask c : canon) ++counts[c];

  std::vector<Mask> classes;
  for (const auto& kv : counts) classes.push_back(kv.first);
  const double weight = alpha / static_cast<double>(m);
  std::vector<double> values(classes.size());
  parallel_for(classes.size(), [&](std::size_t i) {
    std::vector<Edge> edges;
    for (auto [u, v] : mask_edges(table, classes[i])) edges.push_back({u, v, weight});
    const WeightedGraph g(n, std::move(edges));
    values[i] = evaluator ? evaluator(g) : evaluate(g, meas);
  });

  RewireResult out{WeightedGraph(n, {}), 0.0, {}, connected.size()};
  for (std::size_t i = 0; i < classes.size(); ++i)
    out.ranking.push_back({mask_edges(table, classes[i]), values[i], counts[classes[i]]});
  std::sort(out.ranking.begin(), out.ranking.end(), [](const RewireClass& a, const RewireClass& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.canonical_edges < b.canonical_edges;
  });

  // Values equal up to rounding count as ties; the smallest edge list wins.
  const double floor_value = out.ranking.front().value;
  const double slack = 1e-12 * std::max(1.0, std::abs(floor_value));
  const RewireClass* best = &out.ranking.front();
  for (const auto& cls : out.ranking)
    if (cls.value - floor_value <= slack && cls.canonical_edges < best->canonical_edges) best = &cls;

  std::vector<Edge> best_edges;
  for (auto [u, v] : best->canonical_edges) best_edges.push_back({u, v, weight});
  out.best = WeightedGraph(n, std::move(best_edges));
  out.value = best->value;
  return out;
}

}  // namespace systemic
