// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "systemic/matrix.hpp"

namespace systemic {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite, simple, undirected graph with strictly positive edge weights.
///
/// Edges are stored with u < v and sorted lexicographically by (u, v), so two
/// graphs compare equal exactly when they have the same node count, edge set
/// and weights. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Validates and canonicalizes. Throws Error on self-loops or duplicates
  /// (format), non-positive or non-finite weights (weight), or indices >= n
  /// (index).
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool has_edge(std::size_t u, std::size_t v) const;
  std::optional<double> weight(std::size_t u, std::size_t v) const;
  /// Weighted degrees d_i.
  std::vector<double> degrees() const;
  double total_weight() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Reads the edge-list format: `# comment` lines, one `n <count>` header,
/// then `u v w` lines. Errors carry the 1-based line number.
WeightedGraph parse_graph(std::string_view text);
WeightedGraph read_graph_file(const std::string& path);
/// Inverse of parse_graph; weights use 17 significant digits.
std::string serialize_graph(const WeightedGraph& g);

/// L = D - A.
Matrix laplacian(const WeightedGraph& g);

/// Network addition: the Laplacian of the result is L1 + L2. Shared edges
/// get summed weights.
WeightedGraph graph_add(const WeightedGraph& a, const WeightedGraph& b);
/// Network scaling: every weight multiplied by alpha > 0.
WeightedGraph scalar_mul(double alpha, const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

/// Weighted spanning-tree count via the matrix-tree theorem: determinant of
/// the Laplacian with row and column `removed` deleted. 0 for a disconnected
/// graph, 1 for n = 1.
double spanning_tree_count(const WeightedGraph& g, std::size_t removed = 0);
/// log of spanning_tree_count, without overflow; -inf when disconnected.
double log_spanning_tree_count(const WeightedGraph& g, std::size_t removed = 0);

/// Graph with the same edges as `g` but the weights in `weights` (same
/// canonical edge order). Used by the weight allocator.
WeightedGraph with_weights(const WeightedGraph& g, std::span<const double> weights);

// ---------------------------------------------------------------------------
// Generators

enum class Family { complete, cycle, path, star, erdos_renyi };

Family parse_family(std::string_view name);
const char* to_string(Family family) noexcept;

struct GeneratorParams {
  /// Edge probability for erdos_renyi, in (0, 1].
  double edge_probability = 0.5;
  /// Uniform weight range [lo, hi]; unit weights when absent.
  std::optional<std::pair<double, double>> weight_range;
  /// erdos_renyi redraws until connected, at most this many times.
  int max_retries = 1000;
};

/// Deterministic for a fixed seed. Star uses node 0 as the hub; path and
/// cycle visit nodes in index order.
WeightedGraph generate(Family family, std::size_t n, const GeneratorParams& params = {}, std::uint64_t seed = 0);

}  // namespace systemic
