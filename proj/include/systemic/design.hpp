// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "systemic/graph.hpp"
#include "systemic/measures.hpp"

namespace systemic {

// ---------------------------------------------------------------------------
// Edge-weight allocation on a fixed topology

/// Node count plus a canonical (sorted, u < v) list of candidate edges.
class Topology {
 public:
  /// Throws like WeightedGraph on self-loops, duplicates or bad indices, and
  /// a connectivity Error if the edges do not connect all nodes.
  Topology(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);
  static Topology of(const WeightedGraph& g);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

  /// Graph on the edges with positive weight; zero-weight edges are dropped.
  WeightedGraph realize(std::span<const double> weights) const;

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

struct SolverOptions {
  /// Stop once the stationarity residual falls below this.
  double tol = 1e-9;
  int max_iters = 20000;
  /// Armijo sufficient-decrease constant.
  double armijo = 1e-4;
};

struct WeightAllocationResult {
  /// On the unit simplex, in topology edge order.
  std::vector<double> weights;
  double objective = 0.0;
  int iterations = 0;
  /// max over edges with positive weight of |g_e - mean of those g_e|.
  double stationarity_residual = 0.0;
  /// Edges whose weight is exactly 0.
  std::vector<std::size_t> active_set;
  bool converged = false;
  /// Objective after each accepted iterate, starting with the uniform point.
  std::vector<double> history;
};

/// Minimizes a measure over weights w >= 0 with sum 1 by projected gradient
/// descent from the uniform point, with Armijo backtracking. The gradient uses
/// dL/dw_e = b_e b_e^T, so d rho / d w_e = sum_i (d rho / d lambda_i)
/// (v_i^T b_e)^2. Measures that depend on lambda_2 alone use a subgradient
/// from the lambda_2 eigenspace with diminishing steps, accepting only
/// improving iterates. Steps that disconnect the support are halved; a solver
/// Error is raised when no step can be taken at all.
WeightAllocationResult optimize_weights(const Topology& t, const MeasureDescriptor& m, const SolverOptions& opts = {});

/// d rho / d w for the graph t.realize(weights).
std::vector<double> weight_gradient(const Topology& t, std::span<const double> weights, const MeasureDescriptor& m);

/// Euclidean projection onto {w >= 0, sum w = 1} (sort-based).
std::vector<double> project_to_simplex(std::span<const double> v);

// ---------------------------------------------------------------------------
// Rewiring: brute force over connected graphs with n nodes and m edges

inline constexpr std::size_t kMaxRewireNodes = 8;

struct RewireClass {
  /// Canonical labeling: the one whose upper-triangle adjacency bitstring,
  /// read in (0,1), (0,2), ..., (n-2,n-1) order, is lexicographically smallest.
  std::vector<std::pair<std::size_t, std::size_t>> canonical_edges;
  double value = 0.0;
  /// Labeled graphs in this isomorphism class.
  std::size_t labelings = 0;
};

struct RewireResult {
  WeightedGraph best;
  double value = 0.0;
  /// Ascending by value, ties by canonical edge list.
  std::vector<RewireClass> ranking;
  std::size_t labeled_graphs = 0;
};

/// Optional per-graph evaluator replacing the plain equal-weight evaluation,
/// e.g. to optimize weights within each topology.
using GraphEvaluator = std::function<double(const WeightedGraph&)>;

/// Enumerates every connected simple graph on n labeled nodes with m edges,
/// each edge weighted alpha / m, and ranks the isomorphism classes by the
/// measure. Scale Error for n > 8; input Error when m is outside
/// [n-1, n(n-1)/2].
RewireResult rewire_bruteforce(std::size_t n, std::size_t m, double alpha, const MeasureDescriptor& meas,
                               const GraphEvaluator& evaluator = {});

/// Canonical edge list of g (weights ignored), as used by rewire_bruteforce.
std::vector<std::pair<std::size_t, std::size_t>> canonical_form(const WeightedGraph& g);

// ---------------------------------------------------------------------------
// Edge augmentation and its fundamental limit

struct CandidateEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  /// Weights the edge may be added with.
  std::vector<double> weights;
};

enum class AugmentStrategy { greedy, exhaustive };

struct AugmentationReport {
  std::vector<Edge> added;
  double initial = 0.0;
  double achieved = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  /// Candidates ignored because the edge already exists or repeats.
  std::vector<std::string> skipped;
};

/// Limit of any augmentation by at most k edges: sum_{i=k+2}^{n} f(lambda_i)
/// over the current spectrum (0 when k + 2 > n). f must vanish at infinity.
double fundamental_limit(const WeightedGraph& g, std::size_t k, const std::string& f_id);

/// Adds up to k candidate edges to lower sum_{i>=2} f(lambda_i). Greedy
/// picks the best (edge, weight) pair at each step; exhaustive tries every
/// subset of at most k candidates with every weight choice, and is refused
/// (scale Error) beyond 1e5 combinations. Input Error for an empty candidate
/// set.
AugmentationReport greedy_augment(const WeightedGraph& g, std::size_t k, const std::vector<CandidateEdge>& candidates,
                                  const std::string& f_id, AugmentStrategy strategy = AugmentStrategy::greedy);

/// Candidate file: optional `n <count>` header is not used; each line is
/// `u v w1 [w2 ...]`, `#` starts a comment.
std::vector<CandidateEdge> parse_candidates(std::string_view text);

}  // namespace systemic
