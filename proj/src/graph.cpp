// SPDX-License-Identifier: Apache-2.0
#include "systemic/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "systemic/error.hpp"
#include "systemic/random.hpp"

namespace systemic {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::weight: return "weight";
    case ErrorKind::index: return "index";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::connectivity: return "connectivity";
    case ErrorKind::generation: return "generation";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::solver: return "solver";
    case ErrorKind::scale: return "scale";
    case ErrorKind::config: return "config";
    case ErrorKind::input: return "input";
  }
  return "unknown";
}

namespace {

std::string edge_name(std::size_t u, std::size_t v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

bool edge_less(const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; }

// Validation shared by the constructor and the parser, which wants line numbers.
void check_edge(std::size_t n, const Edge& e, std::size_t line) {
  if (e.u >= n || e.v >= n)
    throw ParseError(ErrorKind::index, line, "edge " + edge_name(e.u, e.v) + " has a node index >= n = " + std::to_string(n));
  if (e.u == e.v) throw ParseError(ErrorKind::format, line, "self-loop at node " + std::to_string(e.u));
  if (!(e.w > 0.0) || !std::isfinite(e.w))
    throw ParseError(ErrorKind::weight, line, "edge " + edge_name(e.u, e.v) + " has non-positive or non-finite weight");
}

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ == 0) throw Error(ErrorKind::format, "graph must have at least one node");
  for (auto& e : edges_) {
    check_edge(n_, e, 0);
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), edge_less);
  for (std::size_t k = 1; k < edges_.size(); ++k)
    if (edges_[k - 1].u == edges_[k].u && edges_[k - 1].v == edges_[k].v)
      throw Error(ErrorKind::format, "duplicate edge " + edge_name(edges_[k].u, edges_[k].v));
}

bool WeightedGraph::has_edge(std::size_t u, std::size_t v) const { return weight(u, v).has_value(); }

std::optional<double> WeightedGraph::weight(std::size_t u, std::size_t v) const {
  if (u > v) std::swap(u, v);
  const Edge key{u, v, 0.0};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key, edge_less);
  if (it != edges_.end() && it->u == u && it->v == v) return it->w;
  return std::nullopt;
}

std::vector<double> WeightedGraph::degrees() const {
  std::vector<double> d(n_, 0.0);
  for (const auto& e : edges_) {
    d[e.u] += e.w;
    d[e.v] += e.w;
  }
  return d;
}

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

WeightedGraph parse_graph(std::string_view text) {
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;  // edge -> line
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (!n) {
      std::size_t count = 0;
      if (tok.size() != 2 || tok[0] != "n" || !parse_number(tok[1], count) || count == 0)
        throw ParseError(ErrorKind::format, line_no, "expected header `n <positive count>`");
      n = count;
      continue;
    }
    if (tok.size() != 3) throw ParseError(ErrorKind::format, line_no, "expected `u v w`");
    long long u = 0, v = 0;
    double w = 0.0;
    if (!parse_number(tok[0], u) || !parse_number(tok[1], v))
      throw ParseError(ErrorKind::format, line_no, "node indices must be integers");
    if (!parse_number(tok[2], w)) throw ParseError(ErrorKind::format, line_no, "weight must be a decimal number");
    if (u < 0 || v < 0) throw ParseError(ErrorKind::index, line_no, "negative node index");
    Edge e{static_cast<std::size_t>(u), static_cast<std::size_t>(v), w};
    check_edge(*n, e, line_no);
    if (e.u > e.v) std::swap(e.u, e.v);
    auto [it, inserted] = seen.emplace(std::pair{e.u, e.v}, line_no);
    if (!inserted)
      throw ParseError(ErrorKind::format, line_no,
                       "duplicate edge " + edge_name(e.u, e.v) + " (first seen on line " + std::to_string(it->second) + ")");
    edges.push_back(e);
  }
  if (!n) throw ParseError(ErrorKind::format, 0, "missing `n <count>` header");
  return WeightedGraph(*n, std::move(edges));
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::input, "cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string serialize_graph(const WeightedGraph& g) {
  std::string out = "n " + std::to_string(g.node_count()) + "\n";
  char buf[64];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", e.u, e.v, e.w);
    out += buf;
  }
  return out;
}

Matrix laplacian(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  Matrix degree(n, n);
  Matrix adjacency(n, n);
  for (const auto& e : g.edges()) {
    adjacency(e.u, e.v) += e.w;
    adjacency(e.v, e.u) += e.w;
  }
  // Row i of A summed in column order; D_ii is that same sum, so each row of
  // D - A sums to zero up to the rounding of that one accumulation.
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += adjacency(i, j);
    degree(i, i) = d;
  }
  return degree - adjacency;
}

WeightedGraph graph_add(const WeightedGraph& a, const WeightedGraph& b) {
  if (a.node_count() != b.node_count())
    throw Error(ErrorKind::dimension, "graph_add: node counts differ (" + std::to_string(a.node_count()) + " vs " +
                                          std::to_string(b.node_count()) + ")");
  std::vector<Edge> merged;
  merged.reserve(a.edge_count() + b.edge_count());
  auto ia = a.edges().begin();
  auto ib = b.edges().begin();
  while (ia != a.edges().end() || ib != b.edges().end()) {
    if (ib == b.edges().end() || (ia != a.edges().end() && edge_less(*ia, *ib))) {
      merged.push_back(*ia++);
    } else if (ia == a.edges().end() || edge_less(*ib, *ia)) {
      merged.push_back(*ib++);
    } else {
      merged.push_back({ia->u, ia->v, ia->w + ib->w});
      ++ia;
      ++ib;
    }
  }
  return WeightedGraph(a.node_count(), std::move(merged));
}

WeightedGraph scalar_mul(double alpha, const WeightedGraph& g) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::domain, "scalar_mul: alpha must be positive");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto& e : edges) e.w *= alpha;
  return WeightedGraph(g.node_count(), std::move(edges));
}

bool is_connected(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
  }
  return reached == n;
}

namespace {

Matrix reduced_laplacian(const WeightedGraph& g, std::size_t removed) {
  const std::size_t n = g.node_count();
  const Matrix l = laplacian(g);
  Matrix reduced(n - 1, n - 1);
  for (std::size_t i = 0, ri = 0; i < n; ++i) {
    if (i == removed) continue;
    for (std::size_t j = 0, rj = 0; j < n; ++j) {
      if (j == removed) continue;
      reduced(ri, rj++) = l(i, j);
    }
    ++ri;
  }
  return reduced;
}

}  // namespace

double spanning_tree_count(const WeightedGraph& g, std::size_t removed) {
  if (removed >= g.node_count()) throw Error(ErrorKind::index, "spanning_tree_count: removed index out of range");
  if (!is_connected(g)) return 0.0;
  if (g.node_count() == 1) return 1.0;
  return determinant(reduced_laplacian(g, removed));
}

double log_spanning_tree_count(const WeightedGraph& g, std::size_t removed) {
  if (removed >= g.node_count()) throw Error(ErrorKind::index, "spanning_tree_count: removed index out of range");
  if (!is_connected(g)) return -std::numeric_limits<double>::infinity();
  if (g.node_count() == 1) return 0.0;
  return log_abs_determinant(reduced_laplacian(g, removed));
}

WeightedGraph with_weights(const WeightedGraph& g, std::span<const double> weights) {
  if (weights.size() != g.edge_count()) throw Error(ErrorKind::dimension, "with_weights: one weight per edge required");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].w = weights[k];
  return WeightedGraph(g.node_count(), std::move(edges));
}

// ---------------------------------------------------------------------------

Family parse_family(std::string_view name) {
  if (name == "complete") return Family::complete;
  if (name == "cycle") return Family::cycle;
  if (name == "path") return Family::path;
  if (name == "star") return Family::star;
  if (name == "erdos_renyi") return Family::erdos_renyi;
  throw Error(ErrorKind::input, "unknown graph family '" + std::string(name) + "'");
}

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::complete: return "complete";
    case Family::cycle: return "cycle";
    case Family::path: return "path";
    case Family::star: return "star";
    case Family::erdos_renyi: return "erdos_renyi";
  }
  return "unknown";
}

WeightedGraph generate(Family family, std::size_t n, const GeneratorParams& params, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::input, "generate: n must be at least 2");
  if (params.weight_range) {
    const auto [lo, hi] = *params.weight_range;
    if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorKind::input, "generate: weight range must satisfy 0 < lo <= hi");
  }
  Rng rng(seed);
  auto draw_weight = [&] { return params.weight_range ? rng.uniform(params.weight_range->first, params.weight_range->second) : 1.0; };

  std::vector<Edge> edges;
  switch (family) {
    case Family::complete:
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) edges.push_back({u, v, draw_weight()});
      break;
    case Family::cycle:
      for (std::size_t u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1, draw_weight()});
      if (n > 2) edges.push_back({0, n - 1, draw_weight()});
      break;
    case Family::path:
      for (std::size_t u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1, draw_weight()});
      break;
    case Family::star:
      for (std::size_t v = 1; v < n; ++v) edges.push_back({0, v, draw_weight()});
      break;
    case Family::erdos_renyi: {
      const double p = params.edge_probability;
      if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::input, "generate: edge probability must lie in (0, 1]");
      for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        edges.clear();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = u + 1; v < n; ++v)
            if (rng.uniform() < p) edges.push_back({u, v, draw_weight()});
        WeightedGraph g(n, edges);
        if (is_connected(g)) return g;
      }
      throw Error(ErrorKind::generation, "generate: no connected erdos_renyi draw within " +
                                             std::to_string(params.max_retries) + " retries");
    }
  }
  return WeightedGraph(n, std::move(edges));
}

}  // namespace systemic
