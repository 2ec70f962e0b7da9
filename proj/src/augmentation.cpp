// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "systemic/design.hpp"
#include "systemic/error.hpp"
#include "systemic/parallel.hpp"

namespace systemic {

namespace {

ScalarFunction vanishing_function(const std::string& f_id) {
  ScalarFunction f = FunctionRegistry::global().make(f_id);
  if (!f.vanishes_at_infinity) throw Error(ErrorKind::domain, "function '" + f_id + "' does not vanish at infinity");
  return f;
}

double spectral_sum(const WeightedGraph& g, const ScalarFunction& f) {
  const Spectrum s = laplacian_spectrum(g);
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) total += f.value(s.values[i]);
  return total;
}

WeightedGraph with_added(const WeightedGraph& g, const std::vector<Edge>& extra) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.insert(edges.end(), extra.begin(), extra.end());
  return WeightedGraph(g.node_count(), std::move(edges));
}

std::string describe(const CandidateEdge& c, const char* reason) {
  std::ostringstream os;
  os << c.u << "-" << c.v << ": " << reason;
  return os.str();
}

// Each distinct (edge, weight) option, in candidate then weight order.
struct Option {
  std::size_t candidate;
  Edge edge;
};

}  // namespace

double fundamental_limit(const WeightedGraph& g, std::size_t k, const std::string& f_id) {
  const ScalarFunction f = vanishing_function(f_id);
  const Spectrum s = laplacian_spectrum(g);
  double total = 0.0;
  // 1-based indices k+2 .. n are 0-based k+1 .. n-1.
  for (std::size_t i = k + 1; i < s.size(); ++i) total += f.value(s.values[i]);
  return total;
}

AugmentationReport greedy_augment(const WeightedGraph& g, std::size_t k, const std::vector<CandidateEdge>& candidates,
                                  const std::string& f_id, AugmentStrategy strategy) {
  if (candidates.empty()) throw Error(ErrorKind::input, "candidate set is empty");
  const ScalarFunction f = vanishing_function(f_id);
  const std::size_t n = g.node_count();

  AugmentationReport report;
  report.initial = spectral_sum(g, f);
  report.bound = fundamental_limit(g, k, f_id);

  std::vector<CandidateEdge> usable;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& c : candidates) {
    if (c.u >= n || c.v >= n) throw Error(ErrorKind::index, "candidate endpoint out of range");
    if (c.u == c.v) throw Error(ErrorKind::input, "candidate is a self-loop");
    if (c.weights.empty()) throw Error(ErrorKind::input, "candidate has no weight options");
    for (double w : c.weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::weight, "candidate weights must be positive");
    const auto key = std::minmax(c.u, c.v);
    if (g.has_edge(key.first, key.second)) {
      report.skipped.push_back(describe(c, "edge already present"));
      continue;
    }
    if (!seen.insert(key).second) {
      report.skipped.push_back(describe(c, "duplicate candidate"));
      continue;
    }
    usable.push_back(c);
  }

  std::vector<Option> options;
  for (std::size_t i = 0; i < usable.size(); ++i)
    for (double w : usable[i].weights) options.push_back({i, {usable[i].u, usable[i].v, w}});

  if (strategy == AugmentStrategy::greedy) {
    std::vector<bool> used(usable.size(), false);
    double current = report.initial;
    for (std::size_t step = 0; step < k; ++step) {
      std::vector<double> scores(options.size(), std::numeric_limits<double>::infinity());
      parallel_for(options.size(), [&](std::size_t i) {
        if (used[options[i].candidate]) return;
        auto extra = report.added;
        extra.push_back(options[i].edge);
        scores[i] = spectral_sum(with_added(g, extra), f);
      });
      std::size_t pick = options.size();
      for (std::size_t i = 0; i < options.size(); ++i)
        if (scores[i] < current && (pick == options.size() || scores[i] < scores[pick])) pick = i;
      if (pick == options.size()) break;  // nothing lowers the measure further
      used[options[pick].candidate] = true;
      report.added.push_back(options[pick].edge);
      current = scores[pick];
    }
    report.achieved = current;
  } else {
    // Enumerate subsets of at most k candidates; each chosen candidate picks
    // one of its weights.
    double combos = 0.0;
    {
      std::vector<double> ways(k + 1, 0.0);
      ways[0] = 1.0;
      for (const auto& c : usable)
        for (std::size_t j = k; j >= 1; --j) ways[j] += ways[j - 1] * static_cast<double>(c.weights.size());
      for (double w : ways) combos += w;
    }
    if (combos > 1e5) throw Error(ErrorKind::scale, "exhaustive augmentation exceeds 1e5 combinations");

    std::vector<std::vector<Edge>> choices;
    std::vector<Edge> chosen;
    auto recurse = [&](auto&& self, std::size_t from) -> void {
      choices.push_back(chosen);
      if (chosen.size() == k) return;
      for (std::size_t i = from; i < usable.size(); ++i)
        for (double w : usable[i].weights) {
          chosen.push_back({usable[i].u, usable[i].v, w});
          self(self, i + 1);
          chosen.pop_back();
        }
    };
    recurse(recurse, 0);
    std::vector<double> scores(choices.size());
    parallel_for(choices.size(), [&](std::size_t i) { scores[i] = spectral_sum(with_added(g, choices[i]), f); });
    std::size_t pick = 0;
    for (std::size_t i = 1; i < choices.size(); ++i)
      if (scores[i] < scores[pick]) pick = i;
    report.added = choices[pick];
    report.achieved = scores[pick];
  }
  report.gap = report.achieved - report.bound;
  return report;
}

std::vector<CandidateEdge> parse_candidates(std::string_view text) {
  std::vector<CandidateEdge> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "n") continue;
    CandidateEdge c;
    std::string token;
    try {
      std::size_t used = 0;
      const long long u = std::stoll(first, &used);
      if (used != first.size() || u < 0) throw std::invalid_argument(first);
      if (!(fields >> token)) throw ParseError(ErrorKind::format, line_no, "candidate needs `u v w...`");
      const long long v = std::stoll(token, &used);
      if (used != token.size() || v < 0) throw std::invalid_argument(token);
      c.u = static_cast<std::size_t>(u);
      c.v = static_cast<std::size_t>(v);
      while (fields >> token) {
        const double w = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        c.weights.push_back(w);
      }
    } catch (const std::logic_error&) {
      throw ParseError(ErrorKind::format, line_no, "malformed candidate line");
    }
    if (c.weights.empty()) throw ParseError(ErrorKind::format, line_no, "candidate has no weights");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace systemic
