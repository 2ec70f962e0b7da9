// SPDX-License-Identifier: Apache-2.0
#include "systemic/properties.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "systemic/error.hpp"
#include "systemic/parallel.hpp"
#include "systemic/random.hpp"

namespace systemic {

namespace {

constexpr std::pair<PropertyId, const char*> kPropertyNames[] = {
    {PropertyId::homogeneity, "homogeneity"},     {PropertyId::monotonicity, "monotonicity"},
    {PropertyId::convexity, "convexity"},         {PropertyId::subadditivity, "subadditivity"},
    {PropertyId::orthogonal, "orthogonal"},       {PropertyId::schur, "schur"},
};

struct TrialResult {
  std::vector<Comparison> comparisons;
  bool skipped = false;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string describe(const WeightedGraph& g) {
  return "n=" + std::to_string(g.node_count()) + " m=" + std::to_string(g.edge_count());
}

WeightedGraph random_connected(Rng& rng, std::size_t n) {
  GeneratorParams params;
  params.edge_probability = rng.uniform(0.3, 0.9);
  params.weight_range = {{0.1, 10.0}};
  return generate(Family::erdos_renyi, n, params, rng.bits());
}

// Random graph on n nodes with at least one edge; need not be connected.
WeightedGraph random_extra(Rng& rng, std::size_t n) {
  const double q = rng.uniform(0.05, 0.5);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.uniform() < q) edges.push_back({u, v, rng.log_uniform(1e-2, 10.0)});
  if (edges.empty()) {
    const auto u = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 2));
    const auto v = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(u) + 1, static_cast<std::int64_t>(n) - 1));
    edges.push_back({u, v, rng.log_uniform(1e-2, 10.0)});
  }
  return WeightedGraph(n, std::move(edges));
}

std::size_t draw_n(Rng& rng, const PropertyOptions& opts) {
  return static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(opts.n_min), static_cast<std::int64_t>(opts.n_max)));
}

Comparison at_most(std::string input, double lhs, double rhs, double tol) {
  const double margin = lhs - rhs;
  return {std::move(input), lhs, rhs, margin, margin > tol * (1.0 + std::abs(rhs))};
}

Comparison equal(std::string input, double lhs, double rhs, double tol) {
  const double margin = std::abs(lhs - rhs);
  return {std::move(input), lhs, rhs, margin, margin > tol * (1.0 + std::abs(rhs))};
}

std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
  return perm;
}

WeightedGraph relabel(const WeightedGraph& g, const std::vector<std::size_t>& perm) {
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.w});
  return WeightedGraph(g.node_count(), std::move(edges));
}

TrialResult homogeneity_trial(const MeasureDescriptor& m, const PropertyOptions& opts, Rng& rng) {
  const auto g = random_connected(rng, draw_n(rng, opts));
  const double kappa = rng.uniform(0.1, 10.0);
  const double base = evaluate(g, m);
  const double lhs = evaluate(scalar_mul(kappa, g), m);
  const double rhs = base / kappa;
  const double margin = std::abs(lhs - rhs);
  return {{{describe(g) + " kappa=" + fmt(kappa), lhs, rhs, margin, margin > opts.tol * std::abs(base)}}};
}

TrialResult monotonicity_trial(const MeasureDescriptor& m, const PropertyOptions& opts, Rng& rng) {
  const std::size_t n = draw_n(rng, opts);
  const auto g2 = random_connected(rng, n);
  const auto h = random_extra(rng, n);
  const auto g1 = graph_add(g2, h);
  const Matrix p1 = pseudo_inverse(laplacian(g1));
  const Matrix p2 = pseudo_inverse(laplacian(g2));
  if (!psd_order(p1, p2, 1e-10 * std::max(1.0, p2.max_abs()))) return {{}, true};
  return {{at_most(describe(g2) + " plus " + std::to_string(h.edge_count()) + " edges", evaluate(g1, m), evaluate(g2, m),
                   opts.tol)}};
}

TrialResult convexity_trial(const MeasureDescriptor& m, const PropertyOptions& opts, Rng& rng) {
  const std::size_t n = draw_n(rng, opts);
  const auto g1 = random_connected(rng, n);
  const auto g2 = random_connected(rng, n);
  const double rho1 = evaluate(g1, m);
  const double rho2 = evaluate(g2, m);
  TrialResult out;
  for (double alpha : opts.alpha_grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::input, "convexity: alpha must lie in [0, 1]");
    WeightedGraph mix = alpha == 0.0   ? g2
                        : alpha == 1.0 ? g1
                                       : graph_add(scalar_mul(alpha, g1), scalar_mul(1.0 - alpha, g2));
    out.comparisons.push_back(at_most(describe(g1) + " vs " + describe(g2) + " alpha=" + fmt(alpha), evaluate(mix, m),
                                      alpha * rho1 + (1.0 - alpha) * rho2, opts.tol));
  }
  return out;
}

TrialResult subadditivity_trial(const MeasureDescriptor& m, const PropertyOptions& opts, Rng& rng) {
  const std::size_t n = draw_n(rng, opts);
  const auto g1 = random_connected(rng, n);
  const auto g2 = random_connected(rng, n);
  return {{at_most(describe(g1) + " + " + describe(g2), evaluate(graph_add(g1, g2), m), evaluate(g1, m) + evaluate(g2, m),
                   opts.tol)}};
}

TrialResult orthogonal_trial(const MeasureDescriptor& m, const PropertyOptions& opts, Rng& rng) {
  const auto g = random_connected(rng, draw_n(rng, opts));
  const double rhs = evaluate(g, m);
  const std::size_t n = g.node_count();
  switch (opts.sampler) {
    case OrthogonalSampler::permutation: {
      const auto perm = random_permutation(rng, n);
      return {{equal(describe(g) + " permuted", evaluate(relabel(g, perm), m), rhs, opts.tol)}};
    }
    case OrthogonalSampler::identity:
    case OrthogonalSampler::haar: {
      if (!classify(m).spectral)
        throw Error(ErrorKind::domain, m.describe() + " is not spectral; use permutation sampling");
      const Matrix u = opts.sampler == OrthogonalSampler::identity ? Matrix::identity(n) : random_orthogonal(n, rng.bits());
      Matrix rotated = u * laplacian(g) * u.transposed();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) rotated(i, j) = rotated(j, i) = 0.5 * (rotated(i, j) + rotated(j, i));
      const double lhs = evaluate_spectrum(laplacian_spectrum(rotated).values, m);
      return {{equal(describe(g) + " rotated", lhs, rhs, opts.tol)}};
    }
  }
  return {};
}

TrialResult schur_trial(const VectorMeasure& f, const PropertyOptions& opts, Rng& rng) {
  const std::size_t dim = draw_n(rng, opts) - 1;
  std::vector<double> x(dim);
  for (double& v : x) v = rng.log_uniform(0.1, 10.0);
  const auto terms = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(dim) + 1));
  std::vector<double> theta(terms);
  double total = 0.0;
  for (double& t : theta) total += (t = rng.exponential());
  std::vector<double> dx(dim, 0.0);
  for (std::size_t j = 0; j < terms; ++j) {
    const auto perm = random_permutation(rng, dim);
    const double weight = theta[j] / total;
    for (std::size_t i = 0; i < dim; ++i) dx[i] += weight * x[perm[i]];
  }
  return {{at_most("dim=" + std::to_string(dim) + " permutations=" + std::to_string(terms), f(dx), f(x), opts.tol)}};
}

VectorMeasure vector_form(const MeasureDescriptor& m) {
  if (!classify(m).spectral) throw Error(ErrorKind::domain, m.describe() + " is not a function of the eigenvalues");
  return [m](std::span<const double> x) { return evaluate_nonzero(x, m); };
}

TrialResult run_trial(PropertyId property, const MeasureDescriptor& m, const VectorMeasure* f,
                      const PropertyOptions& opts, std::size_t trial) {
  Rng rng(derive_seed(opts.seed, trial));
  switch (property) {
    case PropertyId::homogeneity: return homogeneity_trial(m, opts, rng);
    case PropertyId::monotonicity: return monotonicity_trial(m, opts, rng);
    case PropertyId::convexity: return convexity_trial(m, opts, rng);
    case PropertyId::subadditivity: return subadditivity_trial(m, opts, rng);
    case PropertyId::orthogonal: return orthogonal_trial(m, opts, rng);
    case PropertyId::schur: return schur_trial(*f, opts, rng);
  }
  return {};
}

void check_options(const PropertyOptions& opts) {
  if (opts.n_min < 2 || opts.n_max < opts.n_min) throw Error(ErrorKind::input, "property checks need 2 <= n_min <= n_max");
  if (!(opts.tol >= 0.0)) throw Error(ErrorKind::input, "property tolerance must be non-negative");
}

PropertyReport run(PropertyId property, const MeasureDescriptor& m, const VectorMeasure* f, std::string name,
                   const PropertyOptions& opts) {
  check_options(opts);
  std::vector<TrialResult> results(opts.trials);
  parallel_for(opts.trials, [&](std::size_t t) { results[t] = run_trial(property, m, f, opts, t); });

  PropertyReport report;
  report.property = property;
  report.measure = std::move(name);
  report.trials = opts.trials;
  report.seed = opts.seed;
  report.tol = opts.tol;
  for (std::size_t t = 0; t < results.size(); ++t) {
    report.skipped += results[t].skipped ? 1 : 0;
    report.comparisons += results[t].comparisons.size();
    for (const auto& c : results[t].comparisons)
      if (c.breach) report.violations.push_back({t, c.input, c.lhs, c.rhs, c.margin});
  }
  return report;
}

}  // namespace

PropertyId parse_property_id(std::string_view name) {
  for (const auto& [id, text] : kPropertyNames)
    if (name == text) return id;
  throw Error(ErrorKind::input, "unknown property '" + std::string(name) + "'");
}

const char* to_string(PropertyId id) noexcept {
  for (const auto& [pid, text] : kPropertyNames)
    if (pid == id) return text;
  return "unknown";
}

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = rng.normal();
  // modified Gram-Schmidt over columns, twice for orthogonality to working precision
  for (std::size_t c = 0; c < n; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t prev = 0; prev < c; ++prev) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, prev) * q(i, c);
        for (std::size_t i = 0; i < n; ++i) q(i, c) -= dot * q(i, prev);
      }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, c) * q(i, c);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, c) /= norm;
  }
  return q;
}

PropertyReport check_homogeneity(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  return run(PropertyId::homogeneity, m, nullptr, m.describe(), opts);
}

PropertyReport check_monotonicity(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  return run(PropertyId::monotonicity, m, nullptr, m.describe(), opts);
}

PropertyReport check_convexity(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  return run(PropertyId::convexity, m, nullptr, m.describe(), opts);
}

PropertyReport check_subadditivity(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  return run(PropertyId::subadditivity, m, nullptr, m.describe(), opts);
}

PropertyReport check_orthogonal_invariance(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  if (opts.sampler != OrthogonalSampler::permutation && !classify(m).spectral)
    throw Error(ErrorKind::domain, m.describe() + " is not spectral; orthogonal invariance is undefined for it");
  return run(PropertyId::orthogonal, m, nullptr, m.describe(), opts);
}

PropertyReport check_schur_convexity(const VectorMeasure& f, std::string name, const PropertyOptions& opts) {
  return run(PropertyId::schur, {}, &f, std::move(name), opts);
}

PropertyReport check_schur_convexity(const MeasureDescriptor& m, const PropertyOptions& opts) {
  m.validate();
  const VectorMeasure f = vector_form(m);
  return check_schur_convexity(f, m.describe(), opts);
}

PropertyReport check_property(PropertyId property, const MeasureDescriptor& m, const PropertyOptions& opts) {
  switch (property) {
    case PropertyId::homogeneity: return check_homogeneity(m, opts);
    case PropertyId::monotonicity: return check_monotonicity(m, opts);
    case PropertyId::convexity: return check_convexity(m, opts);
    case PropertyId::subadditivity: return check_subadditivity(m, opts);
    case PropertyId::orthogonal: return check_orthogonal_invariance(m, opts);
    case PropertyId::schur: return check_schur_convexity(m, opts);
  }
  throw Error(ErrorKind::input, "unknown property");
}

std::vector<Comparison> replay_trial(PropertyId property, const MeasureDescriptor& m, const PropertyOptions& opts,
                                     std::size_t trial) {
  m.validate();
  check_options(opts);
  if (property == PropertyId::schur) {
    const VectorMeasure f = vector_form(m);
    return run_trial(property, m, &f, opts, trial).comparisons;
  }
  return run_trial(property, m, nullptr, opts, trial).comparisons;
}

std::vector<PropertyId> required_properties(const MeasureDescriptor& m) {
  const MeasureClass c = classify(m);
  std::vector<PropertyId> out{PropertyId::monotonicity, PropertyId::convexity};
  if (c.convex) {
    if (c.homogeneous) out.push_back(PropertyId::homogeneity);
    out.push_back(PropertyId::subadditivity);
  }
  if (c.schur_convex) {
    out.push_back(PropertyId::orthogonal);
    out.push_back(PropertyId::schur);
  }
  return out;
}

}  // namespace systemic
