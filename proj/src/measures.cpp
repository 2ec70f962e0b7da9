// SPDX-License-Identifier: Apache-2.0
#include "systemic/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "systemic/error.hpp"

namespace systemic {

// ---------------------------------------------------------------------------
// Function registry

bool sampled_decreasing_convex(const std::function<double(double)>& f) {
  constexpr int kSamples = 241;
  std::vector<double> x(kSamples), y(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    x[i] = std::pow(10.0, -3.0 + 6.0 * i / (kSamples - 1));
    y[i] = f(x[i]);
    if (!std::isfinite(y[i])) return false;
  }
  for (int i = 1; i < kSamples; ++i) {
    const double slack = 1e-12 * std::max(std::abs(y[i]), std::abs(y[i - 1]));
    if (y[i] > y[i - 1] + slack) return false;
  }
  // convexity on a nonuniform grid: slopes must be non-decreasing
  for (int i = 1; i + 1 < kSamples; ++i) {
    const double left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (right < left - 1e-9 * std::max(1.0, std::abs(left))) return false;
  }
  return true;
}

FunctionRegistry& FunctionRegistry::global() {
  static FunctionRegistry registry;
  return registry;
}

namespace {

double require_param(const std::string& family, std::optional<double> param) {
  if (!param) throw Error(ErrorKind::input, "function '" + family + "' needs a parameter, e.g. " + family + "(2)");
  if (!(*param > 0.0) || !std::isfinite(*param))
    throw Error(ErrorKind::domain, "function '" + family + "' needs a positive finite parameter");
  return *param;
}

void forbid_param(const std::string& family, std::optional<double> param) {
  if (param) throw Error(ErrorKind::input, "function '" + family + "' takes no parameter");
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

FunctionRegistry::FunctionRegistry() {
  factories_["inverse"] = [](std::optional<double> param) {
    forbid_param("inverse", param);
    return ScalarFunction{"inverse", [](double x) { return 0.5 / x; }, [](double x) { return -0.5 / (x * x); }, true};
  };
  factories_["inverse_sq"] = [](std::optional<double> param) {
    forbid_param("inverse_sq", param);
    return ScalarFunction{"inverse_sq", [](double x) { return 0.5 / (x * x); },
                          [](double x) { return -1.0 / (x * x * x); }, true};
  };
  factories_["inverse_pow"] = [](std::optional<double> param) {
    const double q = require_param("inverse_pow", param);
    return ScalarFunction{"inverse_pow(" + format_param(q) + ")", [q](double x) { return std::pow(x, -q); },
                          [q](double x) { return -q * std::pow(x, -q - 1.0); }, true};
  };
  factories_["exp_decay"] = [](std::optional<double> param) {
    const double c = require_param("exp_decay", param);
    return ScalarFunction{"exp_decay(" + format_param(c) + ")", [c](double x) { return std::exp(-c * x); },
                          [c](double x) { return -c * std::exp(-c * x); }, true};
  };
  factories_["neg_log"] = [](std::optional<double> param) {
    forbid_param("neg_log", param);
    return ScalarFunction{"neg_log", [](double x) { return -std::log(x); }, [](double x) { return -1.0 / x; }, false};
  };
}

void FunctionRegistry::add(const std::string& family, Factory factory) {
  std::lock_guard lock(mutex_);
  if (!factories_.emplace(family, std::move(factory)).second)
    throw Error(ErrorKind::input, "function family '" + family + "' already registered");
}

ScalarFunction FunctionRegistry::make(std::string_view id) const {
  std::string family(id);
  std::optional<double> param;
  auto parse_param = [&](std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw Error(ErrorKind::input, "bad function parameter in '" + std::string(id) + "'");
    param = v;
  };
  if (auto open = id.find('('); open != std::string_view::npos) {
    if (id.back() != ')') throw Error(ErrorKind::input, "bad function id '" + std::string(id) + "'");
    family = std::string(id.substr(0, open));
    parse_param(id.substr(open + 1, id.size() - open - 2));
  } else if (auto colon = id.find(':'); colon != std::string_view::npos) {
    family = std::string(id.substr(0, colon));
    parse_param(id.substr(colon + 1));
  }
  Factory factory;
  {
    std::lock_guard lock(mutex_);
    auto it = factories_.find(family);
    if (it == factories_.end()) throw Error(ErrorKind::input, "unknown function id '" + std::string(id) + "'");
    factory = it->second;
  }
  ScalarFunction f = factory(param);
  if (!sampled_decreasing_convex(f.value))
    throw Error(ErrorKind::domain, "function '" + f.name + "' is not decreasing and convex on the sample grid");
  return f;
}

std::vector<std::string> FunctionRegistry::families() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

constexpr std::pair<MeasureId, const char*> kMeasureNames[] = {
    {MeasureId::zeta_measure, "zeta_measure"},
    {MeasureId::hp_norm, "hp_norm"},
    {MeasureId::h2, "h2"},
    {MeasureId::hinf, "hinf"},
    {MeasureId::energy1, "energy1"},
    {MeasureId::energy2, "energy2"},
    {MeasureId::convergence_time, "convergence_time"},
    {MeasureId::local_error, "local_error"},
    {MeasureId::entropy, "entropy"},
    {MeasureId::schur_sum, "schur_sum"},
};

}  // namespace

MeasureId parse_measure_id(std::string_view name) {
  for (const auto& [id, text] : kMeasureNames)
    if (name == text) return id;
  throw Error(ErrorKind::input, "unknown measure '" + std::string(name) + "'");
}

const char* to_string(MeasureId id) noexcept {
  for (const auto& [mid, text] : kMeasureNames)
    if (mid == id) return text;
  return "unknown";
}

void MeasureDescriptor::validate() const {
  switch (id) {
    case MeasureId::zeta_measure:
      if (!(p >= 1.0)) throw Error(ErrorKind::domain, "zeta_measure needs 1 <= p <= inf");
      if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::domain, "zeta_measure needs k > 0");
      break;
    case MeasureId::hp_norm:
      if (!(p > 1.0))
        throw Error(ErrorKind::domain, "hp_norm needs p > 1 (the frequency integral diverges at p = 1)");
      break;
    case MeasureId::schur_sum:
      if (f_id.empty()) throw Error(ErrorKind::input, "schur_sum needs a function id");
      FunctionRegistry::global().make(f_id);
      break;
    default:
      break;
  }
}

std::string MeasureDescriptor::describe() const {
  std::string out = to_string(id);
  switch (id) {
    case MeasureId::zeta_measure: out += "(p=" + format_param(p) + ",k=" + format_param(k) + ")"; break;
    case MeasureId::hp_norm: out += "(p=" + format_param(p) + ")"; break;
    case MeasureId::schur_sum: out += "(f=" + f_id + ")"; break;
    default: break;
  }
  return out;
}

MeasureClass classify(const MeasureDescriptor& m) {
  switch (m.id) {
    case MeasureId::convergence_time:
    case MeasureId::hinf:
    case MeasureId::energy1:
    case MeasureId::zeta_measure: return {true, true, true, true};
    case MeasureId::hp_norm: return std::isinf(m.p) ? MeasureClass{true, true, true, true} : MeasureClass{true, false, false, true};
    case MeasureId::h2:
    case MeasureId::energy2:
    case MeasureId::entropy:
    case MeasureId::schur_sum: return {true, false, false, true};
    case MeasureId::local_error: return {false, true, true, false};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Spectral measures

namespace {

std::span<const double> nonzero_part(std::span<const double> laplacian_values) {
  if (laplacian_values.size() < 2) throw Error(ErrorKind::domain, "spectral measures need at least two nodes");
  return laplacian_values.subspan(1);
}

double power_sum(std::span<const double> x, double q) {
  double s = 0.0;
  for (double v : x) s += std::pow(v, -q);
  return s;
}

double min_value(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::domain, "spectral measures need at least two nodes");
  return *std::min_element(x.begin(), x.end());
}

}  // namespace

double zeta(std::span<const double> laplacian_values, double p) {
  return power_sum(nonzero_part(laplacian_values), p);
}

double zeta(const WeightedGraph& g, double p) { return zeta(laplacian_spectrum(g).values, p); }

double zeta_measure(const WeightedGraph& g, double p, double k) {
  return evaluate(g, {MeasureId::zeta_measure, p, k, {}});
}

double hp_constant(double p) {
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorKind::domain, "hp_constant needs 1 < p < inf");
  const double a = 0.5 * (p - 1.0);
  const double log_beta = std::lgamma(a) + std::lgamma(0.5) - std::lgamma(a + 0.5);
  return std::exp(log_beta) / (2.0 * std::numbers::pi);
}

double hp_norm(const WeightedGraph& g, double p) { return evaluate(g, {MeasureId::hp_norm, p, 1.0, {}}); }

double evaluate_nonzero(std::span<const double> x, const MeasureDescriptor& m) {
  m.validate();
  switch (m.id) {
    case MeasureId::zeta_measure:
      if (std::isinf(m.p)) return m.k / min_value(x);
      return m.k * std::pow(power_sum(x, m.p), 1.0 / m.p);
    case MeasureId::hp_norm:
      if (std::isinf(m.p)) return 1.0 / min_value(x);
      return std::pow(hp_constant(m.p) * power_sum(x, m.p - 1.0), 1.0 / m.p);
    case MeasureId::h2: {
      double s = 0.0;
      for (double v : x) s += 0.5 / v;
      return std::sqrt(s);
    }
    case MeasureId::hinf:
    case MeasureId::convergence_time: return 1.0 / min_value(x);
    case MeasureId::energy1: {
      double s = 0.0;
      for (double v : x) s += 0.5 / v;
      return s;
    }
    case MeasureId::energy2: {
      double s = 0.0;
      for (double v : x) s += 0.5 / (v * v);
      return s;
    }
    case MeasureId::entropy: {
      double s = 0.0;
      for (double v : x) s -= std::log(v);
      return s;
    }
    case MeasureId::schur_sum: {
      const ScalarFunction f = FunctionRegistry::global().make(m.f_id);
      double s = 0.0;
      for (double v : x) s += f.value(v);
      return s;
    }
    case MeasureId::local_error: break;
  }
  throw Error(ErrorKind::domain, "local_error is not a function of the Laplacian spectrum");
}

double evaluate_spectrum(std::span<const double> laplacian_values, const MeasureDescriptor& m) {
  return evaluate_nonzero(nonzero_part(laplacian_values), m);
}

std::vector<double> spectral_gradient(std::span<const double> laplacian_values, const MeasureDescriptor& m) {
  m.validate();
  const auto x = nonzero_part(laplacian_values);
  std::vector<double> grad(laplacian_values.size(), 0.0);
  auto fill = [&](auto&& derivative) {
    for (std::size_t i = 0; i < x.size(); ++i) grad[i + 1] = derivative(x[i]);
  };
  switch (m.id) {
    case MeasureId::zeta_measure:
      if (std::isinf(m.p)) break;
      {
        const double z = power_sum(x, m.p);
        const double outer = m.k * std::pow(z, 1.0 / m.p - 1.0);
        fill([&](double v) { return -outer * std::pow(v, -m.p - 1.0); });
      }
      return grad;
    case MeasureId::hp_norm:
      if (std::isinf(m.p)) break;
      {
        const double c = hp_constant(m.p);
        const double q = m.p - 1.0;
        const double inner = c * power_sum(x, q);
        const double outer = std::pow(inner, 1.0 / m.p - 1.0) / m.p * c;
        fill([&](double v) { return -outer * q * std::pow(v, -q - 1.0); });
      }
      return grad;
    case MeasureId::h2: {
      const double rho = evaluate_nonzero(x, m);
      fill([&](double v) { return -0.25 / (rho * v * v); });
      return grad;
    }
    case MeasureId::energy1: fill([](double v) { return -0.5 / (v * v); }); return grad;
    case MeasureId::energy2: fill([](double v) { return -1.0 / (v * v * v); }); return grad;
    case MeasureId::entropy: fill([](double v) { return -1.0 / v; }); return grad;
    case MeasureId::schur_sum: {
      const ScalarFunction f = FunctionRegistry::global().make(m.f_id);
      fill(f.derivative);
      return grad;
    }
    case MeasureId::hinf:
    case MeasureId::convergence_time: break;
    case MeasureId::local_error:
      throw Error(ErrorKind::domain, "local_error is not a function of the Laplacian spectrum");
  }
  throw Error(ErrorKind::domain, m.describe() + " depends on lambda_2 alone and is not differentiable in general");
}

double local_error(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorKind::connectivity, "graph is disconnected");
  double s = 0.0;
  for (double d : g.degrees()) s += 1.0 / d;
  return 0.5 * s;
}

double evaluate(const WeightedGraph& g, const MeasureDescriptor& m) {
  m.validate();
  if (m.id == MeasureId::local_error) return local_error(g);
  return evaluate_spectrum(laplacian_spectrum(g).values, m);
}

// ---------------------------------------------------------------------------
// Frequency-domain oracle

std::vector<double> TransferModel::singular_values(double omega) const {
  std::vector<double> sigma(spectrum_.size(), 0.0);
  for (std::size_t i = 1; i < sigma.size(); ++i) sigma[i] = 1.0 / std::hypot(omega, spectrum_.values[i]);
  return sigma;
}

double TransferModel::schatten_pow(double omega, double p) const {
  double s = 0.0;
  for (double sigma : singular_values(omega)) s += std::pow(sigma, p);
  return s;
}

double hp_norm_numeric(const WeightedGraph& g, double p, const QuadratureSettings& quad) {
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorKind::domain, "hp_norm_numeric needs 1 < p < inf");
  const TransferModel model(g);
  // w = tan(theta) on (0, pi/2); the integrand is even in w.
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    return model.schatten_pow(std::tan(theta), p) / (c * c);
  };
  const QuadratureResult r = integrate(integrand, 0.0, 0.5 * std::numbers::pi, quad);
  return std::pow(r.value / std::numbers::pi, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Entropy through spanning trees

double entropy_via_trees(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorKind::connectivity, "graph is disconnected");
  return -(std::log(static_cast<double>(g.node_count())) + log_spanning_tree_count(g));
}

double entropy_log_n_over_tau(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorKind::connectivity, "graph is disconnected");
  return std::log(static_cast<double>(g.node_count())) - log_spanning_tree_count(g);
}

std::string entropy_deviation_notice() {
  return "entropy closed form log(n/tau) disagrees with -sum_{i>=2} log(lambda_i) = -log(n*tau) "
         "(matrix-tree theorem); e.g. unit K_3: -log 9 = -2.1972245773362196 vs log(3/3) = 0. "
         "Reported entropy values use -log(n*tau).";
}

}  // namespace systemic
