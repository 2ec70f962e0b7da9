// SPDX-License-Identifier: Apache-2.0
#include "systemic/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "systemic/design.hpp"
#include "systemic/error.hpp"
#include "systemic/properties.hpp"
#include "systemic/random.hpp"
#include "systemic/sim.hpp"

namespace systemic::cli {

namespace {

using nlohmann::json;

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json edges_json(std::span<const Edge> edges) {
  json out = json::array();
  for (const auto& e : edges) out.push_back({{"u", e.u}, {"v", e.v}, {"w", number(e.w)}});
  return out;
}

json pairs_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  json out = json::array();
  for (auto [u, v] : pairs) out.push_back({u, v});
  return out;
}

double parse_real(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorKind::input, std::string(flag) + " expects a number, got '" + text + "'");
  return value;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json classification_json(const MeasureDescriptor& m) {
  const auto c = classify(m);
  return {{"schur_convex", c.schur_convex}, {"convex", c.convex}, {"homogeneous", c.homogeneous}, {"spectral", c.spectral}};
}

/// Shared state for one invocation.
struct Invocation {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  json warnings = json::array();
  int exit_code = ok;
  /// Raw text output replacing the JSON report.
  std::optional<std::string> raw;
};

struct MeasureArgs {
  std::string id;
  std::string p;
  double k = 1.0;
  std::string f;

  void attach(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--measure", id, "measure id")->check(CLI::IsMember(
        std::vector<std::string>{"zeta_measure", "hp_norm", "h2", "hinf", "energy1", "energy2", "convergence_time",
                                 "local_error", "entropy", "schur_sum"}));
    if (required) opt->required();
    app->add_option("--p", p, "exponent (zeta_measure, hp_norm); 'inf' allowed");
    app->add_option("--k", k, "scale (zeta_measure)");
    app->add_option("--f", f, "function id (schur_sum)");
  }
  MeasureDescriptor descriptor() const {
    const MeasureId mid = parse_measure_id(id);
    const double exponent = !p.empty() ? parse_real(p, "--p") : mid == MeasureId::hp_norm ? 2.0 : 1.0;
    MeasureDescriptor m{mid, exponent, k, f};
    m.validate();
    return m;
  }
  void echo(json& inputs, const MeasureDescriptor& m) const {
    inputs["measure"] = id;
    inputs["measure_description"] = m.describe();
    if (m.id == MeasureId::zeta_measure || m.id == MeasureId::hp_norm) inputs["p"] = number(m.p);
    if (m.id == MeasureId::zeta_measure) inputs["k"] = m.k;
    if (m.id == MeasureId::schur_sum) inputs["f"] = f;
  }
};

void add_entropy_warning(Invocation& inv, const MeasureDescriptor& m) {
  if (m.id == MeasureId::entropy) inv.warnings.push_back(entropy_deviation_notice());
}

json property_report_json(const PropertyReport& r) {
  json violations = json::array();
  const std::size_t shown = std::min<std::size_t>(r.violations.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& v = r.violations[i];
    violations.push_back(
        {{"trial", v.trial}, {"input", v.input}, {"lhs", number(v.lhs)}, {"rhs", number(v.rhs)}, {"margin", number(v.margin)}});
  }
  return {{"property", to_string(r.property)},
          {"measure", r.measure},
          {"trials", r.trials},
          {"comparisons", r.comparisons},
          {"skipped", r.skipped},
          {"violation_count", r.violations.size()},
          {"violations", violations},
          {"seed", r.seed},
          {"tol", r.tol},
          {"passed", r.passed()}};
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numerical:
    case ErrorKind::solver: return numerical_failure;
    default: return input_error;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App app{"Spectral robustness measures for weighted consensus networks", "systemic"};
  app.require_subcommand(1);
  app.fallthrough();
  bool reproducible = false;
  app.add_flag("--reproducible", reproducible, "report timing as 0 so output is byte-identical across runs");

  Invocation inv;
  std::string graph_path;
  MeasureArgs measure_args;

  // measure
  auto* measure = app.add_subcommand("measure", "evaluate a catalog measure on a graph");
  measure->add_option("--graph", graph_path, "edge-list file")->required();
  measure_args.attach(measure);

  // zeta
  auto* zeta_cmd = app.add_subcommand("zeta", "spectral zeta function sum lambda_i^-p");
  std::string zeta_p = "1";
  zeta_cmd->add_option("--graph", graph_path, "edge-list file")->required();
  zeta_cmd->add_option("--p", zeta_p, "exponent")->required();

  // hpnorm
  auto* hp = app.add_subcommand("hpnorm", "H_p norm, closed form and optionally by quadrature");
  std::string hp_p = "2";
  bool numeric = false;
  double quad_tol = 1e-10;
  hp->add_option("--graph", graph_path, "edge-list file")->required();
  hp->add_option("--p", hp_p, "exponent > 1, or 'inf'")->required();
  hp->add_flag("--numeric", numeric, "also integrate the frequency response");
  hp->add_option("--tol", quad_tol, "relative quadrature tolerance");

  // trees
  auto* trees = app.add_subcommand("trees", "spanning-tree count and entropy cross-check");
  trees->add_option("--graph", graph_path, "edge-list file")->required();

  // props
  auto* props = app.add_subcommand("props", "falsification search for measure axioms");
  measure_args.attach(props);
  std::string property = "required";
  PropertyOptions popts;
  std::string sampler = "haar";
  props->add_option("--property", property, "property id, or 'required' for the measure's full suite")
      ->check(CLI::IsMember(std::vector<std::string>{"homogeneity", "monotonicity", "convexity", "subadditivity",
                                                     "orthogonal", "schur", "required"}));
  props->add_option("--trials", popts.trials, "random trials per property");
  props->add_option("--seed", popts.seed, "base seed");
  props->add_option("--tol", popts.tol, "breach tolerance");
  props->add_option("--n-min", popts.n_min, "smallest random graph");
  props->add_option("--n-max", popts.n_max, "largest random graph");
  props->add_option("--sampler", sampler, "orthogonal sampler")
      ->check(CLI::IsMember(std::vector<std::string>{"haar", "permutation", "identity"}));

  // optimize-weights
  auto* opt = app.add_subcommand("optimize-weights", "edge weights on the unit simplex minimizing a measure");
  std::string topology_path;
  SolverOptions sopts;
  opt->add_option("--topology", topology_path, "edge-list file; weights are ignored")->required();
  measure_args.attach(opt);
  opt->add_option("--tol", sopts.tol, "stationarity tolerance");
  opt->add_option("--max-iters", sopts.max_iters, "iteration cap");

  // rewire
  auto* rewire = app.add_subcommand("rewire", "rank every connected graph with n nodes and m edges");
  std::size_t rn = 0, rm = 0;
  double alpha = 1.0;
  std::size_t top = 0;
  rewire->add_option("--n", rn, "node count (at most 8)")->required();
  rewire->add_option("--m", rm, "edge count")->required();
  rewire->add_option("--alpha", alpha, "total weight, split equally")->required();
  rewire->add_option("--top", top, "only list this many classes (0 = all)");
  measure_args.attach(rewire);

  // augment
  auto* augment = app.add_subcommand("augment", "add up to k candidate edges and certify the limit");
  std::size_t k = 1;
  std::string candidates_path, f_id = "inverse", strategy = "greedy";
  augment->add_option("--graph", graph_path, "edge-list file")->required();
  augment->add_option("--k", k, "edge budget")->required();
  augment->add_option("--candidates", candidates_path, "candidate file: `u v w1 [w2 ...]` per line")->required();
  augment->add_option("--f", f_id, "decreasing convex function id vanishing at infinity");
  augment->add_option("--strategy", strategy, "greedy or exhaustive")
      ->check(CLI::IsMember(std::vector<std::string>{"greedy", "exhaustive"}));

  // simulate-h2
  auto* sim = app.add_subcommand("simulate-h2", "Euler-Maruyama estimate of the squared H_2 norm");
  SimConfig scfg;
  double noise_dt = 0.0;
  sim->add_option("--graph", graph_path, "edge-list file")->required();
  sim->add_option("--dt", scfg.dt, "step");
  sim->add_option("--horizon", scfg.horizon, "simulated time per trial");
  sim->add_option("--burn-in", scfg.burn_in, "discarded initial time");
  sim->add_option("--trials", scfg.trials, "independent trials");
  sim->add_option("--seed", scfg.seed, "noise seed");
  sim->add_option("--noise-dt", noise_dt, "Brownian path resolution (dt must be a multiple)");

  // validate
  auto* validate = app.add_subcommand("validate", "parse and audit a graph file");
  validate->add_option("--graph", graph_path, "edge-list file")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "CSV of a measure over a family of graphs");
  std::string family = "cycle";
  std::size_t n_min = 3, n_max = 12;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--family", family, "complete, cycle, path, star or erdos_renyi")->required();
  sweep->add_option("--n-min", n_min, "first size");
  sweep->add_option("--n-max", n_max, "last size");
  sweep->add_option("--seed", sweep_seed, "seed for erdos_renyi");
  measure_args.attach(sweep);

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated graph as an edge list");
  std::size_t gen_n = 4;
  std::uint64_t gen_seed = 0;
  double edge_probability = 0.5;
  gen->add_option("--family", family, "complete, cycle, path, star or erdos_renyi")->required();
  gen->add_option("--n", gen_n, "node count")->required();
  gen->add_option("--seed", gen_seed, "seed for erdos_renyi");
  gen->add_option("--edge-probability", edge_probability, "erdos_renyi edge probability");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return input_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  inv.command = chosen->get_name();
  try {
    if (chosen == measure) {
      const auto g = read_graph_file(graph_path);
      const auto m = measure_args.descriptor();
      inv.inputs["graph"] = graph_path;
      measure_args.echo(inv.inputs, m);
      inv.results["value"] = number(evaluate(g, m));
      inv.results["classification"] = classification_json(m);
      add_entropy_warning(inv, m);
    } else if (chosen == zeta_cmd) {
      const auto g = read_graph_file(graph_path);
      const double p = parse_real(zeta_p, "--p");
      inv.inputs = {{"graph", graph_path}, {"p", number(p)}};
      inv.results["zeta"] = number(zeta(g, p));
    } else if (chosen == hp) {
      const auto g = read_graph_file(graph_path);
      const double p = parse_real(hp_p, "--p");
      inv.inputs = {{"graph", graph_path}, {"p", number(p)}, {"numeric", numeric}};
      const double closed = hp_norm(g, p);
      inv.results["closed_form"] = number(closed);
      if (numeric) {
        if (std::isinf(p)) throw Error(ErrorKind::domain, "--numeric needs a finite p");
        inv.inputs["tol"] = quad_tol;
        QuadratureSettings q;
        q.rel_tol = quad_tol;
        const double num = hp_norm_numeric(g, p, q);
        inv.results["numeric"] = number(num);
        inv.results["difference"] = number(closed - num);
        inv.results["relative_difference"] = number(std::abs(closed - num) / std::abs(closed));
      }
    } else if (chosen == trees) {
      const auto g = read_graph_file(graph_path);
      inv.inputs["graph"] = graph_path;
      const double tau = spanning_tree_count(g);
      const MeasureDescriptor ent{MeasureId::entropy, 1.0, 1.0, {}};
      const double spectral = evaluate(g, ent);
      const double via_trees = entropy_via_trees(g);
      inv.results["n"] = g.node_count();
      inv.results["tau"] = number(tau);
      inv.results["log_tau"] = number(log_spanning_tree_count(g));
      inv.results["entropy_spectral"] = number(spectral);
      inv.results["entropy_matrix_tree"] = number(via_trees);
      inv.results["entropy_log_n_over_tau"] = number(entropy_log_n_over_tau(g));
      inv.results["relative_difference"] = number(std::abs(spectral - via_trees) / std::max(1.0, std::abs(spectral)));
      inv.warnings.push_back(entropy_deviation_notice());
    } else if (chosen == props) {
      const auto m = measure_args.descriptor();
      measure_args.echo(inv.inputs, m);
      popts.sampler = sampler == "haar"           ? OrthogonalSampler::haar
                      : sampler == "permutation" ? OrthogonalSampler::permutation
                                                 : OrthogonalSampler::identity;
      inv.inputs.update({{"property", property},
                         {"trials", popts.trials},
                         {"seed", popts.seed},
                         {"tol", popts.tol},
                         {"n_min", popts.n_min},
                         {"n_max", popts.n_max},
                         {"sampler", sampler}});
      if (popts.n_min < 3 || popts.n_max < popts.n_min) throw Error(ErrorKind::input, "need 3 <= n-min <= n-max");
      std::vector<PropertyId> ids =
          property == "required" ? required_properties(m) : std::vector<PropertyId>{parse_property_id(property)};
      json reports = json::array();
      bool passed = true;
      for (auto id : ids) {
        const auto report = check_property(id, m, popts);
        passed = passed && report.passed();
        reports.push_back(property_report_json(report));
      }
      inv.results["passed"] = passed;
      inv.results["reports"] = reports;
      if (!passed) inv.exit_code = finding;
      add_entropy_warning(inv, m);
    } else if (chosen == opt) {
      const auto topo = Topology::of(read_graph_file(topology_path));
      const auto m = measure_args.descriptor();
      inv.inputs = {{"topology", topology_path}, {"tol", sopts.tol}, {"max_iters", sopts.max_iters}};
      measure_args.echo(inv.inputs, m);
      const auto r = optimize_weights(topo, m, sopts);
      const std::vector<double> uniform(topo.edge_count(), 1.0 / static_cast<double>(topo.edge_count()));
      json weights = json::array();
      for (std::size_t e = 0; e < topo.edge_count(); ++e)
        weights.push_back({{"u", topo.edges()[e].first}, {"v", topo.edges()[e].second}, {"w", r.weights[e]}});
      inv.results = {{"weights", weights},
                     {"objective", number(r.objective)},
                     {"uniform_objective", number(evaluate(topo.realize(uniform), m))},
                     {"iterations", r.iterations},
                     {"stationarity_residual", number(r.stationarity_residual)},
                     {"active_set", r.active_set},
                     {"converged", r.converged},
                     {"accepted_steps", r.history.size() - 1}};
      if (!r.converged)
        inv.warnings.push_back("solver stopped before the stationarity tolerance was met; the objective is the best "
                               "iterate found");
      add_entropy_warning(inv, m);
    } else if (chosen == rewire) {
      const auto m = measure_args.descriptor();
      inv.inputs = {{"n", rn}, {"m", rm}, {"alpha", alpha}, {"top", top}};
      measure_args.echo(inv.inputs, m);
      const auto r = rewire_bruteforce(rn, rm, alpha, m);
      json ranking = json::array();
      for (std::size_t i = 0; i < r.ranking.size() && (top == 0 || i < top); ++i) {
        const auto& c = r.ranking[i];
        ranking.push_back({{"canonical_edges", pairs_json(c.canonical_edges)},
                           {"value", number(c.value)},
                           {"labelings", c.labelings}});
      }
      inv.results = {{"best", {{"n", rn}, {"edges", edges_json(r.best.edges())}}},
                     {"value", number(r.value)},
                     {"classes", r.ranking.size()},
                     {"labeled_graphs", r.labeled_graphs},
                     {"ranking", ranking}};
      add_entropy_warning(inv, m);
    } else if (chosen == augment) {
      const auto g = read_graph_file(graph_path);
      const auto cands = parse_candidates(read_text(candidates_path));
      inv.inputs = {{"graph", graph_path}, {"k", k}, {"candidates", candidates_path}, {"f", f_id}, {"strategy", strategy}};
      const auto r = greedy_augment(g, k, cands, f_id,
                                    strategy == "exhaustive" ? AugmentStrategy::exhaustive : AugmentStrategy::greedy);
      inv.results = {{"added", edges_json(r.added)}, {"initial", number(r.initial)}, {"achieved", number(r.achieved)},
                     {"bound", number(r.bound)},    {"gap", number(r.gap)},         {"skipped", r.skipped},
                     {"bound_respected", r.gap >= -1e-9}};
      for (const auto& s : r.skipped) inv.warnings.push_back("candidate skipped: " + s);
      if (r.gap < -1e-9) inv.exit_code = finding;
    } else if (chosen == sim) {
      const auto g = read_graph_file(graph_path);
      if (noise_dt > 0.0) scfg.noise_dt = noise_dt;
      inv.inputs = {{"graph", graph_path}, {"dt", scfg.dt},     {"horizon", scfg.horizon}, {"burn_in", scfg.burn_in},
                    {"trials", scfg.trials}, {"seed", scfg.seed}, {"noise_dt", scfg.noise_dt.value_or(scfg.dt)}};
      const auto r = estimate_h2(g, scfg);
      const double z = r.standard_error > 0 ? (r.estimate - r.closed_form) / r.standard_error : 0.0;
      inv.results = {{"estimate", number(r.estimate)},
                     {"standard_error", number(r.standard_error)},
                     {"closed_form", number(r.closed_form)},
                     {"z_score", number(z)},
                     {"within_3_standard_errors", std::abs(r.estimate - r.closed_form) <= 3 * r.standard_error},
                     {"recommended_burn_in", number(r.recommended_burn_in)}};
      if (!r.burn_in_adequate)
        inv.warnings.push_back("burn_in is shorter than 5 / lambda_2; early transients may bias the estimate");
    } else if (chosen == validate) {
      inv.inputs["graph"] = graph_path;
      const auto g = read_graph_file(graph_path);
      const bool connected = is_connected(g);
      const Matrix l = laplacian(g);
      double row_sum = 0.0;
      for (std::size_t i = 0; i < l.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < l.cols(); ++j) s += l(i, j);
        row_sum = std::max(row_sum, std::abs(s));
      }
      inv.results = {{"nodes", g.node_count()},
                     {"edges", g.edge_count()},
                     {"total_weight", number(g.total_weight())},
                     {"connected", connected},
                     {"laplacian_asymmetry", number(relative_asymmetry(l))},
                     {"laplacian_max_row_sum", number(row_sum)}};
      if (connected) {
        const auto s = laplacian_spectrum(g);
        inv.results["lambda2"] = number(s.values[1]);
        inv.results["lambda_max"] = number(s.lambda_max());
        inv.results["eigen_residual"] = number(s.residual);
        inv.results["log_tau"] = number(log_spanning_tree_count(g));
      } else {
        inv.warnings.push_back("graph is disconnected; measures are undefined");
        inv.exit_code = finding;
      }
      inv.results["valid"] = connected;
    } else if (chosen == sweep) {
      const auto m = measure_args.descriptor();
      const Family fam = parse_family(family);
      if (n_min < 2 || n_max < n_min) throw Error(ErrorKind::input, "need 2 <= n-min <= n-max");
      std::ostringstream csv;
      csv << "family,n,value\n";
      for (std::size_t n = n_min; n <= n_max; ++n) {
        std::array<char, 32> buf{};
        const double value = evaluate(generate(fam, n, {}, derive_seed(sweep_seed, n)), m);
        const auto end = std::to_chars(buf.data(), buf.data() + buf.size(), value).ptr;
        csv << family << ',' << n << ',' << std::string_view(buf.data(), end - buf.data()) << '\n';
      }
      inv.raw = csv.str();
    } else if (chosen == gen) {
      GeneratorParams params;
      params.edge_probability = edge_probability;
      inv.raw = serialize_graph(generate(parse_family(family), gen_n, params, gen_seed));
    }
  } catch (const Error& e) {
    json error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) error["line"] = pe->line();
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (inv.raw) inv.raw.reset();
    inv.results = json::object();
    inv.results["error"] = error;
    inv.exit_code = exit_for(e.kind());
    if (chosen == sweep || chosen == gen) return inv.exit_code;
  }

  if (inv.raw) {
    out << *inv.raw;
    return inv.exit_code;
  }
  const double elapsed =
      reproducible ? 0.0 : std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const json report = {{"schema_version", kSchemaVersion}, {"command", inv.command}, {"inputs", inv.inputs},
                       {"results", inv.results},           {"warnings", inv.warnings}, {"timing", elapsed}};
  out << report.dump(2) << '\n';
  return inv.exit_code;
}

}  // namespace systemic::cli
