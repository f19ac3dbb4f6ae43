#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "liftmix/io.hpp"
#include "liftmix/liftmix.hpp"
#include "liftmix/suites.hpp"

using namespace liftmix;
using io::json;

namespace {

enum Exit { kOk = 0, kNumeric = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(out_path, text);
  }
}

void emit_json(const json& j, const std::string& out_path) { emit(j.dump(2) + "\n", out_path); }

Graph load_graph(const std::string& path) {
  if (path.empty()) throw UsageError("--graph is required");
  return io::graph_from_json(io::read_json_file(path));
}

/// "uniform" or a distribution file.
Distribution load_pi(const std::string& spec, std::size_t n) {
  if (spec.empty() || spec == "uniform") return Distribution::uniform(n);
  Distribution d = io::distribution_from_json(io::read_json_file(spec));
  if (d.size() != n) throw UsageError("distribution in " + spec + " has " + std::to_string(d.size()) + " entries, expected " + std::to_string(n));
  return d;
}

/// "metropolis" (lazy Metropolis chain towards pi) or a matrix file.
StochasticMatrix load_reference(const std::string& spec, const Graph& g, const Distribution& pi) {
  if (spec == "metropolis") return metropolis_chain(g, pi);
  return StochasticMatrix(io::matrix_from_json(io::read_json_file(spec)), std::make_shared<const Graph>(g));
}

/// "node:K" for a point mass, "uniform", or a distribution file.
Distribution load_endpoint(const std::string& spec, std::size_t n) {
  if (spec.rfind("node:", 0) == 0) {
    std::size_t k = 0;
    try {
      k = std::stoul(spec.substr(5));
    } catch (const std::exception&) {
      throw UsageError("bad node spec '" + spec + "'");
    }
    return Distribution::point(n, k);
  }
  return load_pi(spec, n);
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// -- graph ------------------------------------------------------------------------------

int graph_stats(const std::string& file, const std::string& out) {
  const Graph g = load_graph(file);
  const bool connected = is_strongly_connected(g);
  json j = {{"n", g.size()}, {"arcs", g.arcs().size()}, {"strongly_connected", connected}};
  j["diameter"] = connected ? json(diameter(g)) : json(nullptr);
  emit_json(j, out);
  return kOk;
}

// -- conductance ---------------------------------------------------------------------------

int conductance_chain(const std::string& chain_file, const std::string& graph_file, const std::string& pi_spec,
                      const std::string& out) {
  if (chain_file.empty()) throw UsageError("--chain is required");
  Matrix M = io::matrix_from_json(io::read_json_file(chain_file));
  std::shared_ptr<const Graph> g;
  if (!graph_file.empty()) g = std::make_shared<const Graph>(load_graph(graph_file));
  const StochasticMatrix P(std::move(M), g);
  const Distribution pi = pi_spec == "stationary" ? stationary(P) : load_pi(pi_spec, P.size());
  const auto res = phi_chain(P, pi);
  emit_json({{"phi", res.phi}, {"argmin_cut", res.argmin.members()}}, out);
  return kOk;
}

int conductance_graph(const std::string& graph_file, const std::string& pi_spec, const std::string& out) {
  const Graph g = load_graph(graph_file);
  const Distribution pi = load_pi(pi_spec, g.size());
  const auto res = phi_graph(g, pi);
  emit_json({{"phi", res.phi},
             {"argmax_chain", io::to_json(res.chain)},
             {"lp_rounds", res.lp_rounds},
             {"active_cuts", res.active_cuts}},
            out);
  return kOk;
}

// -- bridge --------------------------------------------------------------------------------

int bridge(const std::string& graph_file, const std::string& src, const std::string& dst, const std::string& out) {
  const Graph g = load_graph(graph_file);
  const Distribution p_src = load_endpoint(src, g.size());
  const Distribution p_dst = load_endpoint(dst, g.size());
  const auto chain = stochastic_bridge(g, p_src, p_dst);
  const Vector end = chain.apply(p_src.vec(), chain.length());
  json j = io::to_json(chain);
  j["endpoint"] = io::to_json(end);
  j["endpoint_tv"] = tv_distance(end, p_dst.vec());
  emit_json(j, out);
  return kOk;
}

// -- lift build / analyze ------------------------------------------------------------------

struct BuildArgs {
  std::string construction;
  std::string variant = "reducible";
  double gamma = 1e-3;
  double delta = 0.05;
  std::string graph;
  std::string pi = "uniform";
  std::string ref_chain = "metropolis";
  std::string src = "node:0";
  std::size_t n = 16;
  double holding = 0.0;
  std::string out;
};

Lift build_lift(const BuildArgs& a) {
  const std::string& c = a.construction;
  if (c == "diaconis") return diaconis_cycle_lift(a.n, a.holding);
  if (c == "four-cycle") return four_cycle_lift(a.delta, a.gamma).lift;
  const Graph g = load_graph(a.graph);
  const Distribution pi = load_pi(a.pi, g.size());
  if (c == "clock" || c == "periodic-clock") {
    const auto chain = stochastic_bridge(g, load_endpoint(a.src, g.size()), pi);
    return c == "clock" ? clock_lift(g, chain) : periodic_clock_lift(g, chain);
  }
  if (c == "node-clock") return node_clock_lift(g, bridges_to(g, pi), pi);
  if (c == "periodic-node-clock") return periodic_node_clock_lift(g, bridges_to(g, pi));
  if (c == "diameter") {
    MixerParams mp;
    mp.gamma = a.gamma;
    MixerVariant v = MixerVariant::Reducible;
    if (a.variant == "flows") {
      v = MixerVariant::Flows;
    } else if (a.variant == "irreducible") {
      v = MixerVariant::Irreducible;
    } else if (a.variant != "reducible") {
      throw UsageError("unknown variant '" + a.variant + "'");
    }
    if (v != MixerVariant::Reducible) mp.reference = load_reference(a.ref_chain, g, pi);
    return diameter_mixer(g, pi, v, mp);
  }
  throw UsageError("unknown construction '" + c + "'");
}

int lift_build(const BuildArgs& a) {
  const Lift L = build_lift(a);
  emit_json(io::to_json(L), a.out);
  return kOk;
}

struct AnalyzeArgs {
  std::string lift;
  std::string scenario;
  std::string pi = "uniform";
  std::string ref_chain;
  std::vector<std::string> seeds;
  double eps = 0.25;
  std::optional<std::size_t> t_max;
  std::string out;
};

/// "F" (designed init applied to pi), "uniform" over lifted nodes, or a file.
Distribution load_seed(const std::string& spec, const Lift& L, const Distribution& pi) {
  if (spec == "F") {
    if (!L.F()) throw UsageError("stationary seed 'F' needs a lift with an init map");
    return Distribution(L.F()->apply(pi.vec()));
  }
  return load_pi(spec, L.lifted_n());
}

int lift_analyze(const AnalyzeArgs& a) {
  if (a.lift.empty()) throw UsageError("--lift is required");
  const Lift L = io::lift_from_json(io::read_json_file(a.lift));
  const Distribution pi = load_pi(a.pi, L.base_n());
  ScenarioSpec spec = ScenarioSpec::parse(a.scenario);
  if (spec.flows_constrained()) {
    if (a.ref_chain.empty()) throw UsageError("scenario " + spec.str() + " needs --ref-chain");
    spec.reference_chain = load_reference(a.ref_chain, L.base(), pi);
    if (a.seeds.empty() && !is_irreducible(L.A()))
      throw UsageError("reducible lift: state the stationary state with --stationary-seed");
  }
  ReportOptions opts;
  opts.eps = a.eps;
  opts.t_max = a.t_max;
  for (const auto& s : a.seeds) opts.stationary_seeds.push_back(load_seed(s, L, pi));
  const auto rep = scenario_report(L, spec, pi, opts);
  emit_json(io::to_json(rep), a.out);
  for (const auto& b : rep.bounds)
    if (!b.consistent) {
      std::cerr << "FAIL: bound " << b.name << " (measured " << csv_number(b.measured) << ", bound "
                << csv_number(b.bound) << ")\n";
      return kNumeric;
    }
  return kOk;
}

// -- verify --------------------------------------------------------------------------------

json suite_json(const suites::SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"check", c.name},
                      {"measured", io::number_json(c.measured)},
                      {"relation", c.relation},
                      {"bound", io::number_json(c.bound)},
                      {"pass", c.pass}});
  json tol = json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = v;
  return {{"version", io::kVersion}, {"suite", r.suite},     {"seed", r.seed}, {"scenario", r.scenario},
          {"tolerances", tol},       {"checks", checks}, {"pass", r.passed()}};
}

std::string suite_csv(const suites::SuiteReport& r) {
  std::string s = "check,measured,bound,pass\n";
  for (const auto& c : r.checks)
    s += c.name + "," + csv_number(c.measured) + "," + csv_number(c.bound) + "," + (c.pass ? "true" : "false") + "\n";
  return s;
}

int verify(const std::string& suite, std::uint64_t seed, bool csv, const std::string& out) {
  bool known = false;
  for (const auto& [name, fn] : suites::registry()) known = known || name == suite;
  if (!known) throw UsageError("unknown suite '" + suite + "'");
  const auto r = suites::run(suite, seed);
  emit(csv ? suite_csv(r) : suite_json(r).dump(2) + "\n", out);
  if (const auto* f = r.first_failure()) {
    std::cerr << "FAIL: " << f->name << " (measured " << csv_number(f->measured) << " " << f->relation << " "
              << csv_number(f->bound) << ")\n";
    return kNumeric;
  }
  return kOk;
}

bool is_usage(ErrorCode c) {
  return c == ErrorCode::ParseError || c == ErrorCode::BadScenario || c == ErrorCode::MissingReferenceChain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted Markov chain construction and analysis", "liftmix"};
  app.set_version_flag("--version", io::kVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  auto* graph = app.add_subcommand("graph", "graph utilities")->require_subcommand(1);
  std::string stats_file, stats_out;
  auto* stats = graph->add_subcommand("stats", "node count, arc count, diameter");
  stats->add_option("file", stats_file, "graph JSON")->required();
  stats->add_option("--out", stats_out, "output file");
  stats->callback([&] { action = [&] { return graph_stats(stats_file, stats_out); }; });

  auto* cond = app.add_subcommand("conductance", "chain or graph conductance")->require_subcommand(1);
  std::string cc_chain, cc_graph, cc_pi = "stationary", cc_out;
  auto* cchain = cond->add_subcommand("chain", "Phi(P) by cut enumeration");
  cchain->add_option("--chain", cc_chain, "matrix JSON")->required();
  cchain->add_option("--graph", cc_graph, "locality graph JSON");
  cchain->add_option("--pi", cc_pi, "distribution JSON, 'uniform' or 'stationary'");
  cchain->add_option("--out", cc_out, "output file");
  cchain->callback([&] { action = [&] { return conductance_chain(cc_chain, cc_graph, cc_pi, cc_out); }; });
  std::string cg_graph, cg_pi = "uniform", cg_out;
  auto* cgraph = cond->add_subcommand("graph", "largest Phi(P) over chains on the graph");
  cgraph->add_option("--graph", cg_graph, "graph JSON")->required();
  cgraph->add_option("--pi", cg_pi, "distribution JSON or 'uniform'");
  cgraph->add_option("--out", cg_out, "output file");
  cgraph->callback([&] { action = [&] { return conductance_graph(cg_graph, cg_pi, cg_out); }; });

  std::string br_graph, br_src = "node:0", br_dst = "uniform", br_out;
  auto* br = app.add_subcommand("bridge", "stochastic bridge of length D");
  br->add_option("--graph", br_graph, "graph JSON")->required();
  br->add_option("--src", br_src, "source: node:K, 'uniform' or distribution JSON");
  br->add_option("--dst", br_dst, "target: node:K, 'uniform' or distribution JSON");
  br->add_option("--out", br_out, "output file");
  br->callback([&] { action = [&] { return bridge(br_graph, br_src, br_dst, br_out); }; });

  auto* lift = app.add_subcommand("lift", "build or analyze lifts")->require_subcommand(1);
  BuildArgs ba;
  auto* build = lift->add_subcommand("build", "construct a lift bundle");
  build->add_option("--construction", ba.construction, "construction")
      ->required()
      ->check(CLI::IsMember(
          {"clock", "periodic-clock", "node-clock", "periodic-node-clock", "diameter", "diaconis", "four-cycle"}));
  build->add_option("--variant", ba.variant, "diameter mixer variant")
      ->check(CLI::IsMember({"reducible", "flows", "irreducible"}));
  build->add_option("--gamma", ba.gamma, "gamma");
  build->add_option("--delta", ba.delta, "four-cycle delta");
  build->add_option("--graph", ba.graph, "graph JSON");
  build->add_option("--pi", ba.pi, "distribution JSON or 'uniform'");
  build->add_option("--ref-chain", ba.ref_chain, "matrix JSON or 'metropolis'");
  build->add_option("--src", ba.src, "clock lifts: bridge source");
  build->add_option("--n", ba.n, "diaconis cycle length");
  build->add_option("--holding", ba.holding, "diaconis holding probability");
  build->add_option("--out", ba.out, "bundle file");
  build->callback([&] { action = [&] { return lift_build(ba); }; });

  AnalyzeArgs aa;
  std::size_t t_max = 0;
  auto* analyze = lift->add_subcommand("analyze", "scenario report for a lift bundle");
  analyze->add_option("--lift", aa.lift, "bundle JSON")->required();
  analyze->add_option("--scenario", aa.scenario, "scenario string, e.g. sImre or SIre:0.001")->required();
  analyze->add_option("--pi", aa.pi, "distribution JSON or 'uniform'");
  analyze->add_option("--ref-chain", aa.ref_chain, "matrix JSON or 'metropolis'");
  analyze->add_option("--stationary-seed", aa.seeds, "F, 'uniform' or distribution JSON over lifted nodes");
  analyze->add_option("--eps", aa.eps, "TV threshold");
  analyze->add_option("--t-max", t_max, "horizon");
  analyze->add_option("--out", aa.out, "output file");
  analyze->callback([&] {
    if (t_max > 0) aa.t_max = t_max;
    action = [&] { return lift_analyze(aa); };
  });

  std::string suite, v_out;
  std::uint64_t seed = 0;
  bool csv = false;
  auto* ver = app.add_subcommand("verify", "run a named verification suite");
  ver->add_option("--suite", suite, "suite name")->required();
  ver->add_option("--seed", seed, "RNG seed");
  ver->add_flag("--csv", csv, "CSV instead of JSON");
  ver->add_option("--out", v_out, "output file");
  ver->callback([&] { action = [&] { return verify(suite, seed, csv, v_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_usage(e.code()) ? kUsage : kNumeric;
  } catch (const io::json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << "\n";
    return kUsage;
  }
}
