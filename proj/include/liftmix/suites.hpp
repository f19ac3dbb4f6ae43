#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "liftmix/conductance.hpp"
#include "liftmix/constructions.hpp"
#include "liftmix/graph.hpp"
#include "liftmix/lift.hpp"
#include "liftmix/markov.hpp"
#include "liftmix/random.hpp"
#include "liftmix/scenario.hpp"

namespace liftmix::suites {

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "==", "in"
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::string scenario;
  std::map<std::string, double> tolerances;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }

  void le(std::string name, double measured, double bound) {
    checks.push_back({std::move(name), measured, bound, "<=", measured <= bound});
  }
  void ge(std::string name, double measured, double bound) {
    checks.push_back({std::move(name), measured, bound, ">=", measured >= bound});
  }
  void eq(std::string name, double measured, double expected) {
    checks.push_back({std::move(name), measured, expected, "==", measured == expected});
  }
  void truth(std::string name, bool ok) { checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok}); }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double steps_or_inf(const MixTime& t) { return t ? static_cast<double>(*t) : kInf; }

// Fixed family of random test graphs shared by the mixer and bridge suites.
inline Graph suite_graph(Rng& rng, std::size_t lo, std::size_t hi) {
  const auto n = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
  return random_connected_graph(n, 0.25, rng);
}

// -- cut leakage ------------------------------------------------------------------------

inline SuiteReport lemma1(std::uint64_t seed) {
  SuiteReport r{"lemma1", seed, "", {{"slack", kLeakageSlack}}, {}};
  Rng rng(seed, "lemma1");
  std::size_t violations = 0;
  double worst_excess = -kInf;
  double t1_gap = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Graph g = suite_graph(rng, 2, 8);
    const StochasticMatrix P = random_chain(g, rng);
    const Distribution pi = stationary(P);
    const std::size_t n = g.size();
    std::vector<Node> members;
    while (members.empty() || members.size() == n) {
      members.clear();
      for (Node k = 0; k < n; ++k)
        if (rng.bernoulli(0.5)) members.push_back(k);
    }
    const Cut X = Cut::of(members, pi);
    const auto t = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const auto res = leakage_check(P, pi, X, t);
    if (!res.ok) ++violations;
    worst_excess = std::max(worst_excess, res.leakage - res.bound);
    const auto one = leakage_check(P, pi, X, 1);
    t1_gap = std::max(t1_gap, std::abs(one.leakage - one.bound));
  }
  r.eq("violations", static_cast<double>(violations), 0.0);
  r.le("max_leakage_minus_bound", worst_excess, kLeakageSlack);
  r.le("t1_leakage_equals_phi_X", t1_gap, 1e-12);
  return r;
}

// -- invariance -------------------------------------------------------------------------

inline SuiteReport thm1(std::uint64_t seed) {
  SuiteReport r{"thm1", seed, "sImRE", {{"trajectory_tv", 1e-9}}, {}};
  Rng rng(seed, "thm1");
  struct Case {
    std::string name;
    StochasticMatrix P;
    std::size_t copies;
  };
  std::vector<Case> cases;
  cases.push_back({"lazy_cycle8_k2", metropolis_chain(cycle_graph(8), Distribution::uniform(8)), 2});
  {
    const Graph g = suite_graph(rng, 4, 8);
    cases.push_back({"random_chain_k3", random_chain(g, rng), 3});
  }
  for (const auto& c : cases) {
    const Lift L = si_replicated_lift(c.P, c.copies);
    std::vector<Node> q(c.P.size());
    for (Node k = 0; k < q.size(); ++k) q[k] = L.map().fiber(k).back();
    const Unlifted u = unlift_si(L, q);
    r.le(c.name + ".unlift_equals_P", (u.P.mat() - c.P.mat()).cwiseAbs().maxCoeff(), 1e-12);
    const Distribution pi = stationary(c.P);
    r.truth(c.name + ".invariant_s", check_invariance(L, pi, InitKind::Arbitrary).ok);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      Vector x = random_distribution(L.lifted_n(), rng, 0.0).vec();
      Vector p = L.map().collapse(x);
      for (int t = 0; t < 50; ++t) {
        x = L.A().mat() * x;
        p = u.P.mat() * p;
        worst = std::max(worst, tv_distance(L.map().collapse(x), p));
      }
    }
    r.le(c.name + ".trajectory_tv", worst, 1e-9);
  }

  const std::size_t N = 8;
  const Lift D = diaconis_cycle_lift(N);
  const Distribution u = Distribution::uniform(N);
  const auto inv = check_invariance(D, u, InitKind::Arbitrary);
  r.truth("diaconis.fails_s_invariance", !inv.ok);
  const Vector w = min_inflow_witness(D, u, 2);
  r.truth("diaconis.witness_plus3", w[3] > 0.0);
  r.truth("diaconis.witness_minus1", w[static_cast<Eigen::Index>(N + 1)] > 0.0);
  r.truth("diaconis.witness_marginal_is_pi", tv_distance(D.map().collapse(w), u.vec()) == 0.0);
  const Vector next = D.map().collapse(D.A().mat() * w);
  r.eq("diaconis.CAx_2", next[2], 0.0);
  std::vector<Node> q(N);
  for (Node k = 0; k < N; ++k) q[k] = D.map().fiber(k).front();
  const Unlifted uq = unlift_si(D, q);
  r.truth("diaconis.unlift_not_equivalent", !uq.equivalent);
  r.ge("diaconis.witness_trajectory_gap", tv_distance(next, uq.P.mat() * D.map().collapse(w)), 1e-3);
  return r;
}

// -- diameter mixers --------------------------------------------------------------------

struct NamedGraph {
  std::string name;
  Graph g;
  Distribution pi;
};

inline std::vector<NamedGraph> mixer_graphs(std::uint64_t seed) {
  std::vector<NamedGraph> out;
  out.push_back({"barbell6", barbell_graph(6), Distribution::uniform(12)});
  out.push_back({"cycle8", cycle_graph(8), Distribution::uniform(8)});
  out.push_back({"path5", path_graph(5), Distribution::uniform(5)});
  Rng rng(seed, "mixer-graphs");
  for (int k = 0; k < 20; ++k) {
    Graph g = suite_graph(rng, 3, 10);
    Distribution pi = random_distribution(g.size(), rng);
    out.push_back({"random" + std::to_string(k), std::move(g), std::move(pi)});
  }
  return out;
}

/// Largest TV between the marginal and pi over steps D .. D + extra, from
/// every designed vertex start.
inline double marginal_gap_after(const Lift& L, const Distribution& pi, std::size_t D, std::size_t extra) {
  double worst = 0.0;
  for (Node i = 0; i < L.base_n(); ++i) {
    Vector x = L.F()->mat().col(static_cast<Eigen::Index>(i));
    for (std::size_t t = 1; t <= D + extra; ++t) {
      x = L.A().mat() * x;
      if (t >= D) worst = std::max(worst, tv_distance(L.map().collapse(x), pi.vec()));
    }
  }
  return worst;
}

inline SuiteReport thm2(std::uint64_t seed) {
  SuiteReport r{"thm2", seed, "SIMRE", {{"exact_tv", 1e-10}, {"pi_hat_tv", 1e-8}, {"flow_dev_factor", 10.0}}, {}};
  double worst_tv = 0.0;
  double worst_excess = -kInf;
  std::size_t count = 0;
  for (const auto& c : mixer_graphs(seed)) {
    const Lift L = diameter_mixer(c.g, c.pi, MixerVariant::Reducible);
    const std::size_t D = diameter(c.g);
    worst_tv = std::max(worst_tv, marginal_gap_after(L, c.pi, D, 2));
    const double tau = steps_or_inf(marginal_mixing_time(L, c.pi, 0.25, InitKind::Designed));
    worst_excess = std::max(worst_excess, tau - static_cast<double>(D + 1));
    ++count;
  }
  r.eq("reducible.graphs", static_cast<double>(count), 23.0);
  r.le("reducible.max_tv_from_D", worst_tv, 1e-10);
  r.le("reducible.max_tauM_minus_D_plus_1", worst_excess, 0.0);

  {
    const Graph g = cycle_graph(8);
    const Distribution pi = Distribution::uniform(8);
    MixerParams mp;
    mp.reference = metropolis_chain(g, pi);
    const Lift L = diameter_mixer(g, pi, MixerVariant::Flows, mp);
    const Distribution ph = lifted_stationary(L, Distribution(L.F()->apply(pi.vec())));
    r.le("flows.cycle8.flow_dev", check_flow_match(L, ph, *mp.reference, 0.0).max_dev, 1e-12);
    r.le("flows.cycle8.tv_from_D", marginal_gap_after(L, pi, diameter(g), 2), 1e-10);
  }

  r.scenario = "SIMRE, SIre:0.01";
  const double gamma = 1e-3;
  for (auto [name, g] : {std::pair<std::string, Graph>{"cycle4", cycle_graph(4)}, {"barbell3", barbell_graph(3)}}) {
    const Distribution pi = Distribution::uniform(g.size());
    MixerParams mp;
    mp.gamma = gamma;
    mp.reference = metropolis_chain(g, pi);
    const Lift L = diameter_mixer(g, pi, MixerVariant::Irreducible, mp);
    const std::size_t D = diameter(g);
    r.truth("irreducible." + name + ".is_irreducible", is_irreducible(L.A()));
    const Distribution ph = stationary(L.A());
    r.le("irreducible." + name + ".tv_C_pi_hat", tv_distance(L.map().collapse(ph.vec()), pi.vec()), 1e-8);
    r.le("irreducible." + name + ".flow_dev", check_flow_match(L, ph, *mp.reference, 10 * gamma).max_dev, 10 * gamma);
    r.le("irreducible." + name + ".tauM", steps_or_inf(marginal_mixing_time(L, pi, 0.25, InitKind::Designed)),
         static_cast<double>(D + 1));
    r.eq("irreducible." + name + ".gamma_used", L.metadata().params.at("gamma"), gamma);
  }
  return r;
}

// -- conductance lower bound -----------------------------------------------------------

struct ConductanceRow {
  std::string name;
  double phi = 0.0;
  double tau = 0.0;  // from the adversarial start, +inf for Unmixed
  double bound = 0.0;
};

/// Conductance bound on one lift: conductance of the induced chain, then the marginal
/// mixing time from pi^ restricted to the preimage of the minimizing cut.
inline ConductanceRow conductance_row(const std::string& name, const Lift& L, const Distribution& pi_hat) {
  const StochasticMatrix Pt = induced_chain(L, pi_hat);
  const Distribution pi(L.map().collapse(pi_hat.vec()));
  std::vector<Node> X;
  double phi = 0.0;
  if (L.base_n() <= 20) {
    const auto c = phi_chain(Pt, pi);
    phi = c.phi;
    X = c.argmin.members();
  } else {
    const auto c = phi_chain_cycle(Pt, pi);
    phi = c.phi;
    X = c.argmin;
  }
  const Distribution x0 = adversarial_init(L.map(), pi_hat, X);
  ConductanceRow row{name, phi, steps_or_inf(marginal_mixing_time_from(L, x0.vec(), pi, 0.25)), 0.0};
  row.bound = phi > 0.0 ? 1.0 / (4.0 * phi) - 1.0 : kInf;
  return row;
}

/// Every lift built for the mixer, cycle-lift and four-cycle
/// checks, each with the stationary state it is analyzed at.
inline std::vector<std::pair<std::string, std::pair<Lift, Distribution>>> reference_lifts(std::uint64_t seed) {
  std::vector<std::pair<std::string, std::pair<Lift, Distribution>>> out;
  for (const auto& c : mixer_graphs(seed)) {
    Lift L = diameter_mixer(c.g, c.pi, MixerVariant::Reducible);
    Distribution ph = lifted_stationary(L, Distribution(L.F()->apply(c.pi.vec())));
    out.push_back({"mixer." + c.name, {std::move(L), std::move(ph)}});
  }
  for (auto [name, g] : {std::pair<std::string, Graph>{"cycle4", cycle_graph(4)}, {"barbell3", barbell_graph(3)}}) {
    const Distribution pi = Distribution::uniform(g.size());
    MixerParams mp;
    mp.reference = metropolis_chain(g, pi);
    Lift L = diameter_mixer(g, pi, MixerVariant::Irreducible, mp);
    Distribution ph = stationary(L.A());
    out.push_back({"irreducible." + name, {std::move(L), std::move(ph)}});
  }
  for (std::size_t N : {16, 32, 64}) {
    Lift L = diaconis_cycle_lift(N, 1.0 / static_cast<double>(N));
    Distribution ph = stationary(L.A());
    out.push_back({"diaconis" + std::to_string(N), {std::move(L), std::move(ph)}});
  }
  {
    auto fc = four_cycle_lift(0.05, 0.01);
    Distribution ph = stationary(fc.lift.A());
    out.push_back({"four_cycle", {std::move(fc.lift), std::move(ph)}});
  }
  return out;
}

inline SuiteReport thm3(std::uint64_t seed) {
  SuiteReport r{"thm3", seed, "sImrE", {{"integer_slack", 1.0}}, {}};
  std::size_t violations = 0;
  for (const auto& [name, lp] : reference_lifts(seed)) {
    const auto row = conductance_row(name, lp.first, lp.second);
    if (!(row.tau >= row.bound)) ++violations;
    if (name.rfind("mixer.random", 0) != 0) r.ge("conductance_bound." + name, row.tau, row.bound);
  }
  r.eq("conductance_bound.violations", static_cast<double>(violations), 0.0);

  const Lift D = diaconis_cycle_lift(16, 1.0 / 16.0);
  ReportOptions opts;
  opts.phi_options.max_nodes = 16;
  const auto rep = scenario_report(D, ScenarioSpec::parse("sImrE"), Distribution::uniform(16), opts);
  r.truth("diaconis16.sImrE.compliant", rep.compliant);
  for (const auto& b : rep.bounds) r.ge("diaconis16.sImrE." + b.name, b.measured, b.bound);
  return r;
}

// -- node clocks ------------------------------------------------------------------------

inline SuiteReport thm4(std::uint64_t seed) {
  SuiteReport r{"thm4", seed, "SiMRE -> sIMRE", {}, {}};
  const std::size_t n = 8;
  const Graph g = cycle_graph(n);
  const Distribution pi = Distribution::uniform(n);
  const auto bridges = cycle_symmetric_bridges(n);
  const std::size_t D = diameter(g);
  const Lift inner = node_clock_lift(g, bridges, pi);
  const Lift outer = periodic_node_clock_lift(g, bridges);

  r.truth("inner.invariant_S", check_invariance(inner, pi, InitKind::Designed, 50).ok);
  const double tau_inner = steps_or_inf(marginal_mixing_time(inner, pi, 0.25, InitKind::Designed));
  const double tau_outer = steps_or_inf(marginal_mixing_time(outer, pi, 0.25, InitKind::Arbitrary));
  r.le("inner.tauM_S", tau_inner, static_cast<double>(D));
  r.le("outer.tauM_s", tau_outer, 2.0 * static_cast<double>(D + 1));

  // every single-node start lands in F0 = {(0, v, v)} within T+1 steps
  const std::size_t T = D;
  bool lands = true;
  for (std::size_t t0 = 0; t0 <= T; ++t0)
    for (Node v0 = 0; v0 < n; ++v0)
      for (Node v = 0; v < n; ++v) {
        Vector x = Distribution::point(outer.lifted_n(), node_clock_index(n, t0, v0, v)).vec();
        for (std::size_t s = 0; s < T + 1 - t0; ++s) x = outer.A().mat() * x;
        for (Eigen::Index l = 0; l < x.size(); ++l) {
          const auto li = static_cast<std::size_t>(l);
          const bool in_f0 = li < n * n && li / n == li % n;
          if (x[l] > 0.0 && !in_f0) lands = false;
        }
      }
  r.truth("outer.reaches_F0", lands);

  const double phi = phi_graph(g, pi).phi;
  r.ge("inner.tauM_vs_1/(8Phi)", tau_inner, 1.0 / (8.0 * phi));
  r.ge("outer.tauM_vs_1/(4Phi)", tau_outer, 1.0 / (4.0 * phi));
  const auto rep = scenario_report(inner, ScenarioSpec::parse("SiMRE"), pi);
  r.truth("inner.SiMRE.compliant", rep.compliant);
  r.truth("inner.SiMRE.consistent", rep.consistent());
  return r;
}

// -- worked cases -------------------------------------------------------------------------

inline SuiteReport example1(std::uint64_t seed) {
  SuiteReport r{"example1", seed, "sImrE", {{"eps", 0.25}}, {}};
  std::vector<double> lift_tau, walk_tau;
  for (std::size_t N : {16, 32, 64}) {
    const Lift L = diaconis_cycle_lift(N, 1.0 / static_cast<double>(N));
    const Distribution u = Distribution::uniform(N);
    lift_tau.push_back(steps_or_inf(full_mixing_time(L, 0.25, InitKind::Arbitrary)));
    walk_tau.push_back(steps_or_inf(mixing_time(metropolis_chain(cycle_graph(N), u), u, 0.25)));
    r.le("lift.tau" + std::to_string(N), lift_tau.back(), 2.0 * static_cast<double>(N));
    r.ge("lift.tau" + std::to_string(N) + "_vs_N/4", lift_tau.back(), static_cast<double>(N) / 4.0);
  }
  auto in = [&](const std::string& name, double v, double lo, double hi) {
    r.checks.push_back({name, v, hi, "in[" + std::to_string(lo).substr(0, 3) + "," + std::to_string(hi).substr(0, 3) + "]",
                        v >= lo && v <= hi});
  };
  in("lift.ratio_32_16", lift_tau[1] / lift_tau[0], 1.6, 2.6);
  in("lift.ratio_64_32", lift_tau[2] / lift_tau[1], 1.6, 2.6);
  in("walk.ratio_32_16", walk_tau[1] / walk_tau[0], 3.2, 4.8);
  in("walk.ratio_64_32", walk_tau[2] / walk_tau[1], 3.2, 4.8);
  r.ge("speedup_64", walk_tau[2] / lift_tau[2], 4.0);

  const Lift D = diaconis_cycle_lift(8);
  const Vector w = min_inflow_witness(D, Distribution::uniform(8), 2);
  r.eq("witness.CAx_2", D.map().collapse(D.A().mat() * w)[2], 0.0);
  r.truth("witness.support_plus3_minus1", w[3] > 0.0 && w[9] > 0.0);
  r.le("stationary_uniform_16", (stationary(D.A()).vec().array() - 1.0 / 16.0).abs().maxCoeff(), 1e-12);
  return r;
}

inline SuiteReport example2(std::uint64_t seed) {
  SuiteReport r{"example2", seed, "", {{"lp_slack", 1e-8}}, {}};
  r.eq("barbell6.diameter", static_cast<double>(diameter(barbell_graph(6))), 3.0);
  for (std::size_t n = 3; n <= 6; ++n) {
    const Graph g = barbell_graph(n);
    const Distribution u = Distribution::uniform(2 * n);
    const auto res = phi_graph(g, u);
    r.le("phi_graph.barbell" + std::to_string(n), res.phi, 1.0 / static_cast<double>(n) + 1e-8);
    r.le("phi_graph.barbell" + std::to_string(n) + ".self_consistent", std::abs(phi_chain(res.chain, u).phi - res.phi),
         1e-8);
  }
  {
    const std::size_t n = 6;
    const Graph g = barbell_graph(n);
    Matrix P = Matrix::Identity(12, 12);
    P(5, 5) = 0.0;
    P(6, 6) = 0.0;
    P(6, 5) = 1.0;
    P(5, 6) = 1.0;
    std::vector<Node> left{0, 1, 2, 3, 4, 5};
    const Distribution u = Distribution::uniform(12);
    const double v = phi_cut(StochasticMatrix(P, std::make_shared<const Graph>(g)), u, Cut::of(left, u));
    r.le("bridge_prob_1.phi_cut_minus_1/n", std::abs(v - 1.0 / static_cast<double>(n)), 1e-15);
  }
  return r;
}

inline SuiteReport example3(std::uint64_t seed) {
  SuiteReport r{"example3", seed, "SiMre", {{"flow_dev", 1e-9}, {"pi_hat", 1e-12}}, {}};
  const Distribution u = Distribution::uniform(4);
  auto fc = four_cycle_lift(0.05, 0.01);
  const Lift& L = fc.lift;
  const Distribution ph = stationary(L.A());
  const double tau = steps_or_inf(marginal_mixing_time(L, u, 0.25, InitKind::Designed));
  const double flow_dev = check_flow_match(L, ph, fc.reference, 1e-9).max_dev;
  const double phiP = phi_chain(fc.reference, u).phi;
  const double phiG = phi_graph(cycle_graph(4), u).phi;
  r.eq("tauM_S", tau, 2.0);
  r.le("flow_dev", flow_dev, 1e-9);
  const double bound4 = 1.0 / (4.0 * phiP);
  r.checks.push_back({"bound_1_over_4PhiP", bound4, 5.07, "in[5.065,5.085]", bound4 >= 5.065 && bound4 <= 5.085});
  r.ge("bound_1_over_4PhiP_beats_tauM", 1.0 / (4.0 * phiP), tau + 1.0);
  r.le("bound_1_over_8Phi_vs_tauM", 1.0 / (8.0 * phiG), tau);
  r.truth("irreducible", is_irreducible(L.A()));
  r.truth("invariant_S", check_invariance(L, u, InitKind::Designed, 50).ok);
  const double g = 0.01;
  double pi_hat_err = 0.0;
  for (Node s = 0; s < 3; ++s)
    for (Node v = 0; v < 4; ++v)
      pi_hat_err = std::max(pi_hat_err, std::abs(ph[4 * s + v] - (s < 2 ? g : 1.0) / (1.0 + 2.0 * g) / 4.0));
  r.le("pi_hat_closed_form", pi_hat_err, 1e-12);
  r.le("phi_closed_form", std::abs(fc.phi - 0.0147058823529), 1e-12);
  r.le("epsilon_closed_form", std::abs(fc.epsilon - 0.0431818181818), 1e-12);

  auto fc2 = four_cycle_lift(0.01, 0.01);
  const double tau2 = steps_or_inf(marginal_mixing_time(fc2.lift, u, 0.25, InitKind::Designed));
  const double factor1 = 1.0 / (4.0 * phiP) / tau;
  const double factor2 = 1.0 / (4.0 * phi_chain(fc2.reference, u).phi) / tau2;
  r.eq("delta0.01.tauM_S", tau2, 2.0);
  r.checks.push_back({"speedup_factor_ratio", factor2 / factor1, 5.0, "in[4.5,5.5]",
                      factor2 / factor1 >= 4.5 && factor2 / factor1 <= 5.5});

  ScenarioSpec spec = ScenarioSpec::parse("SiMre");
  spec.reference_chain = fc.reference;
  const auto rep = scenario_report(L, spec, u);
  r.truth("SiMre.compliant", rep.compliant);
  r.truth("SiMre.consistent", rep.consistent());
  return r;
}

// -- remark and bridges ------------------------------------------------------------------------

inline SuiteReport clock_contraction(std::uint64_t seed) {
  SuiteReport r{"clock-contraction", seed, "", {{"slack", 1e-9}}, {}};
  Rng rng(seed, "clock-contraction");
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t D = 2; D <= 10; ++D) {
    const double gamma = 0.4 / (2.0 * static_cast<double>(D + 1));
    for (int k = 0; k < 100; ++k) {
      Vector q(static_cast<Eigen::Index>(D + 2));
      for (auto& v : q) v = rng.uniform(-1.0, 1.0);
      q.array() -= q.mean();
      const auto res = clock_contraction_check(D, gamma, q);
      if (!res.ok) ++violations;
      worst = std::max(worst, res.ratio / res.bound);
    }
  }
  r.eq("violations", static_cast<double>(violations), 0.0);
  r.le("max_ratio_over_bound", worst, 1.0 + 1e-9);
  return r;
}

inline SuiteReport bridge_exactness(std::uint64_t seed) {
  SuiteReport r{"bridge-exactness", seed, "", {{"endpoint_tv", 1e-10}, {"column_sum", 1e-12}}, {}};
  Rng rng(seed, "bridge-exactness");
  double worst_tv = 0.0;
  double worst_col = 0.0;
  bool local = true;
  bool length_is_diameter = true;
  for (int k = 0; k < 50; ++k) {
    const Graph g = suite_graph(rng, 2, 10);
    const Distribution target = random_distribution(g.size(), rng);
    const std::size_t D = diameter(g);
    for (Node i = 0; i < g.size(); ++i) {
      const Distribution src = Distribution::point(g.size(), i);
      const auto chain = stochastic_bridge(g, src, target);
      if (chain.length() != D) length_is_diameter = false;
      worst_tv = std::max(worst_tv, tv_distance(chain.apply(src.vec(), D), target.vec()));
      for (const auto& s : chain.steps()) {
        for (Eigen::Index c = 0; c < s.mat().cols(); ++c) {
          worst_col = std::max(worst_col, std::abs(s.mat().col(c).sum() - 1.0));
          for (Eigen::Index j = 0; j < s.mat().rows(); ++j)
            if (j != c && s.mat()(j, c) != 0.0 && !g.has_arc(static_cast<Node>(c), static_cast<Node>(j))) local = false;
        }
      }
    }
  }
  r.le("endpoint_tv", worst_tv, 1e-10);
  r.le("column_sum_deviation", worst_col, 1e-12);
  r.truth("all_steps_local", local);
  r.truth("length_equals_diameter", length_is_diameter);
  return r;
}

// -- registry -------------------------------------------------------------------------------------

inline const std::vector<std::pair<std::string, std::function<SuiteReport(std::uint64_t)>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<SuiteReport(std::uint64_t)>>> table = {
      {"lemma1", lemma1},           {"thm1", thm1},
      {"thm2", thm2},               {"thm3", thm3},
      {"thm4", thm4},               {"example1", example1},
      {"example2", example2},       {"example3", example3},
      {"clock-contraction", clock_contraction}, {"bridge-exactness", bridge_exactness},
  };
  return table;
}

inline SuiteReport run(const std::string& name, std::uint64_t seed) {
  for (const auto& [n, fn] : registry())
    if (n == name) return fn(seed);
  throw Error(ErrorCode::ParseError, "unknown suite '" + name + "'");
}

}  // namespace liftmix::suites
