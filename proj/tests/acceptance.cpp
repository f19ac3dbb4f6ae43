// Acceptance gate: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "liftmix/suites.hpp"

using namespace liftmix;
using suites::steps_or_inf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome criterion1() {
  double worst_tv = 0.0;
  double worst_excess = -suites::kInf;
  std::size_t graphs = 0;
  for (const auto& c : suites::mixer_graphs(0)) {
    const Lift L = diameter_mixer(c.g, c.pi, MixerVariant::Reducible);
    const std::size_t D = diameter(c.g);
    worst_tv = std::max(worst_tv, suites::marginal_gap_after(L, c.pi, D, 3));
    worst_excess = std::max(worst_excess, steps_or_inf(marginal_mixing_time(L, c.pi, 0.25, InitKind::Designed)) -
                                              static_cast<double>(D + 1));
    ++graphs;
  }
  return {graphs == 23 && worst_tv <= 1e-10 && worst_excess <= 0.0,
          fmt("%g graphs, max TV from t=D %.2e (<= 1e-10), max tau_M-(D+1) = %g", static_cast<double>(graphs), worst_tv,
              worst_excess)};
}

Outcome criterion2() {
  bool ok = true;
  std::string detail;
  for (auto [name, g] : {std::pair<std::string, Graph>{"cycle4", cycle_graph(4)}, {"barbell3", barbell_graph(3)}}) {
    const Distribution pi = Distribution::uniform(g.size());
    MixerParams mp;
    mp.gamma = 1e-3;
    mp.reference = metropolis_chain(g, pi);
    const Lift L = diameter_mixer(g, pi, MixerVariant::Irreducible, mp);
    const bool irr = is_irreducible(L.A());
    const Distribution ph = stationary(L.A());
    const double tv = tv_distance(L.map().collapse(ph.vec()), pi.vec());
    const double dev = check_flow_match(L, ph, *mp.reference, 1e-2).max_dev;
    const double tau = steps_or_inf(marginal_mixing_time(L, pi, 0.25, InitKind::Designed));
    const double D = static_cast<double>(diameter(g));
    ok = ok && irr && tv <= 1e-8 && dev <= 10 * mp.gamma && tau <= D + 1 && L.metadata().params.at("gamma") == 1e-3;
    detail += name + fmt(": irreducible=%g |C pi^-pi|=%.1e flow_dev=%.2e tau_M=%g; ", irr, tv, dev, tau);
  }
  return {ok, detail};
}

Outcome criterion3() {
  std::vector<double> lift, walk;
  for (std::size_t N : {16, 32, 64}) {
    const Lift L = diaconis_cycle_lift(N, 1.0 / static_cast<double>(N));
    const Distribution u = Distribution::uniform(N);
    lift.push_back(steps_or_inf(full_mixing_time(L, 0.25, InitKind::Arbitrary)));
    walk.push_back(steps_or_inf(mixing_time(metropolis_chain(cycle_graph(N), u), u, 0.25)));
  }
  const double l1 = lift[1] / lift[0], l2 = lift[2] / lift[1];
  const double w1 = walk[1] / walk[0], w2 = walk[2] / walk[1];
  const double speedup = walk[2] / lift[2];
  const bool ok = l1 >= 1.6 && l1 <= 2.6 && l2 >= 1.6 && l2 <= 2.6 && w1 >= 3.2 && w1 <= 4.8 && w2 >= 3.2 &&
                  w2 <= 4.8 && speedup >= 4.0;
  return {ok, fmt("lift tau %g/", lift[0], lift[1], lift[2]) + fmt("%g/%g (ratios %.2f,", lift[1], lift[2], l1) +
                  fmt(" %.2f) walk ratios %.2f, %.2f, speedup@64 %.2f", l2, w1, w2, speedup)};
}

Outcome criterion4() {
  bool ok = true;
  std::string detail;
  for (std::size_t n = 3; n <= 6; ++n) {
    const double phi = phi_graph(barbell_graph(n), Distribution::uniform(2 * n)).phi;
    ok = ok && phi <= 1.0 / static_cast<double>(n) + 1e-8;
    detail += fmt("n=%g: %.6f <= %.6f; ", static_cast<double>(n), phi, 1.0 / static_cast<double>(n));
  }
  return {ok, detail};
}

Outcome criterion5() {
  const Distribution u = Distribution::uniform(4);
  const auto fc = four_cycle_lift(0.05, 0.01);
  const double tau = steps_or_inf(marginal_mixing_time(fc.lift, u, 0.25, InitKind::Designed));
  const double dev = check_flow_match(fc.lift, stationary(fc.lift.A()), fc.reference, 1e-9).max_dev;
  const double b4 = 1.0 / (4.0 * phi_chain(fc.reference, u).phi);
  ScenarioSpec spec = ScenarioSpec::parse("SiMre");
  spec.reference_chain = fc.reference;
  const auto rep = scenario_report(fc.lift, spec, u);
  double b8 = suites::kInf;
  for (const auto& b : rep.bounds)
    if (b.name == "1/(8 Phi)") b8 = b.bound;
  const bool ok = tau == 2.0 && dev <= 1e-9 && std::abs(b4 - 5.07) < 0.01 && b4 > tau && b8 <= tau && rep.consistent();
  return {ok, fmt("tau_M=%g flow_dev=%.1e 1/(4Phi(P))=%.4f 1/(8Phi)=%.4f", tau, dev, b4, b8)};
}

Outcome from_suite(const std::string& name, std::uint64_t seed) {
  const auto r = suites::run(name, seed);
  std::string detail = fmt("%g checks", static_cast<double>(r.checks.size()));
  if (const auto* f = r.first_failure()) detail += "; first failure " + f->name;
  return {r.passed(), detail};
}

Outcome criterion7() {
  const auto r = suites::run("lemma1", 0);
  return {r.passed(), fmt("500 instances, violations %g, max leakage-bound %.2e", r.checks[0].measured,
                          r.checks[1].measured)};
}

Outcome criterion8() {
  std::size_t lifts = 0, violations = 0;
  double tightest = suites::kInf;
  for (const auto& [name, lp] : suites::reference_lifts(0)) {
    const auto row = suites::conductance_row(name, lp.first, lp.second);
    ++lifts;
    if (!(row.tau >= row.bound)) ++violations;
    if (std::isfinite(row.tau)) tightest = std::min(tightest, row.tau - row.bound);
  }
  return {violations == 0, fmt("%g lifts, violations %g, smallest finite tau-bound margin %.3f",
                               static_cast<double>(lifts), static_cast<double>(violations), tightest)};
}

Outcome criterion9() {
  const auto r = suites::run("clock-contraction", 0);
  return {r.passed(), fmt("900 deviations, violations %g, max ratio/bound %.3f", r.checks[0].measured,
                          r.checks[1].measured)};
}

Outcome criterion10() {
  const auto r = suites::run("bridge-exactness", 0);
  return {r.passed(), fmt("max endpoint TV %.1e, max column-sum drift %.1e, local %g", r.checks[0].measured,
                          r.checks[1].measured, r.checks[2].measured)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 for no runtime clause
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "diameter-time reducible mixer", 10, criterion1},
      {2, "irreducible mixer with gamma perturbation", 10, criterion2},
      {3, "cycle lift scaling vs lazy walk", 30, criterion3},
      {4, "barbell graph conductance", 0, criterion4},
      {5, "four-cycle lift beats flow conductance", 5, criterion5},
      {6, "invariance equivalence and cycle-lift witness", 0, [] { return from_suite("thm1", 0); }},
      {7, "cut leakage bound", 0, criterion7},
      {8, "conductance bound under arbitrary init", 0, criterion8},
      {9, "clock contraction", 0, criterion9},
      {10, "bridge exactness", 0, criterion10},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %-46s %s", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    if (c.budget_s > 0) std::printf(" (%.2fs < %gs%s)", secs, c.budget_s, in_time ? "" : " EXCEEDED");
    std::printf("\n");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
