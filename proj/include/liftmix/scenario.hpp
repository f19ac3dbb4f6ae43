#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "liftmix/conductance.hpp"
#include "liftmix/lift.hpp"
#include "liftmix/markov.hpp"

namespace liftmix {

enum class BoundKind { Lower, Upper, Equal };

inline std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    case BoundKind::Equal: return "equal";
  }
  return "?";
}

struct BoundVerdict {
  std::string name;
  BoundKind kind = BoundKind::Lower;
  double bound = 0.0;
  double measured = 0.0;  // +inf for Unmixed
  bool consistent = false;
};

struct ScenarioReport {
  std::string scenario;
  double eps = 0.25;
  std::size_t diameter = 0;
  MixTime tau_marginal;
  MixTime tau_full;
  InvarianceResult invariance;
  bool irreducible = false;
  std::optional<FlowMatch> flow;
  std::optional<double> phi_graph_value;
  std::optional<double> phi_reference;
  bool compliant = true;  // the lift meets every constraint the scenario imposes
  std::vector<BoundVerdict> bounds;
  std::vector<std::string> notes;

  bool consistent() const {
    for (const auto& b : bounds)
      if (!b.consistent) return false;
    return true;
  }
};

struct ReportOptions {
  double eps = 0.25;
  std::optional<std::size_t> t_max;
  std::vector<Distribution> stationary_seeds;  // required for flow checks on reducible lifts
  PhiGraphOptions phi_options;
  std::size_t invariance_horizon = 50;
};

inline double as_measured(const MixTime& t) {
  return t ? static_cast<double>(*t) : std::numeric_limits<double>::infinity();
}

/// Measured mixing times, constraint verdicts, and the applicable bounds:
///   s with e:  tau_M >= 1/(4 Phi(P_ref))
///   s with E:  tau_M >= 1/(4 Phi), Phi the graph conductance
///   s with i:  tau_M equals the mixing time of the unlifted chain P^q
///   S with i:  tau_M >= 1/(8 Phi), Phi the graph conductance
///   S with I:  tau <= D + 1, except for exact flows on irreducible lifts,
///              where no construction is known.
/// tau is the marginal time under M and the full-state time under m.
inline ScenarioReport scenario_report(const Lift& L, const ScenarioSpec& spec, const Distribution& pi,
                                      const ReportOptions& opts = {}) {
  if (pi.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  if (spec.flows_constrained() && !spec.reference_chain)
    throw Error(ErrorCode::MissingReferenceChain, "scenario " + spec.str() + " needs a reference chain");
  const InitKind init = spec.arbitrary_init ? InitKind::Arbitrary : InitKind::Designed;

  ScenarioReport r;
  r.scenario = spec.str();
  r.eps = opts.eps;
  r.diameter = diameter(L.base());
  r.tau_marginal = marginal_mixing_time(L, pi, opts.eps, init, opts.t_max);
  r.tau_full = full_mixing_time(L, opts.eps, init, opts.t_max);
  r.invariance = check_invariance(L, pi, init, opts.invariance_horizon);
  r.irreducible = is_irreducible(L.A());

  if (spec.flows_constrained()) {
    std::vector<Distribution> pis;
    if (r.irreducible) {
      pis.push_back(stationary(L.A()));
    } else {
      if (opts.stationary_seeds.empty())
        throw Error(ErrorCode::BadScenario, "reducible lift: a stationary seed must be stated for the flow check");
      for (const auto& seed : opts.stationary_seeds) pis.push_back(lifted_stationary(L, seed));
      r.notes.push_back("reducible lift: flows checked only for the stationary states reached from the supplied seeds");
    }
    FlowMatch worst{0.0, true};
    for (const auto& ph : pis) {
      auto f = check_flow_match(L, ph, *spec.reference_chain, spec.flow_tolerance());
      worst.max_dev = std::max(worst.max_dev, f.max_dev);
      worst.ok = worst.ok && f.ok;
    }
    r.flow = worst;
    r.compliant = r.compliant && worst.ok;
  }
  if (spec.invariance_required) r.compliant = r.compliant && r.invariance.ok;
  if (spec.irreducible_required) r.compliant = r.compliant && r.irreducible;

  const double tau_m = as_measured(r.tau_marginal);
  const double tau_rel = spec.full_convergence ? as_measured(r.tau_full) : tau_m;
  auto graph_phi = [&]() -> std::optional<double> {
    if (r.phi_graph_value) return r.phi_graph_value;
    try {
      r.phi_graph_value = phi_graph(L.base(), pi, opts.phi_options).phi;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooManyNodes) throw;
      r.notes.push_back(std::string("graph conductance skipped: ") + e.what());
    }
    return r.phi_graph_value;
  };
  auto lower = [&](std::string name, double bound) {
    r.bounds.push_back({std::move(name), BoundKind::Lower, bound, tau_m, tau_m >= bound - 1e-9});
  };

  if (spec.arbitrary_init) {
    if (spec.flows_constrained()) {
      r.phi_reference = phi_chain(*spec.reference_chain, pi).phi;
      lower("1/(4 Phi(P))", 1.0 / (4.0 * *r.phi_reference));
    } else if (auto phi = graph_phi()) {
      lower("1/(4 Phi)", 1.0 / (4.0 * *phi));
    }
    if (spec.invariance_required) {
      std::vector<Node> q(L.base_n());
      for (Node k = 0; k < L.base_n(); ++k) q[k] = L.map().fiber(k).front();
      const Unlifted u = unlift_si(L, q);
      if (!u.equivalent) r.notes.push_back("fibers act differently: the lift is not equivalent to P^q");
      if (stationarity_residual(u.P.mat(), pi.vec()) <= kLiftStationaryTol) {
        const double base_tau = as_measured(mixing_time(u.P, pi, opts.eps, opts.t_max));
        r.bounds.push_back({"tau(P^q)", BoundKind::Equal, base_tau, tau_m, u.equivalent && tau_m == base_tau});
      } else {
        r.notes.push_back("P^q is not stationary at pi: no comparison with the unlifted chain");
      }
    }
  } else if (spec.invariance_required) {
    if (auto phi = graph_phi()) lower("1/(8 Phi)", 1.0 / (8.0 * *phi));
  } else if (spec.irreducible_required && spec.flows == FlowConstraint::Exact) {
    r.notes.push_back("SIre with exact flows: no upper bound is known");
  } else {
    const double bound = static_cast<double>(r.diameter + 1);
    r.bounds.push_back({"D+1", BoundKind::Upper, bound, tau_rel, tau_rel <= bound});
  }
  return r;
}

}  // namespace liftmix
