#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "liftmix/graph.hpp"
#include "liftmix/lp.hpp"
#include "liftmix/markov.hpp"

namespace liftmix {

inline constexpr double kLeakageSlack = 1e-9;

/// Stationary flow leaving X, relative to pi(X).
inline double phi_cut(const StochasticMatrix& P, const Distribution& pi, const Cut& X) {
  if (P.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "phi_cut: sizes differ");
  double weight = 0.0;
  double flow = 0.0;
  for (Node i = 0; i < P.size(); ++i) {
    if (!X.contains(i)) continue;
    weight += pi[i];
    for (Node j = 0; j < P.size(); ++j)
      if (!X.contains(j)) flow += P(j, i) * pi[i];
  }
  if (!(weight > 0.0)) throw Error(ErrorCode::EmptyCutWeight, "pi(X) = 0");
  return flow / weight;
}

struct ChainConductance {
  double phi = 0.0;
  Cut argmin;
};

/// Minimum of phi_cut over all cuts with pi(X) <= 1/2; the argmin is the
/// lowest mask among the minimizers.
inline ChainConductance phi_chain(const StochasticMatrix& P, const Distribution& pi) {
  if (P.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "phi_chain: sizes differ");
  if (P.size() < 2) throw Error(ErrorCode::BadSize, "conductance needs at least two nodes");
  if (stationarity_residual(P.mat(), pi.vec()) > kStationaryTol)
    throw Error(ErrorCode::NotStationary, "phi_chain: P pi != pi");
  const Graph nodes(P.size(), {});
  ChainConductance best{std::numeric_limits<double>::infinity(), {}};
  for (const Cut& X : enumerate_cuts(nodes, pi)) {
    const double v = phi_cut(P, pi, X);
    if (v < best.phi) best = {v, X};
  }
  return best;
}

struct IntervalConductance {
  double phi = 0.0;
  std::vector<Node> argmin;  // the minimizing arc of the cycle, in order
};

/// Phi(P) for a chain local to cycle(n), any n. A cut splits into maximal
/// arcs of the cycle, and its exit flow and weight are sums over those arcs,
/// so the ratio is at least that of its best arc: the minimum over arcs with
/// pi <= 1/2 is the minimum over all cuts.
inline IntervalConductance phi_chain_cycle(const StochasticMatrix& P, const Distribution& pi) {
  const std::size_t n = P.size();
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "phi_chain_cycle: sizes differ");
  if (n < 3) throw Error(ErrorCode::BadSize, "phi_chain_cycle needs n >= 3");
  const Graph cyc = [&] {
    std::vector<Arc> e;
    for (Node i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
  }();
  for (auto [i, j] : support_graph(P.mat()).arcs())
    if (!cyc.has_arc(i, j)) throw Error(ErrorCode::LocalityViolation, "phi_chain_cycle: chain is not local to the cycle");
  if (stationarity_residual(P.mat(), pi.vec()) > kStationaryTol)
    throw Error(ErrorCode::NotStationary, "phi_chain_cycle: P pi != pi");
  IntervalConductance best{std::numeric_limits<double>::infinity(), {}};
  for (Node start = 0; start < n; ++start) {
    double w = 0.0;
    for (std::size_t len = 1; len < n; ++len) {
      const Node last = (start + len - 1) % n;
      w += pi[last];
      if (w > 0.5 + 1e-12) break;
      const Node before = (start + n - 1) % n;
      const Node after = (last + 1) % n;
      const double flow = P(before, start) * pi[start] + P(after, last) * pi[last];
      const double v = flow / w;
      if (v < best.phi) {
        best.phi = v;
        best.argmin.clear();
        for (std::size_t k = 0; k < len; ++k) best.argmin.push_back((start + k) % n);
      }
    }
  }
  return best;
}

struct GraphConductance {
  double phi = 0.0;
  StochasticMatrix chain;  // one maximizer
  std::size_t lp_rounds = 0;
  std::size_t active_cuts = 0;
};

struct PhiGraphOptions {
  std::size_t max_nodes = 14;
  std::size_t cuts_per_round = 16;
  std::size_t max_rounds = 2000;
};

/// Largest Phi(P) over chains local to g with stationary distribution pi.
///
/// Linear program in the stationary flows f_ji = P_ji pi_i on arcs i -> j:
///   maximize t
///   s.t. sum_j f_ji <= pi_i                  (the diagonal absorbs the rest)
///        inflow(j) = outflow(j)              (P pi = pi)
///        sum_{i in X, j notin X} f_ji >= t pi(X)   for every cut X.
/// Cut rows are generated lazily: solve with the rows found so far, add the
/// cuts the current optimum violates, repeat. When no cut is violated the
/// solution is optimal for the full program.
inline GraphConductance phi_graph(const Graph& g, const Distribution& pi, const PhiGraphOptions& opts = {}) {
  const std::size_t n = g.size();
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "phi_graph: pi length");
  if (n > opts.max_nodes)
    throw Error(ErrorCode::TooManyNodes, std::to_string(n) + " > " + std::to_string(opts.max_nodes) + " nodes");
  if (n < 2) throw Error(ErrorCode::BadSize, "conductance needs at least two nodes");
  if (pi.min() <= 0.0) throw Error(ErrorCode::ZeroMarginalSupport, "phi_graph needs full-support pi");

  const std::vector<Arc> arcs = g.arcs();
  const std::size_t n_var = arcs.size() + 1;  // flows, then t
  const std::size_t t_var = arcs.size();
  const std::vector<Cut> all_cuts = enumerate_cuts(g, pi);

  std::vector<std::vector<double>> base_rows;
  std::vector<double> base_rhs;
  for (Node i = 0; i < n; ++i) {
    std::vector<double> row(n_var, 0.0);
    for (std::size_t k = 0; k < arcs.size(); ++k)
      if (arcs[k].first == i) row[k] = 1.0;
    base_rows.push_back(std::move(row));
    base_rhs.push_back(pi[i]);
  }
  for (Node j = 0; j + 1 < n; ++j) {  // the last balance row is implied by the others
    std::vector<double> row(n_var, 0.0);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      if (arcs[k].second == j) row[k] += 1.0;
      if (arcs[k].first == j) row[k] -= 1.0;
    }
    base_rows.push_back(row);
    base_rhs.push_back(0.0);
    for (auto& v : row) v = -v;
    base_rows.push_back(std::move(row));
    base_rhs.push_back(0.0);
  }

  auto cut_row = [&](const Cut& X) {
    std::vector<double> row(n_var, 0.0);
    for (std::size_t k = 0; k < arcs.size(); ++k)
      if (X.contains(arcs[k].first) && !X.contains(arcs[k].second)) row[k] = -1.0;
    row[t_var] = X.weight;
    return row;
  };

  std::vector<char> active(all_cuts.size(), 0);
  for (std::size_t c = 0; c < all_cuts.size(); ++c)
    if (std::popcount(all_cuts[c].member_mask) == 1) active[c] = 1;

  std::vector<double> objective(n_var, 0.0);
  objective[t_var] = 1.0;

  GraphConductance out;
  std::vector<double> x;
  double t_opt = 0.0;
  for (std::size_t round = 0;; ++round) {
    if (round >= opts.max_rounds) throw Error(ErrorCode::InfeasibleLP, "cut generation did not converge");
    auto rows = base_rows;
    auto rhs = base_rhs;
    for (std::size_t c = 0; c < all_cuts.size(); ++c) {
      if (!active[c]) continue;
      rows.push_back(cut_row(all_cuts[c]));
      rhs.push_back(0.0);
    }
    auto res = lp::DenseSimplex(rows, rhs, objective).solve();
    if (res.status != lp::DenseSimplex::Status::Optimal)
      throw Error(ErrorCode::InfeasibleLP, "conductance LP did not reach an optimum");
    x = std::move(res.x);
    t_opt = x[t_var];
    out.lp_rounds = round + 1;

    std::vector<std::pair<double, std::size_t>> violated;
    for (std::size_t c = 0; c < all_cuts.size(); ++c) {
      if (active[c]) continue;
      double flow = 0.0;
      for (std::size_t k = 0; k < arcs.size(); ++k)
        if (all_cuts[c].contains(arcs[k].first) && !all_cuts[c].contains(arcs[k].second)) flow += x[k];
      const double ratio = flow / all_cuts[c].weight;
      if (ratio < t_opt - 1e-12) violated.emplace_back(ratio, c);
    }
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end());
    for (std::size_t k = 0; k < std::min(opts.cuts_per_round, violated.size()); ++k) active[violated[k].second] = 1;
  }

  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto [i, j] = arcs[k];
    P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::max(0.0, x[k]) / pi[i];
  }
  for (Node i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    P(ii, ii) = std::max(0.0, 1.0 - (P.col(ii).sum() - P(ii, ii)));
  }
  out.phi = t_opt;
  out.chain = StochasticMatrix(std::move(P), std::make_shared<const Graph>(g));
  out.active_cuts = static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
  return out;
}

struct LeakageCheck {
  double leakage = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Mass outside X after t steps from pi restricted to X, against t * Phi_X(P).
inline LeakageCheck leakage_check(const StochasticMatrix& P, const Distribution& pi, const Cut& X, std::size_t t) {
  if (t < 1) throw Error(ErrorCode::BadSize, "leakage_check needs t >= 1");
  if (stationarity_residual(P.mat(), pi.vec()) > kStationaryTol)
    throw Error(ErrorCode::NotStationary, "leakage_check: P pi != pi");
  const double phi = phi_cut(P, pi, X);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(P.size()));
  for (Node i = 0; i < P.size(); ++i)
    if (X.contains(i)) x[static_cast<Eigen::Index>(i)] = pi[i] / X.weight;
  for (std::size_t s = 0; s < t; ++s) x = P.mat() * x;
  LeakageCheck r;
  for (Node j = 0; j < P.size(); ++j)
    if (!X.contains(j)) r.leakage += x[static_cast<Eigen::Index>(j)];
  r.bound = static_cast<double>(t) * phi;
  r.ok = r.leakage <= r.bound + kLeakageSlack;
  return r;
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// Phi(P) against 4 log(1/pi_min) / (D - 1), natural logarithm.
inline BoundCheck diameter_conductance_check(const StochasticMatrix& P, const Distribution& pi, std::size_t D) {
  if (D < 2) throw Error(ErrorCode::BadSize, "diameter_conductance_check needs D >= 2");
  BoundCheck r;
  r.lhs = phi_chain(P, pi).phi;
  r.rhs = 4.0 * std::log(1.0 / pi.min()) / static_cast<double>(D - 1);
  r.ok = r.lhs <= r.rhs + 1e-9;
  return r;
}

/// Clock chain on states 0..D+1: s -> s+1 for s <= D, the top state stays with
/// probability 1 - gamma and jumps back to 0 with probability gamma.
inline Matrix clock_chain(std::size_t D, double gamma) {
  const auto n = static_cast<Eigen::Index>(D + 2);
  Matrix P = Matrix::Zero(n, n);
  for (Eigen::Index s = 0; s + 1 < n; ++s) P(s + 1, s) = 1.0;
  P(n - 1, n - 1) = 1.0 - gamma;
  P(0, n - 1) = gamma;
  return P;
}

struct ContractionCheck {
  double ratio = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// l1 contraction of a zero-sum deviation q over D+1 steps of the clock chain,
/// against 2 (D+1) gamma.
inline ContractionCheck clock_contraction_check(std::size_t D, double gamma, const Vector& q0) {
  if (!(gamma > 0.0 && gamma < 1.0 / (2.0 * static_cast<double>(D + 1))))
    throw Error(ErrorCode::BadGamma, "need 0 < gamma < 1/(2(D+1))");
  if (q0.size() != static_cast<Eigen::Index>(D + 2))
    throw Error(ErrorCode::DimensionMismatch, "q0 must have D+2 entries");
  const double scale = std::max(1.0, q0.cwiseAbs().sum());
  if (std::abs(q0.sum()) > 1e-12 * scale) throw Error(ErrorCode::DimensionMismatch, "q0 must sum to zero");
  const Matrix P = clock_chain(D, gamma);
  Vector q = q0;
  for (std::size_t s = 0; s <= D; ++s) q = P * q;
  ContractionCheck r;
  r.bound = 2.0 * static_cast<double>(D + 1) * gamma;
  const double before = q0.cwiseAbs().sum();
  r.ratio = before > 0.0 ? q.cwiseAbs().sum() / before : 0.0;
  r.ok = r.ratio <= r.bound + 1e-9;
  return r;
}

}  // namespace liftmix
