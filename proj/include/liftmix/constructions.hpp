#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liftmix/graph.hpp"
#include "liftmix/lift.hpp"
#include "liftmix/markov.hpp"

namespace liftmix {

// -- stochastic bridges -------------------------------------------------------------

/// Local time-varying chain of length D = diameter(g) carrying p_src onto
/// p_dst. Mass m = p_src(i) p_dst(u) travels from i to u: it waits at i for
/// D - d(i, u) steps, then walks the canonical shortest path. P(t) is the
/// aggregate of these moves normalized by the mass present at each node;
/// columns with no mass stay put.
inline TimeVaryingChain stochastic_bridge(const Graph& g, const Distribution& p_src, const Distribution& p_dst) {
  const std::size_t n = g.size();
  if (p_src.size() != n || p_dst.size() != n) throw Error(ErrorCode::DimensionMismatch, "bridge endpoints vs graph");
  const auto dist = distance_table(g);
  std::size_t D = 0;
  for (const auto& row : dist)
    for (auto d : row) D = std::max(D, d);
  const auto N = static_cast<Eigen::Index>(n);
  std::vector<Matrix> flow(D, Matrix::Zero(N, N));
  for (Node i = 0; i < n; ++i) {
    if (p_src[i] == 0.0) continue;
    for (Node u = 0; u < n; ++u) {
      const double m = p_src[i] * p_dst[u];
      if (m == 0.0) continue;
      const auto path = shortest_path(g, i, u);
      const std::size_t wait = D - dist[i][u];
      auto at = [&](std::size_t t) { return t <= wait ? i : path[t - wait]; };
      for (std::size_t t = 1; t <= D; ++t)
        flow[t - 1](static_cast<Eigen::Index>(at(t)), static_cast<Eigen::Index>(at(t - 1))) += m;
    }
  }
  auto locality = std::make_shared<const Graph>(g);
  std::vector<StochasticMatrix> steps;
  for (std::size_t t = 0; t < D; ++t) {
    Matrix P = Matrix::Zero(N, N);
    for (Eigen::Index v = 0; v < N; ++v) {
      const double mass = flow[t].col(v).sum();
      if (mass > 0.0) {
        P.col(v) = flow[t].col(v) / mass;
      } else {
        P(v, v) = 1.0;
      }
    }
    steps.emplace_back(std::move(P), locality);
  }
  return TimeVaryingChain(std::move(steps));
}

/// Relabels a chain on the cycle by v -> v + shift (mod n).
inline TimeVaryingChain rotate_chain(const TimeVaryingChain& chain, std::size_t shift) {
  const std::size_t n = chain.dimension();
  std::vector<StochasticMatrix> steps;
  for (const auto& s : chain.steps()) {
    Matrix P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Node i = 0; i < n; ++i)
      for (Node j = 0; j < n; ++j)
        P(static_cast<Eigen::Index>((j + shift) % n), static_cast<Eigen::Index>((i + shift) % n)) = s(j, i);
    steps.emplace_back(std::move(P), s.locality());
  }
  return TimeVaryingChain(std::move(steps));
}

/// Bridges e_v -> uniform on cycle(n), all rotations of the one from node 0,
/// so that the family is invariant under rotating the cycle.
inline std::vector<TimeVaryingChain> cycle_symmetric_bridges(std::size_t n) {
  const Graph g = cycle_graph(n);
  const TimeVaryingChain base = stochastic_bridge(g, Distribution::point(n, 0), Distribution::uniform(n));
  std::vector<TimeVaryingChain> out;
  for (Node v = 0; v < n; ++v) out.push_back(rotate_chain(base, v));
  return out;
}

/// Bridges e_v -> pi for every node v.
inline std::vector<TimeVaryingChain> bridges_to(const Graph& g, const Distribution& pi) {
  std::vector<TimeVaryingChain> out;
  for (Node v = 0; v < g.size(); ++v) out.push_back(stochastic_bridge(g, Distribution::point(g.size(), v), pi));
  return out;
}

// -- clock lifts ----------------------------------------------------------------------

namespace detail {

inline void put_block(Matrix& A, std::size_t row_block, std::size_t col_block, std::size_t n, const Matrix& block,
                      double scale = 1.0) {
  A.block(static_cast<Eigen::Index>(row_block * n), static_cast<Eigen::Index>(col_block * n),
          static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) += scale * block;
}

inline std::vector<Node> layered_projection(std::size_t layers, std::size_t n) {
  std::vector<Node> proj(layers * n);
  for (std::size_t l = 0; l < proj.size(); ++l) proj[l] = l % n;
  return proj;
}

inline void check_chain(const Graph& g, const TimeVaryingChain& chain) {
  if (chain.empty()) throw Error(ErrorCode::EmptyChain, "chain has no steps");
  if (chain.dimension() != g.size()) throw Error(ErrorCode::DimensionMismatch, "chain dimension differs from graph");
}

}  // namespace detail

/// Clock lift on (T+1) N nodes, node (t, v) at index t N + v:
/// A = sum_t e_t e_{t-1}^T (x) P(t) + e_T e_T^T (x) I, F p = e_0 (x) p.
inline Lift clock_lift(const Graph& g, const TimeVaryingChain& chain) {
  detail::check_chain(g, chain);
  const std::size_t n = g.size();
  const std::size_t T = chain.length();
  const auto total = static_cast<Eigen::Index>((T + 1) * n);
  Matrix A = Matrix::Zero(total, total);
  for (std::size_t t = 1; t <= T; ++t) detail::put_block(A, t, t - 1, n, chain.step(t).mat());
  detail::put_block(A, T, T, n, Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  Matrix F = Matrix::Zero(total, static_cast<Eigen::Index>(n));
  F.topRows(static_cast<Eigen::Index>(n)).setIdentity();
  return Lift(g, LiftMap(n, detail::layered_projection(T + 1, n)), std::move(A), std::move(F),
              {"clock", {{"T", static_cast<double>(T)}}});
}

/// Clock lift with time on a cycle: T N nodes, layer T-1 feeds layer 0 through P(T).
inline Lift periodic_clock_lift(const Graph& g, const TimeVaryingChain& chain) {
  detail::check_chain(g, chain);
  const std::size_t n = g.size();
  const std::size_t T = chain.length();
  const auto total = static_cast<Eigen::Index>(T * n);
  Matrix A = Matrix::Zero(total, total);
  for (std::size_t t = 1; t < T; ++t) detail::put_block(A, t, t - 1, n, chain.step(t).mat());
  detail::put_block(A, 0, T - 1, n, chain.step(T).mat());
  Matrix F = Matrix::Zero(total, static_cast<Eigen::Index>(n));
  F.topRows(static_cast<Eigen::Index>(n)).setIdentity();
  return Lift(g, LiftMap(n, detail::layered_projection(T, n)), std::move(A), std::move(F),
              {"periodic-clock", {{"T", static_cast<double>(T)}}});
}

// -- node-clock lifts ------------------------------------------------------------------

/// Node index of (t, v0, v) in a node-clock lift over n base nodes.
inline std::size_t node_clock_index(std::size_t n, std::size_t t, Node v0, Node v) { return (t * n + v0) * n + v; }

namespace detail {

inline std::size_t common_length(const Graph& g, const std::vector<TimeVaryingChain>& per_node) {
  if (per_node.size() != g.size()) throw Error(ErrorCode::LengthMismatch, "need one chain per base node");
  const std::size_t T = per_node.front().length();
  for (const auto& c : per_node) {
    if (c.length() != T) throw Error(ErrorCode::LengthMismatch, "per-node chains differ in length");
    check_chain(g, c);
  }
  return T;
}

/// Layers 0..T of a node-clock lift: (t-1, v0, .) -> (t, v0, .) by P^(v0)(t).
inline void fill_clock_layers(Matrix& A, std::size_t n, const std::vector<TimeVaryingChain>& per_node) {
  const std::size_t T = per_node.front().length();
  for (Node v0 = 0; v0 < n; ++v0)
    for (std::size_t t = 1; t <= T; ++t) {
      const Matrix& P = per_node[v0].step(t).mat();
      A.block(static_cast<Eigen::Index>(node_clock_index(n, t, v0, 0)),
              static_cast<Eigen::Index>(node_clock_index(n, t - 1, v0, 0)), static_cast<Eigen::Index>(n),
              static_cast<Eigen::Index>(n)) = P;
    }
}

inline Matrix node_clock_init(std::size_t layers, std::size_t n) {
  Matrix F = Matrix::Zero(static_cast<Eigen::Index>(layers * n * n), static_cast<Eigen::Index>(n));
  for (Node v = 0; v < n; ++v) F(static_cast<Eigen::Index>(node_clock_index(n, 0, v, v)), static_cast<Eigen::Index>(v)) = 1.0;
  return F;
}

/// Top layer T+1 of a node-clock lift: (T, v0, v) -> (T+1, w, v) with
/// probability pi_w, then (T+1, w, .) evolves by (1-gamma) top and returns
/// to (0, v, v) with probability gamma.
inline Matrix node_clock_matrix(const Graph& g, const std::vector<TimeVaryingChain>& per_node, const Distribution& pi,
                                const Matrix& top, double gamma) {
  const std::size_t n = g.size();
  const std::size_t T = common_length(g, per_node);
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "pi length differs from graph");
  const auto total = static_cast<Eigen::Index>((T + 2) * n * n);
  Matrix A = Matrix::Zero(total, total);
  fill_clock_layers(A, n, per_node);
  for (Node v0 = 0; v0 < n; ++v0)
    for (Node v = 0; v < n; ++v)
      for (Node w = 0; w < n; ++w)
        A(static_cast<Eigen::Index>(node_clock_index(n, T + 1, w, v)),
          static_cast<Eigen::Index>(node_clock_index(n, T, v0, v))) = pi[w];
  for (Node w = 0; w < n; ++w) {
    A.block(static_cast<Eigen::Index>(node_clock_index(n, T + 1, w, 0)),
            static_cast<Eigen::Index>(node_clock_index(n, T + 1, w, 0)), static_cast<Eigen::Index>(n),
            static_cast<Eigen::Index>(n)) = (1.0 - gamma) * top;
    if (gamma > 0.0)
      for (Node v = 0; v < n; ++v)
        A(static_cast<Eigen::Index>(node_clock_index(n, 0, v, v)),
          static_cast<Eigen::Index>(node_clock_index(n, T + 1, w, v))) += gamma;
  }
  return A;
}

inline std::vector<Node> node_clock_projection(std::size_t layers, std::size_t n) {
  std::vector<Node> proj(layers * n * n);
  for (std::size_t l = 0; l < proj.size(); ++l) proj[l] = l % n;
  return proj;
}

}  // namespace detail

/// Node-clock lift on (T+2) N^2 nodes (t, v0, v): the walker remembers its
/// start v0 and follows P^(v0)(t); after T steps the memory is redrawn from
/// pi and the walker stays put in layer T+1. F p puts p_v on (0, v, v).
inline Lift node_clock_lift(const Graph& g, const std::vector<TimeVaryingChain>& per_node, const Distribution& pi) {
  const std::size_t n = g.size();
  const std::size_t T = detail::common_length(g, per_node);
  const Matrix I = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return Lift(g, LiftMap(n, detail::node_clock_projection(T + 2, n)), detail::node_clock_matrix(g, per_node, pi, I, 0.0),
              detail::node_clock_init(T + 2, n), {"node-clock", {{"T", static_cast<double>(T)}}});
}

/// Node-clock lift with time on a cycle: T+1 layers, and (T, v0, v) returns
/// to (0, v, v), where a fresh run of P^(v) starts.
inline Lift periodic_node_clock_lift(const Graph& g, const std::vector<TimeVaryingChain>& per_node) {
  const std::size_t n = g.size();
  const std::size_t T = detail::common_length(g, per_node);
  const auto total = static_cast<Eigen::Index>((T + 1) * n * n);
  Matrix A = Matrix::Zero(total, total);
  detail::fill_clock_layers(A, n, per_node);
  for (Node v0 = 0; v0 < n; ++v0)
    for (Node v = 0; v < n; ++v)
      A(static_cast<Eigen::Index>(node_clock_index(n, 0, v, v)), static_cast<Eigen::Index>(node_clock_index(n, T, v0, v))) =
          1.0;
  return Lift(g, LiftMap(n, detail::node_clock_projection(T + 1, n)), std::move(A), detail::node_clock_init(T + 1, n),
              {"periodic-node-clock", {{"T", static_cast<double>(T)}}});
}

// -- diameter-time mixer -----------------------------------------------------------------

struct TreeCorrection {
  Matrix P_prime;
  SpanningTree tree;
  double beta = 0.0;
};

/// P' with P' pi~ = y, zero column sums, support on the arcs of a rooted
/// spanning tree plus the diagonal. The tree uses only arcs parent -> node
/// with P(node, parent) >= beta, beta as large as possible; it is processed
/// leaves to root, each node k taking the subtree sum S_k of y through
/// P'(k, parent) = S_k / pi~(parent), compensated on the parent's diagonal.
inline TreeCorrection spanning_tree_correction(const Graph& g, const StochasticMatrix& P, const Distribution& pi_tilde,
                                               const Vector& y) {
  const std::size_t n = g.size();
  if (P.size() != n || pi_tilde.size() != n || static_cast<std::size_t>(y.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "spanning_tree_correction: sizes differ");
  if (std::abs(y.sum()) > 1e-10) throw Error(ErrorCode::NotStationary, "requirement y must sum to zero");

  std::vector<double> levels;
  for (auto [i, j] : g.arcs())
    if (P(j, i) > 0.0) levels.push_back(P(j, i));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto tree_at = [&](double beta) -> std::optional<SpanningTree> {
    try {
      return rooted_spanning_tree(
          g, [&](Node node, Node parent) { return g.has_arc(parent, node) && P(node, parent) >= beta; }, 0);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoSpanningTree) return std::nullopt;
      throw;
    }
  };
  if (levels.empty() || !tree_at(levels.front()))
    throw Error(ErrorCode::NoSpanningTree, "positive entries of P do not span the graph from node 0");
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (tree_at(levels[mid])) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  TreeCorrection out;
  out.beta = levels[lo];
  out.tree = *tree_at(out.beta);

  const auto N = static_cast<Eigen::Index>(n);
  out.P_prime = Matrix::Zero(N, N);
  std::vector<double> S(y.data(), y.data() + n);
  for (Node k : out.tree.leaves_first) {
    if (k == out.tree.root) continue;
    const Node parent = out.tree.parent[k];
    S[parent] += S[k];
    const double move = S[k] / pi_tilde[parent];
    out.P_prime(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(parent)) += move;
    out.P_prime(static_cast<Eigen::Index>(parent), static_cast<Eigen::Index>(parent)) -= move;
  }
  const double residual = (out.P_prime * pi_tilde.vec() - y).cwiseAbs().maxCoeff();
  if (residual > 1e-10) throw Error(ErrorCode::NoConvergence, "tree correction residual " + std::to_string(residual));
  const Matrix sum = P.mat() + out.P_prime;
  if (sum.minCoeff() < -kClampTol || sum.maxCoeff() > 1.0 + kClampTol)
    throw Error(ErrorCode::NegativeEntry, "P + P' leaves [0, 1]");
  return out;
}

enum class MixerVariant { Reducible, Flows, Irreducible };

inline std::string to_string(MixerVariant v) {
  switch (v) {
    case MixerVariant::Reducible: return "reducible";
    case MixerVariant::Flows: return "flows";
    case MixerVariant::Irreducible: return "irreducible";
  }
  return "?";
}

struct MixerParams {
  double gamma = 1e-3;
  std::optional<StochasticMatrix> reference;  // needed by Flows and Irreducible
  std::size_t max_halvings = 20;
};

/// Restriction of A (and F) to the nodes reachable from the support of F.
/// The reachable set is closed under A, so kept columns stay stochastic.
inline Lift prune_unreachable(const Lift& L) {
  std::vector<char> seen(L.lifted_n(), 0);
  std::vector<Node> stack;
  for (Eigen::Index j = 0; j < L.F()->mat().cols(); ++j)
    for (Eigen::Index k = 0; k < L.F()->mat().rows(); ++k)
      if (L.F()->mat()(k, j) > 0.0 && !seen[static_cast<Node>(k)]) {
        seen[static_cast<Node>(k)] = 1;
        stack.push_back(static_cast<Node>(k));
      }
  while (!stack.empty()) {
    const Node u = stack.back();
    stack.pop_back();
    for (Node v : L.lifted().out(u))
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  std::vector<Node> keep;
  for (Node l = 0; l < L.lifted_n(); ++l)
    if (seen[l]) keep.push_back(l);
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix A(m, m);
  Matrix F(m, static_cast<Eigen::Index>(L.base_n()));
  std::vector<Node> proj(keep.size());
  for (Eigen::Index a = 0; a < m; ++a) {
    proj[static_cast<std::size_t>(a)] = L.map()(keep[static_cast<std::size_t>(a)]);
    F.row(a) = L.F()->mat().row(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(a)]));
    for (Eigen::Index b = 0; b < m; ++b)
      A(a, b) = L.A().mat()(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(a)]),
                            static_cast<Eigen::Index>(keep[static_cast<std::size_t>(b)]));
  }
  LiftMetadata meta = L.metadata();
  meta.params["pruned_nodes"] = static_cast<double>(L.lifted_n() - keep.size());
  return Lift(L.base(), LiftMap(L.base_n(), std::move(proj)), std::move(A), std::move(F), std::move(meta));
}

/// Lift whose marginal reaches pi exactly after D = diameter(g) steps from any
/// designed start: a node-clock lift over bridges e_v -> pi.
///   Reducible:   the top layer holds still.
///   Flows:       the top layer runs the reference chain, I (x) P.
///   Irreducible: the top layer runs (1-gamma) I (x) P~ and restarts with
///                probability gamma; P~ = P + P' is tuned so that C pi^ = pi,
///                and nodes never reached from F are dropped.
inline Lift diameter_mixer(const Graph& g, const Distribution& pi, MixerVariant variant, const MixerParams& params = {}) {
  const std::size_t n = g.size();
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "pi length differs from graph");
  if (pi.min() <= 0.0) throw Error(ErrorCode::ZeroMarginalSupport, "diameter_mixer needs full-support pi");
  const auto per_node = bridges_to(g, pi);
  const std::size_t D = per_node.front().length();
  const std::size_t layers = D + 2;
  const Matrix I = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  LiftMetadata meta{"diameter", {{"D", static_cast<double>(D)}}};
  auto finish = [&](Matrix A, LiftMetadata m) {
    return Lift(g, LiftMap(n, detail::node_clock_projection(layers, n)), std::move(A), detail::node_clock_init(layers, n),
                std::move(m));
  };

  if (variant == MixerVariant::Reducible) {
    meta.params["variant"] = 0;
    return finish(detail::node_clock_matrix(g, per_node, pi, I, 0.0), meta);
  }
  if (!params.reference) throw Error(ErrorCode::MissingReferenceChain, "this variant needs a reference chain");
  const StochasticMatrix& P = *params.reference;
  if (P.size() != n) throw Error(ErrorCode::DimensionMismatch, "reference chain size differs from graph");
  if (stationarity_residual(P.mat(), pi.vec()) > kStationaryTol)
    throw Error(ErrorCode::NotStationary, "reference chain is not stationary at pi");
  for (auto [i, j] : support_graph(P.mat()).arcs())
    if (!g.has_arc(i, j)) throw Error(ErrorCode::LocalityViolation, "reference chain is not local to the graph");
  if (variant == MixerVariant::Flows) {
    meta.params["variant"] = 1;
    return finish(detail::node_clock_matrix(g, per_node, pi, P.mat(), 0.0), meta);
  }

  const double Dp1 = static_cast<double>(D + 1);
  Matrix B = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Node v = 0; v < n; ++v) {
    Vector x = Distribution::point(n, v).vec();
    for (std::size_t t = 0; t <= D; ++t) {
      if (t > 0) x = per_node[v].step(t).mat() * x;
      B.col(static_cast<Eigen::Index>(v)) += x / Dp1;
    }
  }
  const double alpha = pi.min() / 2.0;
  double gamma = params.gamma;
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1)");
  std::string last_failure;
  for (std::size_t attempt = 0; attempt <= params.max_halvings; ++attempt, gamma /= 2.0) {
    const double m = 1.0 / (1.0 + Dp1 * gamma);
    const Matrix M = m * I + (Dp1 * gamma * m) * B;
    Vector pt = M.partialPivLu().solve(pi.vec());
    if (pt.minCoeff() < alpha) {
      last_failure = "pi~ falls below pi_min/2";
      continue;
    }
    pt /= pt.sum();
    const Distribution pi_tilde(pt);
    const Vector y = (pt - gamma * pi.vec()) / (1.0 - gamma) - P.mat() * pt;
    TreeCorrection corr;
    try {
      corr = spanning_tree_correction(g, P, pi_tilde, y);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NegativeEntry) throw;
      last_failure = e.what();
      continue;
    }
    const Matrix P_tilde = (P.mat() + corr.P_prime).cwiseMax(0.0);
    LiftMetadata m_meta = meta;
    m_meta.params["variant"] = 2;
    m_meta.params["gamma"] = gamma;
    m_meta.params["gamma_requested"] = params.gamma;
    m_meta.params["beta"] = corr.beta;
    Lift full = finish(detail::node_clock_matrix(g, per_node, pi, P_tilde, gamma), m_meta);
    Lift pruned = prune_unreachable(full);
    if (!is_irreducible(pruned.A()))
      throw Error(ErrorCode::ReducibleChain, "pruned diameter mixer is not irreducible");
    return pruned;
  }
  throw Error(ErrorCode::GammaTooLarge, "no admissible gamma after halving: " + last_failure);
}

// -- worked examples ------------------------------------------------------------------------

/// Lift of the cycle on 2N nodes (s, k), index s N + k with s = 0 for the
/// +1 direction and s = 1 for -1. A walker moves one step in its current
/// direction and keeps it with probability 1 - 1/N. With holding > 0 it first
/// stays put with that probability (the plain lift is periodic for even N).
inline Lift diaconis_cycle_lift(std::size_t N, double holding = 0.0) {
  if (N < 4 || N % 2 != 0) throw Error(ErrorCode::BadSize, "diaconis_cycle_lift needs even N >= 4");
  if (!(holding >= 0.0 && holding < 1.0)) throw Error(ErrorCode::BadSize, "holding must lie in [0, 1)");
  const double keep = 1.0 - 1.0 / static_cast<double>(N);
  const double flip = 1.0 / static_cast<double>(N);
  const auto total = static_cast<Eigen::Index>(2 * N);
  Matrix A = Matrix::Zero(total, total);
  std::vector<Node> proj(2 * N);
  for (std::size_t s = 0; s < 2; ++s)
    for (Node k = 0; k < N; ++k) {
      const auto from = static_cast<Eigen::Index>(s * N + k);
      const Node next = s == 0 ? (k + 1) % N : (k + N - 1) % N;
      proj[s * N + k] = k;
      A(static_cast<Eigen::Index>(s * N + next), from) += (1.0 - holding) * keep;
      A(static_cast<Eigen::Index>((1 - s) * N + next), from) += (1.0 - holding) * flip;
      A(from, from) += holding;
    }
  return Lift(cycle_graph(N), LiftMap(N, std::move(proj)), std::move(A), std::nullopt,
              {"diaconis", {{"N", static_cast<double>(N)}, {"holding", holding}}});
}

struct FourCycleLift {
  Lift lift;
  StochasticMatrix reference;
  double phi = 0.0;
  double epsilon = 0.0;
};

/// Twelve-node lift of cycle(4), nodes (s, v) at index 4 s + v:
///   (0, v) -> (1, v +- 1) with 1/2 each;
///   (1, v) -> (2, v) with 1/2, (2, v +- 1) with 1/4 each;
///   (2, v) -> (0, v) with gamma, and inside layer 2 along {0,1},{2,3} with
///   (1-gamma) eps, along {0,3},{1,2} with (1-gamma)(1-eps).
/// The reference chain holds with phi and moves along {0,1},{2,3} with
/// (1-phi) delta, along {0,3},{1,2} with (1-phi)(1-delta).
inline FourCycleLift four_cycle_lift(double delta, double gamma) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::BadSize, "delta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1)");
  const double target = (1.0 + gamma / 2.0) / (1.0 - gamma) * (1.0 - 2.0 * delta);
  if (!(std::abs(target) < 1.0)) throw Error(ErrorCode::GammaTooLargeForDelta, "no epsilon in (0, 1) for this gamma");
  FourCycleLift out;
  out.phi = (1.5 * gamma) / (1.0 + 2.0 * gamma);
  out.epsilon = (1.0 - target) / 2.0;
  auto partner_eps = [](Node v) -> Node { return v ^ 1U; };          // 0-1, 2-3
  auto partner_rest = [](Node v) -> Node { return 3 - v; };          // 0-3, 1-2
  auto at = [](std::size_t s, Node v) { return static_cast<Eigen::Index>(4 * s + (v % 4)); };
  Matrix A = Matrix::Zero(12, 12);
  for (Node v = 0; v < 4; ++v) {
    A(at(1, v + 1), at(0, v)) += 0.5;
    A(at(1, v + 3), at(0, v)) += 0.5;
    A(at(2, v), at(1, v)) += 0.5;
    A(at(2, v + 1), at(1, v)) += 0.25;
    A(at(2, v + 3), at(1, v)) += 0.25;
    A(at(0, v), at(2, v)) += gamma;
    A(at(2, partner_eps(v)), at(2, v)) += (1.0 - gamma) * out.epsilon;
    A(at(2, partner_rest(v)), at(2, v)) += (1.0 - gamma) * (1.0 - out.epsilon);
  }
  Matrix P = Matrix::Zero(4, 4);
  for (Node v = 0; v < 4; ++v) {
    P(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) = out.phi;
    P(static_cast<Eigen::Index>(partner_eps(v)), static_cast<Eigen::Index>(v)) = (1.0 - out.phi) * delta;
    P(static_cast<Eigen::Index>(partner_rest(v)), static_cast<Eigen::Index>(v)) = (1.0 - out.phi) * (1.0 - delta);
  }
  Matrix F = Matrix::Zero(12, 4);
  F.topRows(4).setIdentity();
  const Graph g = cycle_graph(4);
  out.reference = StochasticMatrix(std::move(P), std::make_shared<const Graph>(g));
  out.lift = Lift(g, LiftMap(4, detail::layered_projection(3, 4)), std::move(A), std::move(F),
                  {"four-cycle", {{"delta", delta}, {"gamma", gamma}, {"phi", out.phi}, {"epsilon", out.epsilon}}});
  return out;
}

/// k copies of P; a step picks the destination copy uniformly, so every
/// member of a fiber pushes the same mass into every other fiber.
inline Lift si_replicated_lift(const StochasticMatrix& P, std::size_t copies) {
  if (copies < 1) throw Error(ErrorCode::BadSize, "need at least one copy");
  const std::size_t n = P.size();
  const Graph base = P.locality() ? *P.locality() : support_graph(P.mat());
  const auto total = static_cast<Eigen::Index>(copies * n);
  Matrix A = Matrix::Zero(total, total);
  for (std::size_t a = 0; a < copies; ++a)
    for (std::size_t b = 0; b < copies; ++b) detail::put_block(A, a, b, n, P.mat(), 1.0 / static_cast<double>(copies));
  if (copies == 1) A = P.mat();
  return Lift(base, LiftMap(n, detail::layered_projection(copies, n)), std::move(A), std::nullopt,
              {"si-replicated", {{"copies", static_cast<double>(copies)}}});
}

}  // namespace liftmix
