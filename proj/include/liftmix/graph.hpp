#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "liftmix/distribution.hpp"
#include "liftmix/error.hpp"
#include "liftmix/random.hpp"

namespace liftmix {

using Node = std::size_t;
using Arc = std::pair<Node, Node>;

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Directed graph on nodes 0..n-1. Self-arcs are never stored: a chain may
/// always keep mass in place, so only off-diagonal transitions are checked
/// against the arc set.
class Graph {
 public:
  Graph() = default;

  /// Undirected edge lists expand to both ordered arcs. Self-loops in the
  /// input are dropped, duplicates merged.
  Graph(std::size_t n, const std::vector<Arc>& edges, bool directed = false)
      : n_(n), out_(n), in_(n), undirected_input_(!directed) {
    for (auto [i, j] : edges) {
      if (i >= n || j >= n)
        throw Error(ErrorCode::BadArc, "arc (" + std::to_string(i) + "," + std::to_string(j) +
                                           ") outside [0," + std::to_string(n) + ")");
      if (i == j) continue;
      out_[i].push_back(j);
      if (!directed) out_[j].push_back(i);
    }
    for (auto& adj : out_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (Node i = 0; i < n_; ++i)
      for (Node j : out_[i]) in_[j].push_back(i);
  }

  std::size_t size() const { return n_; }
  bool undirected_input() const { return undirected_input_; }

  const std::vector<Node>& out(Node i) const { return out_[i]; }
  const std::vector<Node>& in(Node j) const { return in_[j]; }

  bool has_arc(Node i, Node j) const {
    return i < n_ && std::binary_search(out_[i].begin(), out_[i].end(), j);
  }

  /// True when i -> j is a legal one-step transition (an arc or staying put).
  bool allows(Node i, Node j) const { return i == j || has_arc(i, j); }

  std::size_t arc_count() const {
    std::size_t c = 0;
    for (const auto& adj : out_) c += adj.size();
    return c;
  }

  std::vector<Arc> arcs() const {
    std::vector<Arc> result;
    for (Node i = 0; i < n_; ++i)
      for (Node j : out_[i]) result.emplace_back(i, j);
    return result;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.out_ == b.out_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Node>> out_;
  std::vector<std::vector<Node>> in_;
  bool undirected_input_ = true;
};

/// BFS hop counts from `source` along arcs (reverse arcs when `reverse`).
inline std::vector<std::size_t> bfs_distances(const Graph& g, Node source, bool reverse = false) {
  std::vector<std::size_t> dist(g.size(), kUnreachable);
  std::deque<Node> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    Node u = queue.front();
    queue.pop_front();
    for (Node v : reverse ? g.in(u) : g.out(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline bool is_strongly_connected(const Graph& g) {
  if (g.size() == 0) return false;
  auto fwd = bfs_distances(g, 0);
  auto bwd = bfs_distances(g, 0, true);
  return std::none_of(fwd.begin(), fwd.end(), [](auto d) { return d == kUnreachable; }) &&
         std::none_of(bwd.begin(), bwd.end(), [](auto d) { return d == kUnreachable; });
}

/// All-pairs hop distances, dist[i][j] = d(i -> j).
inline std::vector<std::vector<std::size_t>> distance_table(const Graph& g) {
  std::vector<std::vector<std::size_t>> table(g.size());
  for (Node i = 0; i < g.size(); ++i) {
    table[i] = bfs_distances(g, i);
    for (auto d : table[i])
      if (d == kUnreachable) throw Error(ErrorCode::DisconnectedGraph, "graph is not strongly connected");
  }
  return table;
}

inline std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (const auto& row : distance_table(g))
    for (auto d : row) best = std::max(best, d);
  return best;
}

/// Minimal-length node sequence from i to j. Among shortest paths the one
/// choosing the lowest-index next node at every hop is returned.
inline std::vector<Node> shortest_path(const Graph& g, Node i, Node j) {
  if (i >= g.size() || j >= g.size()) throw Error(ErrorCode::BadArc, "endpoint outside graph");
  if (!is_strongly_connected(g)) throw Error(ErrorCode::DisconnectedGraph, "graph is not strongly connected");
  const auto to_target = bfs_distances(g, j, /*reverse=*/true);
  std::vector<Node> path{i};
  Node cur = i;
  while (cur != j) {
    for (Node next : g.out(cur)) {  // sorted ascending
      if (to_target[next] + 1 == to_target[cur]) {
        cur = next;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

struct SpanningTree {
  Node root = 0;
  std::vector<Node> parent;        // parent[root] == root
  std::vector<Node> leaves_first;  // every node appears after all of its children
};

/// Tree in which each non-root node points at its parent through an allowed
/// (node, parent) pair. Built by BFS outward from the root; ties go to the
/// lowest node index.
inline SpanningTree rooted_spanning_tree(const Graph& g, const std::function<bool(Node, Node)>& allowed,
                                         Node root) {
  const std::size_t n = g.size();
  if (root >= n) throw Error(ErrorCode::BadArc, "root outside graph");
  SpanningTree tree;
  tree.root = root;
  tree.parent.assign(n, kUnreachable);
  tree.parent[root] = root;
  std::vector<Node> order{root};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Node u = order[head];
    for (Node v = 0; v < n; ++v) {
      if (tree.parent[v] == kUnreachable && allowed(v, u)) {
        tree.parent[v] = u;
        order.push_back(v);
      }
    }
  }
  if (order.size() != n)
    throw Error(ErrorCode::NoSpanningTree, std::to_string(n - order.size()) + " nodes cannot reach the root");
  tree.leaves_first.assign(order.rbegin(), order.rend());
  return tree;
}

/// Subset X of the nodes (bit k set <=> node k in X) and its weight pi(X).
struct Cut {
  std::uint32_t member_mask = 0;
  double weight = 0.0;

  bool contains(Node k) const { return (member_mask >> k) & 1U; }

  std::vector<Node> members() const {
    std::vector<Node> result;
    for (Node k = 0; k < 32; ++k)
      if (contains(k)) result.push_back(k);
    return result;
  }

  static Cut of(const std::vector<Node>& nodes, const Distribution& pi) {
    Cut c;
    for (Node k : nodes) c.member_mask |= 1U << k;
    for (Node k : nodes) c.weight += pi[k];
    return c;
  }
};

inline constexpr std::size_t kMaxCutNodes = 24;

/// Nonempty proper subsets with pi(X) <= 1/2, in increasing mask order. The
/// weight test uses a relative slack of 1e-12 so exact halves survive rounding.
inline std::vector<Cut> enumerate_cuts(const Graph& g, const Distribution& pi) {
  const std::size_t n = g.size();
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "pi length differs from node count");
  if (n > kMaxCutNodes) throw Error(ErrorCode::TooManyNodes, std::to_string(n) + " > 24 nodes");
  std::vector<Cut> cuts;
  const std::uint32_t full = (1U << n) - 1U;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double w = 0.0;
    for (std::uint32_t m = mask; m != 0; m &= m - 1) w += pi[static_cast<std::size_t>(std::countr_zero(m))];
    if (w <= 0.5 + 1e-12) cuts.push_back({mask, w});
  }
  return cuts;
}

// -- builders ---------------------------------------------------------------

inline Graph path_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::BadSize, "path needs n >= 2");
  std::vector<Arc> edges;
  for (Node i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

inline Graph cycle_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::BadSize, "cycle needs n >= 2");
  std::vector<Arc> edges;
  for (Node i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, edges);
}

inline Graph complete_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::BadSize, "complete graph needs n >= 2");
  std::vector<Arc> edges;
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, edges);
}

/// Two cliques on n_half nodes joined by the edge (n_half-1, n_half).
inline Graph barbell_graph(std::size_t n_half) {
  if (n_half < 2) throw Error(ErrorCode::BadSize, "barbell needs n_half >= 2");
  std::vector<Arc> edges;
  for (std::size_t side = 0; side < 2; ++side) {
    const Node base = side * n_half;
    for (Node i = 0; i < n_half; ++i)
      for (Node j = i + 1; j < n_half; ++j) edges.emplace_back(base + i, base + j);
  }
  edges.emplace_back(n_half - 1, n_half);
  return Graph(2 * n_half, edges);
}

/// Random connected undirected graph: a random recursive tree plus each
/// remaining pair independently with probability `extra_edge_prob`.
inline Graph random_connected_graph(std::size_t n, double extra_edge_prob, Rng& rng) {
  if (n < 2) throw Error(ErrorCode::BadSize, "random graph needs n >= 2");
  std::vector<Node> order(n);
  for (Node i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  std::vector<Arc> edges;
  for (std::size_t k = 1; k < n; ++k)
    edges.emplace_back(order[k], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(k) - 1))]);
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j)
      if (rng.bernoulli(extra_edge_prob)) edges.emplace_back(i, j);
  return Graph(n, edges);
}

}  // namespace liftmix
