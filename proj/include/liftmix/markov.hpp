#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "liftmix/distribution.hpp"
#include "liftmix/error.hpp"
#include "liftmix/graph.hpp"
#include "liftmix/random.hpp"

namespace liftmix {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

inline constexpr double kStochasticTol = 1e-6;  // allowed column-sum drift before renormalizing
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kStationaryTol = 1e-9;

/// Column-stochastic matrix: entry (j, i) is the probability of moving i -> j.
/// Columns are renormalized on construction; a column off by more than 1e-6
/// is rejected. When a locality graph is attached, every nonzero off-diagonal
/// entry (j, i) must correspond to an arc i -> j.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;

  explicit StochasticMatrix(Matrix entries, std::shared_ptr<const Graph> locality = nullptr)
      : m_(std::move(entries)), locality_(std::move(locality)) {
    if (m_.rows() != m_.cols()) throw Error(ErrorCode::DimensionMismatch, "stochastic matrix must be square");
    if (m_.rows() == 0) throw Error(ErrorCode::BadSize, "empty stochastic matrix");
    for (Eigen::Index i = 0; i < m_.cols(); ++i) {
      for (Eigen::Index j = 0; j < m_.rows(); ++j) {
        double& v = m_(j, i);
        if (!std::isfinite(v) || v < -kClampTol || v > 1.0 + kClampTol)
          throw Error(ErrorCode::NotStochastic, "entry (" + std::to_string(j) + "," + std::to_string(i) +
                                                    ") = " + std::to_string(v) + " outside [0,1]");
        v = std::clamp(v, 0.0, 1.0);
      }
      const double s = m_.col(i).sum();
      if (std::abs(s - 1.0) > kStochasticTol)
        throw Error(ErrorCode::NotStochastic, "column " + std::to_string(i) + " sums to " + std::to_string(s));
      m_.col(i) /= s;
    }
    if (locality_) {
      if (locality_->size() != size())
        throw Error(ErrorCode::DimensionMismatch, "locality graph size differs from matrix size");
      for (Eigen::Index i = 0; i < m_.cols(); ++i)
        for (Eigen::Index j = 0; j < m_.rows(); ++j)
          if (i != j && m_(j, i) != 0.0 &&
              !locality_->has_arc(static_cast<Node>(i), static_cast<Node>(j)))
            throw Error(ErrorCode::LocalityViolation,
                        "transition " + std::to_string(i) + " -> " + std::to_string(j) + " has no arc");
    }
  }

  static StochasticMatrix identity(std::size_t n, std::shared_ptr<const Graph> locality = nullptr) {
    return StochasticMatrix(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                            std::move(locality));
  }

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t j, std::size_t i) const {
    return m_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  }
  const Matrix& mat() const { return m_; }
  const std::shared_ptr<const Graph>& locality() const { return locality_; }

  SparseMatrix sparse() const { return m_.sparseView(); }

 private:
  Matrix m_;
  std::shared_ptr<const Graph> locality_;
};

/// Finite sequence P(1), ..., P(T) over one node set (a stochastic bridge when
/// it steers a source distribution onto a target).
class TimeVaryingChain {
 public:
  TimeVaryingChain() = default;

  explicit TimeVaryingChain(std::vector<StochasticMatrix> steps) : steps_(std::move(steps)) {
    for (const auto& s : steps_) {
      if (s.size() != steps_.front().size())
        throw Error(ErrorCode::DimensionMismatch, "chain steps differ in dimension");
      const auto& a = s.locality();
      const auto& b = steps_.front().locality();
      if (static_cast<bool>(a) != static_cast<bool>(b) || (a && !(*a == *b)))
        throw Error(ErrorCode::DimensionMismatch, "chain steps differ in locality graph");
    }
  }

  std::size_t length() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  std::size_t dimension() const { return steps_.empty() ? 0 : steps_.front().size(); }

  /// P(t), 1-based as in p(t) = P(t) p(t-1).
  const StochasticMatrix& step(std::size_t t) const { return steps_.at(t - 1); }
  const std::vector<StochasticMatrix>& steps() const { return steps_; }

  /// P(t)...P(1) p, for t <= length().
  Vector apply(const Vector& p, std::size_t t) const {
    Vector x = p;
    for (std::size_t s = 1; s <= t; ++s) x = step(s).mat() * x;
    return x;
  }

 private:
  std::vector<StochasticMatrix> steps_;
};

// -- basic quantities --------------------------------------------------------

inline double tv_distance(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "tv_distance on unequal lengths");
  return 0.5 * (p - q).cwiseAbs().sum();
}

inline double tv_distance(const Distribution& p, const Distribution& q) { return tv_distance(p.vec(), q.vec()); }

inline Distribution evolve(const StochasticMatrix& P, const Distribution& p, std::size_t t) {
  if (P.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "evolve: matrix and vector sizes differ");
  Vector x = p.vec();
  for (std::size_t s = 0; s < t; ++s) x = Distribution(P.mat() * x).vec();
  return Distribution(std::move(x));
}

/// Out-neighbours in the support digraph (entries above 1e-12).
inline Graph support_graph(const Matrix& m) {
  std::vector<Arc> arcs;
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      if (i != j && m(j, i) > kSupportTol) arcs.emplace_back(static_cast<Node>(i), static_cast<Node>(j));
  return Graph(static_cast<std::size_t>(m.rows()), arcs, /*directed=*/true);
}

inline bool is_irreducible(const StochasticMatrix& P) {
  return P.size() == 1 || is_strongly_connected(support_graph(P.mat()));
}

inline double stationarity_residual(const Matrix& P, const Vector& pi) { return (P * pi - pi).cwiseAbs().sum(); }

/// Unique fixed point of an irreducible chain, from the linear system
/// (P - I) pi = 0 with one balance row replaced by the normalization.
inline Distribution stationary(const StochasticMatrix& P) {
  if (!is_irreducible(P)) throw Error(ErrorCode::ReducibleChain, "stationary() needs an irreducible chain");
  const auto n = static_cast<Eigen::Index>(P.size());
  Matrix M = P.mat() - Matrix::Identity(n, n);
  M.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::PartialPivLU<Matrix> lu(M);
  Vector pi = lu.solve(rhs);
  pi += lu.solve(rhs - M * pi);  // one refinement pass
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  if (stationarity_residual(P.mat(), pi) > 1e-10)
    throw Error(ErrorCode::NoConvergence, "stationary solve residual too large");
  return Distribution(std::move(pi));
}

inline Matrix ergodic_flows(const StochasticMatrix& P, const Distribution& pi) {
  if (P.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "ergodic_flows: sizes differ");
  return P.mat() * pi.vec().asDiagonal();
}

// -- mixing times --------------------------------------------------------------

/// Number of steps, or nullopt for "Unmixed".
using MixTime = std::optional<std::size_t>;

inline std::size_t default_t_max(std::size_t n) { return std::max<std::size_t>(100, 50 * n); }

namespace detail {

// Earliest t such that distance(x_s) <= eps for every s in [t, t_max], where
// x_{s+1} = A x_s and distance is 1-Lipschitz in l1/2 (TV of x or of a
// projection of x). Two shortcuts decide the horizon before t_max:
//  - contraction: |x_{s+k} - x_s|_1 <= k |x_{s+1} - x_s|_1, so the distance
//    moves by at most (t_max - s) * inc / 2 before t_max;
//  - recurrence: once x_s = x_{s-k}, the last k distances repeat forever
//    (clock-type lifts cycle exactly instead of contracting).
inline constexpr std::size_t kMaxDetectedPeriod = 64;
inline constexpr double kRecurrenceTol = 1e-13;

inline bool l1_close(const Vector& a, const Vector& b, double tol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    acc += std::abs(a[i] - b[i]);
    if (acc > tol) return false;
  }
  return true;
}

template <class Distance>
MixTime settle_time(const SparseMatrix& A, Vector x, std::size_t t_max, double eps, Distance&& distance) {
  std::optional<std::size_t> last_bad;
  std::vector<Vector> ring(kMaxDetectedPeriod);
  std::vector<double> ring_d(kMaxDetectedPeriod, 0.0);
  for (std::size_t t = 0;; ++t) {
    const double d = distance(x);
    if (d > eps) last_bad = t;
    if (t == t_max) break;
    for (std::size_t k = 1; k <= std::min(t, kMaxDetectedPeriod); ++k) {
      const std::size_t slot = (t - k) % kMaxDetectedPeriod;
      if (!l1_close(ring[slot], x, kRecurrenceTol)) continue;
      // x_{t+j} = x_{t-k+j}: distance values of steps t-k .. t-1 recur at t .. t+k-1, t+k ...
      for (std::size_t j = 0; j < k && t + j <= t_max; ++j)
        if (ring_d[(t - k + j) % kMaxDetectedPeriod] > eps) return std::nullopt;
      if (!last_bad) return 0;
      return *last_bad + 1;
    }
    ring[t % kMaxDetectedPeriod] = x;
    ring_d[t % kMaxDetectedPeriod] = d;
    Vector next = A * x;
    const double slack = 0.5 * static_cast<double>(t_max - t) * (next - x).cwiseAbs().sum();
    if (d + slack <= eps) break;                   // never exceeds eps again
    if (d - slack > eps) return std::nullopt;       // still above eps at t_max
    x = std::move(next);
  }
  if (!last_bad) return 0;
  if (*last_bad >= t_max) return std::nullopt;
  return *last_bad + 1;
}

}  // namespace detail

/// Worst case over vertex starts e_i of the time after which the chain stays
/// within eps of pi up to t_max. Vertex starts suffice: TV to pi is convex in
/// the initial distribution.
inline MixTime mixing_time(const StochasticMatrix& P, const Distribution& pi, double eps,
                           std::optional<std::size_t> t_max = std::nullopt) {
  if (P.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "mixing_time: sizes differ");
  if (stationarity_residual(P.mat(), pi.vec()) > kStationaryTol)
    throw Error(ErrorCode::NotStationary, "P pi != pi");
  const std::size_t horizon = t_max.value_or(default_t_max(P.size()));
  const SparseMatrix A = P.sparse();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    auto t = detail::settle_time(A, Distribution::point(P.size(), i).vec(), horizon, eps,
                                 [&](const Vector& x) { return tv_distance(x, pi.vec()); });
    if (!t) return std::nullopt;
    worst = std::max(worst, *t);
  }
  return worst;
}

// -- chain builders --------------------------------------------------------------

/// Metropolis chain for target pi with uniform neighbour proposals, holding
/// with probability `laziness` before proposing. On a cycle with uniform pi
/// and laziness 1/2 this is the lazy simple walk (1/2 stay, 1/4 each side).
inline StochasticMatrix metropolis_chain(const Graph& g, const Distribution& pi, double laziness = 0.5) {
  const std::size_t n = g.size();
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "metropolis_chain: pi length");
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Node i = 0; i < n; ++i) {
    const double di = static_cast<double>(g.out(i).size());
    double moved = 0.0;
    for (Node j : g.out(i)) {
      if (!g.has_arc(j, i)) throw Error(ErrorCode::BadArc, "metropolis_chain needs symmetric arcs");
      const double dj = static_cast<double>(g.out(j).size());
      const double p = (1.0 - laziness) * std::min(1.0 / di, pi[j] / (pi[i] * dj));
      P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p;
      moved += p;
    }
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 - moved;
  }
  return StochasticMatrix(std::move(P), std::make_shared<const Graph>(g));
}

/// Random chain on g: positive weights on every arc and the diagonal,
/// columns normalized. Irreducible whenever g is strongly connected.
inline StochasticMatrix random_chain(const Graph& g, Rng& rng) {
  const std::size_t n = g.size();
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Node i = 0; i < n; ++i) {
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = rng.uniform(0.05, 1.0);
    for (Node j : g.out(i)) P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rng.uniform(0.05, 1.0);
    P.col(static_cast<Eigen::Index>(i)) /= P.col(static_cast<Eigen::Index>(i)).sum();
  }
  return StochasticMatrix(std::move(P), std::make_shared<const Graph>(g));
}

/// Full-support distribution with weights drawn from [lo, 1], normalized.
inline Distribution random_distribution(std::size_t n, Rng& rng, double lo = 0.2) {
  Vector w(static_cast<Eigen::Index>(n));
  for (auto& v : w) v = rng.uniform(lo, 1.0);
  return Distribution::normalized(std::move(w));
}

}  // namespace liftmix
