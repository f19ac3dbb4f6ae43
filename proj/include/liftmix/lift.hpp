#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liftmix/conductance.hpp"
#include "liftmix/graph.hpp"
#include "liftmix/markov.hpp"

namespace liftmix {

inline constexpr double kInvarianceTol = 1e-9;
inline constexpr double kLiftStationaryTol = 1e-8;

/// Projection c from lifted nodes onto base nodes, with its fibers c^-1(k).
class LiftMap {
 public:
  LiftMap() = default;

  LiftMap(std::size_t base_n, std::vector<Node> projection)
      : base_n_(base_n), projection_(std::move(projection)), fibers_(base_n) {
    for (Node l = 0; l < projection_.size(); ++l) {
      if (projection_[l] >= base_n_)
        throw Error(ErrorCode::BadLift, "lifted node " + std::to_string(l) + " projects outside the base graph");
      fibers_[projection_[l]].push_back(l);
    }
    for (Node k = 0; k < base_n_; ++k)
      if (fibers_[k].empty()) throw Error(ErrorCode::BadLift, "base node " + std::to_string(k) + " has an empty fiber");
  }

  std::size_t base_n() const { return base_n_; }
  std::size_t lifted_n() const { return projection_.size(); }
  Node operator()(Node lifted) const { return projection_[lifted]; }
  const std::vector<Node>& projection() const { return projection_; }
  const std::vector<Node>& fiber(Node k) const { return fibers_[k]; }

  /// The 0/1 matrix C with C(k, l) = 1 iff c(l) = k.
  Matrix C() const {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(base_n_), static_cast<Eigen::Index>(lifted_n()));
    for (Node l = 0; l < lifted_n(); ++l) c(static_cast<Eigen::Index>(projection_[l]), static_cast<Eigen::Index>(l)) = 1.0;
    return c;
  }

  /// Fiber sums, p = C x.
  Vector collapse(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != lifted_n())
      throw Error(ErrorCode::DimensionMismatch, "lifted vector has the wrong length");
    Vector p = Vector::Zero(static_cast<Eigen::Index>(base_n_));
    for (Node l = 0; l < lifted_n(); ++l) p[static_cast<Eigen::Index>(projection_[l])] += x[static_cast<Eigen::Index>(l)];
    return p;
  }

  /// Fiber-block sums of a lifted matrix: out(i, j) = sum of M(l, k) over
  /// l in c^-1(i), k in c^-1(j).
  Matrix collapse_both(const Matrix& M) const {
    Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(base_n_), M.cols());
    for (Node l = 0; l < lifted_n(); ++l) rows.row(static_cast<Eigen::Index>(projection_[l])) += M.row(static_cast<Eigen::Index>(l));
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(base_n_), static_cast<Eigen::Index>(base_n_));
    for (Node k = 0; k < lifted_n(); ++k) out.col(static_cast<Eigen::Index>(projection_[k])) += rows.col(static_cast<Eigen::Index>(k));
    return out;
  }

  friend bool operator==(const LiftMap& a, const LiftMap& b) {
    return a.base_n_ == b.base_n_ && a.projection_ == b.projection_;
  }

 private:
  std::size_t base_n_ = 0;
  std::vector<Node> projection_;
  std::vector<std::vector<Node>> fibers_;
};

/// Designed initialization x(0) = F p. F is N^ x N, column-stochastic, and
/// column j is supported on the fiber of j, which is the same as C F = I.
class InitMap {
 public:
  InitMap() = default;

  InitMap(Matrix F, const LiftMap& map) : F_(std::move(F)) {
    if (static_cast<std::size_t>(F_.rows()) != map.lifted_n() || static_cast<std::size_t>(F_.cols()) != map.base_n())
      throw Error(ErrorCode::DimensionMismatch, "init map must be lifted_n x base_n");
    for (Eigen::Index j = 0; j < F_.cols(); ++j) {
      for (Eigen::Index k = 0; k < F_.rows(); ++k) {
        double& v = F_(k, j);
        if (!std::isfinite(v) || v < -kClampTol) throw Error(ErrorCode::BadLift, "init map has a negative entry");
        if (v < 0.0) v = 0.0;
        if (v != 0.0 && map(static_cast<Node>(k)) != static_cast<Node>(j))
          throw Error(ErrorCode::BadLift, "init map column " + std::to_string(j) + " leaves its fiber");
      }
      if (std::abs(F_.col(j).sum() - 1.0) > kMassTol)
        throw Error(ErrorCode::BadLift, "init map column " + std::to_string(j) + " does not sum to one");
    }
  }

  const Matrix& mat() const { return F_; }
  Vector apply(const Vector& p) const { return F_ * p; }

 private:
  Matrix F_;
};

struct LiftMetadata {
  std::string construction;
  std::map<std::string, double> params;
};

/// A lift of `base`: chain A on the lifted nodes, projection map, optional
/// init map. The lifted graph defaults to the support of A. Construction
/// checks locality on both levels: every lifted arc projects to a base arc or
/// stays inside one fiber.
class Lift {
 public:
  Lift() = default;

  Lift(Graph base, LiftMap map, Matrix A, std::optional<Matrix> F = std::nullopt, LiftMetadata metadata = {},
       std::optional<Graph> lifted = std::nullopt)
      : base_(std::make_shared<const Graph>(std::move(base))), map_(std::move(map)), metadata_(std::move(metadata)) {
    if (map_.base_n() != base_->size()) throw Error(ErrorCode::DimensionMismatch, "projection base size differs");
    if (static_cast<std::size_t>(A.rows()) != map_.lifted_n())
      throw Error(ErrorCode::DimensionMismatch, "A dimension differs from lifted node count");
    lifted_ = std::make_shared<const Graph>(lifted ? std::move(*lifted) : support_graph(A));
    if (lifted_->size() != map_.lifted_n()) throw Error(ErrorCode::DimensionMismatch, "lifted graph size differs");
    for (auto [k, l] : lifted_->arcs()) {
      const Node a = map_(k);
      const Node b = map_(l);
      if (a != b && !base_->has_arc(a, b))
        throw Error(ErrorCode::LocalityViolation, "lifted arc " + std::to_string(k) + " -> " + std::to_string(l) +
                                                      " projects to non-arc " + std::to_string(a) + " -> " +
                                                      std::to_string(b));
    }
    A_ = StochasticMatrix(std::move(A), lifted_);
    if (F) F_ = InitMap(std::move(*F), map_);
  }

  const Graph& base() const { return *base_; }
  const Graph& lifted() const { return *lifted_; }
  const std::shared_ptr<const Graph>& base_ptr() const { return base_; }
  const LiftMap& map() const { return map_; }
  const StochasticMatrix& A() const { return A_; }
  const std::optional<InitMap>& F() const { return F_; }
  const LiftMetadata& metadata() const { return metadata_; }

  std::size_t base_n() const { return map_.base_n(); }
  std::size_t lifted_n() const { return map_.lifted_n(); }

 private:
  std::shared_ptr<const Graph> base_;
  std::shared_ptr<const Graph> lifted_;
  LiftMap map_;
  StochasticMatrix A_;
  std::optional<InitMap> F_;
  LiftMetadata metadata_;
};

/// Trivial lift: every node its own fiber, A = P.
inline Lift trivial_lift(const Graph& g, const StochasticMatrix& P) {
  std::vector<Node> proj(g.size());
  for (Node i = 0; i < g.size(); ++i) proj[i] = i;
  const auto n = static_cast<Eigen::Index>(g.size());
  return Lift(g, LiftMap(g.size(), proj), P.mat(), Matrix(Matrix::Identity(n, n)), {"trivial", {}});
}

/// Re-checks the invariants a Lift establishes at construction: A column
/// stochastic and local to the lifted graph, lifted arcs local to the base,
/// and C F = I. Returns the largest deviation found.
inline double validate_lift(const Lift& L) {
  double worst = 0.0;
  const Matrix& A = L.A().mat();
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    worst = std::max(worst, std::abs(A.col(i).sum() - 1.0));
    if (A.col(i).minCoeff() < 0.0) throw Error(ErrorCode::NotStochastic, "negative entry in A");
    for (Eigen::Index j = 0; j < A.rows(); ++j)
      if (i != j && A(j, i) != 0.0 && !L.lifted().has_arc(static_cast<Node>(i), static_cast<Node>(j)))
        throw Error(ErrorCode::LocalityViolation, "A uses a transition outside the lifted graph");
  }
  for (auto [k, l] : L.lifted().arcs())
    if (L.map()(k) != L.map()(l) && !L.base().has_arc(L.map()(k), L.map()(l)))
      throw Error(ErrorCode::LocalityViolation, "lifted arc does not project to a base arc");
  if (L.F()) {
    const auto n = static_cast<Eigen::Index>(L.base_n());
    worst = std::max(worst, (L.map().C() * L.F()->mat() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  if (worst > kStochasticTol) throw Error(ErrorCode::BadLift, "lift invariants violated by " + std::to_string(worst));
  return worst;
}

// -- scenario flags -------------------------------------------------------------

enum class FlowConstraint { Free, Exact, Delta };

/// The five scenario letters. Lower case is the constrained variant of each
/// axis: s arbitrary initialization, i invariance imposed, m convergence of
/// the full lifted state, r irreducible lift, e ergodic flows prescribed by a
/// reference chain (exactly, or up to delta with "e:delta").
struct ScenarioSpec {
  bool arbitrary_init = true;        // s
  bool invariance_required = false;  // i
  bool full_convergence = false;     // m
  bool irreducible_required = false; // r
  FlowConstraint flows = FlowConstraint::Free;
  double delta = 0.0;
  std::optional<StochasticMatrix> reference_chain;

  static constexpr double kExactFlowTol = 1e-8;

  static ScenarioSpec parse(std::string_view text) {
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::BadScenario, "scenario '" + std::string(text) + "': " + why);
    };
    if (text.size() < 5) throw bad("need five letters");
    ScenarioSpec s;
    auto pick = [&](char c, char upper, char lower) {
      if (c == upper) return false;
      if (c == lower) return true;
      throw bad(std::string("expected ") + upper + " or " + lower);
    };
    s.arbitrary_init = pick(text[0], 'S', 's');
    s.invariance_required = pick(text[1], 'I', 'i');
    s.full_convergence = pick(text[2], 'M', 'm');
    s.irreducible_required = pick(text[3], 'R', 'r');
    const char f = text[4];
    if (f == 'E') {
      if (text.size() != 5) throw bad("trailing characters after E");
      s.flows = FlowConstraint::Free;
    } else if (f == 'e') {
      if (text.size() == 5) {
        s.flows = FlowConstraint::Exact;
      } else {
        if (text[5] != ':') throw bad("expected ':' before delta");
        const std::string num(text.substr(6));
        std::size_t used = 0;
        double d = 0.0;
        try {
          d = std::stod(num, &used);
        } catch (const std::exception&) {
          throw bad("unreadable delta");
        }
        if (used != num.size() || !(d >= 0.0) || !std::isfinite(d)) throw bad("unreadable delta");
        s.flows = FlowConstraint::Delta;
        s.delta = d;
      }
    } else {
      throw bad("expected E or e");
    }
    return s;
  }

  std::string str() const {
    std::string out;
    out += arbitrary_init ? 's' : 'S';
    out += invariance_required ? 'i' : 'I';
    out += full_convergence ? 'm' : 'M';
    out += irreducible_required ? 'r' : 'R';
    out += flows == FlowConstraint::Free ? 'E' : 'e';
    if (flows == FlowConstraint::Delta) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ":%g", delta);
      out += buf;
    }
    return out;
  }

  bool flows_constrained() const { return flows != FlowConstraint::Free; }

  /// Tolerance used for flow matching; exact (e) is read as delta = 1e-8.
  double flow_tolerance() const { return flows == FlowConstraint::Delta ? delta : kExactFlowTol; }
};

enum class InitKind { Designed, Arbitrary };

// -- projections ------------------------------------------------------------------

inline Vector marginal(const Lift& L, const Vector& x) { return L.map().collapse(x); }

inline Distribution marginal(const Lift& L, const Distribution& x) {
  return Distribution(L.map().collapse(x.vec()));
}

struct ConditionalUnlift {
  StochasticMatrix P;
  std::vector<Node> uniform_columns;  // base nodes whose fiber carried no mass
};

/// P^(x) = C A B^(x), where B^(x) spreads base mass over each fiber in
/// proportion to x. Empty fibers get the uniform column.
inline ConditionalUnlift conditional_unlift(const Lift& L, const Vector& x) {
  const LiftMap& map = L.map();
  if (static_cast<std::size_t>(x.size()) != map.lifted_n())
    throw Error(ErrorCode::DimensionMismatch, "conditional_unlift: x has the wrong length");
  const Vector mass = map.collapse(x);
  Matrix B = Matrix::Zero(static_cast<Eigen::Index>(map.lifted_n()), static_cast<Eigen::Index>(map.base_n()));
  ConditionalUnlift out;
  for (Node j = 0; j < map.base_n(); ++j) {
    const auto& fib = map.fiber(j);
    const double m = mass[static_cast<Eigen::Index>(j)];
    if (m > 0.0) {
      for (Node l : fib) B(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = x[static_cast<Eigen::Index>(l)] / m;
    } else {
      out.uniform_columns.push_back(j);
      for (Node l : fib) B(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = 1.0 / static_cast<double>(fib.size());
    }
  }
  out.P = StochasticMatrix(map.C() * L.A().mat() * B, L.base_ptr());
  return out;
}

/// Collapsed stationary flows Q^_{ij} = sum over c^-1(i) x c^-1(j) of A_{lk} pi^_k.
inline Matrix collapsed_flows(const Lift& L, const Distribution& pi_hat) {
  if (pi_hat.size() != L.lifted_n()) throw Error(ErrorCode::DimensionMismatch, "pi_hat has the wrong length");
  return L.map().collapse_both(L.A().mat() * pi_hat.vec().asDiagonal());
}

/// P~_{ij} = Q^_{ij} / pi_j with pi = C pi^.
inline StochasticMatrix induced_chain(const Lift& L, const Distribution& pi_hat) {
  if (pi_hat.size() != L.lifted_n()) throw Error(ErrorCode::DimensionMismatch, "pi_hat has the wrong length");
  if (stationarity_residual(L.A().mat(), pi_hat.vec()) > kLiftStationaryTol)
    throw Error(ErrorCode::NotStationary, "A pi_hat != pi_hat");
  const Vector pi = L.map().collapse(pi_hat.vec());
  if (pi.minCoeff() <= 0.0) throw Error(ErrorCode::ZeroMarginalSupport, "marginal of pi_hat misses a base node");
  Matrix Q = collapsed_flows(L, pi_hat);
  for (Eigen::Index j = 0; j < Q.cols(); ++j) Q.col(j) /= pi[j];
  return StochasticMatrix(std::move(Q), L.base_ptr());
}

/// A stationary distribution of A reached from `seed`: the Cesaro limit of
/// A^t seed. For irreducible A this is the unique stationary distribution.
/// Otherwise the lazy iteration y <- (y + A y)/2 is run; it has the same limit
/// as the Cesaro average (both are the projection of the seed onto the
/// eigenvalue-1 eigenspace) and converges geometrically even when A is
/// periodic.
inline Distribution lifted_stationary(const Lift& L, const Distribution& seed, std::size_t max_steps = 100000) {
  if (seed.size() != L.lifted_n()) throw Error(ErrorCode::DimensionMismatch, "seed has the wrong length");
  if (is_irreducible(L.A())) return stationary(L.A());
  const SparseMatrix A = L.A().sparse();
  Vector y = seed.vec();
  for (std::size_t s = 0; s < max_steps; ++s) {
    Vector Ay = A * y;
    const double r = (Ay - y).cwiseAbs().sum();
    if (r <= 1e-12) {
      y = y.cwiseMax(0.0);
      return Distribution(y / y.sum());
    }
    y = 0.5 * (y + Ay);
  }
  throw Error(ErrorCode::NoConvergence, "lifted_stationary did not settle within the step cap");
}

// -- invariance ---------------------------------------------------------------------

struct InvarianceResult {
  bool ok = true;
  double max_deviation = 0.0;       // largest entry of |C A x - pi| or of a fiber-pair difference
  std::optional<Vector> witness;    // initialization with C x = pi whose next marginal is not pi
};

/// Largest |C A (e_j - e_j')| entry over same-fiber pairs (j, j').
inline double fiber_pair_deviation(const Lift& L) {
  const Matrix CA = L.map().C() * L.A().mat();
  double worst = 0.0;
  for (Node k = 0; k < L.base_n(); ++k) {
    const auto& fib = L.map().fiber(k);
    for (std::size_t a = 1; a < fib.size(); ++a)
      worst = std::max(worst, (CA.col(static_cast<Eigen::Index>(fib[a])) - CA.col(static_cast<Eigen::Index>(fib[0])))
                                  .cwiseAbs()
                                  .maxCoeff());
  }
  return worst;
}

/// Initialization with C x = pi that starves base node `target`: in every
/// fiber all mass sits on the member sending the least mass into c^-1(target)
/// (lowest index among ties).
inline Vector min_inflow_witness(const Lift& L, const Distribution& pi, Node target) {
  if (pi.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  const Matrix CA = L.map().C() * L.A().mat();
  Vector x = Vector::Zero(static_cast<Eigen::Index>(L.lifted_n()));
  for (Node i = 0; i < L.base_n(); ++i) {
    Node best = L.map().fiber(i).front();
    for (Node l : L.map().fiber(i))
      if (CA(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(l)) <
          CA(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(best)))
        best = l;
    x[static_cast<Eigen::Index>(best)] = pi[i];
  }
  return x;
}

/// Invariance of pi under the lift. Arbitrary initialization: C A x = pi must
/// hold on the whole affine set {x : C x = pi}, which is spanned by one point
/// x* and the same-fiber differences e_j - e_j'. Designed initialization: the
/// only admissible start is F pi, followed for `horizon` steps.
inline InvarianceResult check_invariance(const Lift& L, const Distribution& pi, InitKind init,
                                         std::size_t horizon = 1) {
  if (horizon < 1) throw Error(ErrorCode::BadSize, "check_invariance needs horizon >= 1");
  if (pi.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  InvarianceResult r;
  if (init == InitKind::Designed) {
    if (!L.F()) throw Error(ErrorCode::MissingInitMap, "designed initialization needs an init map");
    Vector x = L.F()->apply(pi.vec());
    const Vector x0 = x;
    for (std::size_t t = 1; t <= horizon; ++t) {
      x = L.A().mat() * x;
      r.max_deviation = std::max(r.max_deviation, tv_distance(L.map().collapse(x), pi.vec()));
    }
    r.ok = r.max_deviation <= kInvarianceTol;
    if (!r.ok) r.witness = x0;
    return r;
  }
  Vector x_star = Vector::Zero(static_cast<Eigen::Index>(L.lifted_n()));
  for (Node k = 0; k < L.base_n(); ++k) x_star[static_cast<Eigen::Index>(L.map().fiber(k).front())] = pi[k];
  const Vector next = L.map().collapse(L.A().mat() * x_star);
  r.max_deviation = std::max(fiber_pair_deviation(L), (next - pi.vec()).cwiseAbs().maxCoeff());
  r.ok = r.max_deviation <= kInvarianceTol;
  if (!r.ok) {
    Node worst_target = 0;
    double worst_gap = -1.0;
    for (Node k = 0; k < L.base_n(); ++k) {
      const Vector w = min_inflow_witness(L, pi, k);
      const double gap = pi[k] - L.map().collapse(L.A().mat() * w)[static_cast<Eigen::Index>(k)];
      if (gap > worst_gap + 1e-15) {
        worst_gap = gap;
        worst_target = k;
      }
    }
    r.witness = min_inflow_witness(L, pi, worst_target);
  }
  return r;
}

// -- mixing times -------------------------------------------------------------------

inline std::vector<Vector> extreme_inits(const Lift& L, InitKind init) {
  std::vector<Vector> out;
  if (init == InitKind::Designed) {
    if (!L.F()) throw Error(ErrorCode::MissingInitMap, "designed initialization needs an init map");
    for (Node i = 0; i < L.base_n(); ++i) out.push_back(L.F()->mat().col(static_cast<Eigen::Index>(i)));
  } else {
    for (Node l = 0; l < L.lifted_n(); ++l) out.push_back(Distribution::point(L.lifted_n(), l).vec());
  }
  return out;
}

/// Settle time of the marginal of A^t x0 around pi (see detail::settle_time).
inline MixTime marginal_mixing_time_from(const Lift& L, const Vector& x0, const Distribution& pi, double eps,
                                         std::optional<std::size_t> t_max = std::nullopt) {
  if (pi.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  const std::size_t horizon = t_max.value_or(default_t_max(L.lifted_n()));
  return detail::settle_time(L.A().sparse(), x0, horizon, eps,
                             [&](const Vector& x) { return tv_distance(L.map().collapse(x), pi.vec()); });
}

/// tau_M(eps): worst case over the extreme initializations of the scenario,
/// F e_i for designed and lifted vertices e_l for arbitrary.
inline MixTime marginal_mixing_time(const Lift& L, const Distribution& pi, double eps, InitKind init,
                                    std::optional<std::size_t> t_max = std::nullopt) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadSize, "eps must lie in (0, 1)");
  if (pi.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  const std::size_t horizon = t_max.value_or(default_t_max(L.lifted_n()));
  const SparseMatrix A = L.A().sparse();
  std::size_t worst = 0;
  for (const Vector& x0 : extreme_inits(L, init)) {
    auto t = detail::settle_time(A, x0, horizon, eps,
                                 [&](const Vector& x) { return tv_distance(L.map().collapse(x), pi.vec()); });
    if (!t) return std::nullopt;
    worst = std::max(worst, *t);
  }
  return worst;
}

/// Mixing of the full lifted state: each extreme initialization x0 is compared
/// with its own limit lifted_stationary(x0). A lift whose state keeps cycling
/// never gets within eps of that limit and reports Unmixed.
inline MixTime full_mixing_time(const Lift& L, double eps, InitKind init,
                                std::optional<std::size_t> t_max = std::nullopt) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadSize, "eps must lie in (0, 1)");
  const std::size_t horizon = t_max.value_or(default_t_max(L.lifted_n()));
  const SparseMatrix A = L.A().sparse();
  const bool irreducible = is_irreducible(L.A());
  std::optional<Distribution> unique;
  if (irreducible) unique = stationary(L.A());
  std::size_t worst = 0;
  for (const Vector& x0 : extreme_inits(L, init)) {
    const Distribution limit = irreducible ? *unique : lifted_stationary(L, Distribution(x0));
    auto t = detail::settle_time(A, x0, horizon, eps, [&](const Vector& x) { return tv_distance(x, limit.vec()); });
    if (!t) return std::nullopt;
    worst = std::max(worst, *t);
  }
  return worst;
}

// -- flows and unlifting ---------------------------------------------------------------

struct FlowMatch {
  double max_dev = 0.0;
  bool ok = false;
};

/// Entrywise distance between the collapsed lifted flows and Q^(P_ref).
inline FlowMatch check_flow_match(const Lift& L, const Distribution& pi_hat, const StochasticMatrix& P_ref,
                                  double delta) {
  if (P_ref.size() != L.base_n()) throw Error(ErrorCode::DimensionMismatch, "reference chain has the wrong size");
  const Vector pi = L.map().collapse(pi_hat.vec());
  if (stationarity_residual(P_ref.mat(), pi) > kLiftStationaryTol)
    throw Error(ErrorCode::NotStationary, "reference chain is not stationary at C pi_hat");
  const Matrix Qref = P_ref.mat() * pi.asDiagonal();
  FlowMatch r;
  r.max_dev = (collapsed_flows(L, pi_hat) - Qref).cwiseAbs().maxCoeff();
  r.ok = r.max_dev <= delta;
  return r;
}

struct Unlifted {
  StochasticMatrix P;
  bool equivalent = false;  // fibers act identically, so marginals follow P exactly
  double fiber_deviation = 0.0;
};

/// P^q_{ij} = sum over l in c^-1(i) of A_{l, q(j)}.
inline Unlifted unlift_si(const Lift& L, const std::vector<Node>& q_choice) {
  if (q_choice.size() != L.base_n()) throw Error(ErrorCode::BadChoiceMap, "choice map needs one node per base node");
  for (Node j = 0; j < L.base_n(); ++j)
    if (q_choice[j] >= L.lifted_n() || L.map()(q_choice[j]) != j)
      throw Error(ErrorCode::BadChoiceMap, "choice for base node " + std::to_string(j) + " is outside its fiber");
  const Matrix CA = L.map().C() * L.A().mat();
  Matrix P(static_cast<Eigen::Index>(L.base_n()), static_cast<Eigen::Index>(L.base_n()));
  for (Node j = 0; j < L.base_n(); ++j) P.col(static_cast<Eigen::Index>(j)) = CA.col(static_cast<Eigen::Index>(q_choice[j]));
  Unlifted out;
  out.P = StochasticMatrix(std::move(P), L.base_ptr());
  out.fiber_deviation = fiber_pair_deviation(L);
  out.equivalent = out.fiber_deviation <= kInvarianceTol;
  return out;
}

/// pi^ restricted to c^-1(X), renormalized. X is given by its members.
inline Distribution adversarial_init(const LiftMap& map, const Distribution& pi_hat, const std::vector<Node>& X) {
  if (pi_hat.size() != map.lifted_n()) throw Error(ErrorCode::DimensionMismatch, "pi_hat has the wrong length");
  std::vector<char> in(map.base_n(), 0);
  for (Node k : X) {
    if (k >= map.base_n()) throw Error(ErrorCode::BadArc, "cut member outside the base graph");
    in[k] = 1;
  }
  Vector x = Vector::Zero(static_cast<Eigen::Index>(map.lifted_n()));
  for (Node l = 0; l < map.lifted_n(); ++l)
    if (in[map(l)]) x[static_cast<Eigen::Index>(l)] = pi_hat[l];
  const double w = x.sum();
  if (!(w > 0.0)) throw Error(ErrorCode::EmptyCutWeight, "pi_hat puts no mass on the preimage of X");
  return Distribution(x / w);
}

inline Distribution adversarial_init(const LiftMap& map, const Distribution& pi_hat, const Cut& X) {
  std::vector<Node> members;
  for (Node k : X.members())
    if (k < map.base_n()) members.push_back(k);
  return adversarial_init(map, pi_hat, members);
}

}  // namespace liftmix
