#include <gtest/gtest.h>

#include "liftmix/constructions.hpp"
#include "liftmix/conductance.hpp"

using namespace liftmix;

namespace {

TimeVaryingChain random_tvc(const Graph& g, std::size_t T, Rng& rng) {
  std::vector<StochasticMatrix> steps;
  for (std::size_t t = 0; t < T; ++t) steps.push_back(random_chain(g, rng));
  return TimeVaryingChain(steps);
}

}  // namespace

TEST(Bridge, PathTwoForced) {
  const auto c = stochastic_bridge(path_graph(2), Distribution::point(2, 0), Distribution::uniform(2));
  ASSERT_EQ(c.length(), 1u);
  EXPECT_DOUBLE_EQ(c.step(1)(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(c.step(1)(1, 0), 0.5);
}

TEST(Bridge, StationaryEndpoints) {
  Rng rng(2, "br");
  const Graph g = random_connected_graph(7, 0.3, rng);
  const auto pi = random_distribution(7, rng);
  const auto c = stochastic_bridge(g, pi, pi);
  EXPECT_EQ(c.length(), diameter(g));
  EXPECT_LT(tv_distance(c.apply(pi.vec(), c.length()), pi.vec()), 1e-12);
}

TEST(Bridge, RandomGraphsExact) {
  Rng rng(0, "bridges");
  for (int k = 0; k < 50; ++k) {
    const Graph g = random_connected_graph(static_cast<std::size_t>(rng.uniform_int(2, 10)), 0.25, rng);
    const auto target = random_distribution(g.size(), rng);
    for (Node i = 0; i < g.size(); ++i) {
      const auto src = Distribution::point(g.size(), i);
      const auto c = stochastic_bridge(g, src, target);
      EXPECT_LE(tv_distance(c.apply(src.vec(), c.length()), target.vec()), 1e-10);
      for (const auto& s : c.steps())
        for (auto [a, b] : support_graph(s.mat()).arcs()) EXPECT_TRUE(g.has_arc(a, b));
    }
  }
}

TEST(Bridge, SpreadSourceExact) {
  Rng rng(4, "spread");
  const Graph g = random_connected_graph(8, 0.2, rng);
  const auto src = random_distribution(8, rng);
  const auto dst = random_distribution(8, rng);
  const auto c = stochastic_bridge(g, src, dst);
  EXPECT_LE(tv_distance(c.apply(src.vec(), c.length()), dst.vec()), 1e-12);
}

TEST(ClockLift, IdentityStep) {
  const Graph g = path_graph(3);
  const TimeVaryingChain c({StochasticMatrix::identity(3, std::make_shared<const Graph>(g))});
  const Lift L = clock_lift(g, c);
  EXPECT_EQ(L.lifted_n(), 6u);
  const Distribution p{0.2, 0.3, 0.5};
  Vector x = L.F()->apply(p.vec());
  for (int t = 0; t < 4; ++t) {
    x = L.A().mat() * x;
    EXPECT_LT((L.map().collapse(x) - p.vec()).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_GT(x.tail(3).sum(), 1.0 - 1e-15);
}

TEST(ClockLift, BridgeOnPathUniformAtT) {
  const Graph g = path_graph(4);
  const auto c = stochastic_bridge(g, Distribution::point(4, 0), Distribution::uniform(4));
  const Lift L = clock_lift(g, c);
  Vector x = L.F()->mat().col(0);
  for (int t = 0; t < 3; ++t) x = L.A().mat() * x;
  EXPECT_LT((L.map().collapse(x).array() - 0.25).abs().maxCoeff(), 1e-15);
}

TEST(ClockLift, MarginalFollowsProduct) {
  Rng rng(7, "clockprod");
  for (int k = 0; k < 100; ++k) {
    const Graph g = random_connected_graph(static_cast<std::size_t>(rng.uniform_int(2, 6)), 0.3, rng);
    const std::size_t T = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const auto c = random_tvc(g, T, rng);
    const Lift L = clock_lift(g, c);
    const auto p = random_distribution(g.size(), rng);
    Vector x = L.F()->apply(p.vec());
    Vector q = p.vec();
    for (std::size_t t = 1; t <= T; ++t) {
      x = L.A().mat() * x;
      q = c.step(t).mat() * q;
      EXPECT_LE(tv_distance(L.map().collapse(x), q), 1e-12);
    }
  }
}

TEST(PeriodicClockLift, ConstantChainIsPlainChain) {
  const Graph g = cycle_graph(5);
  const auto P = metropolis_chain(g, Distribution::uniform(5));
  const Lift L = periodic_clock_lift(g, TimeVaryingChain({P, P, P}));
  Rng rng(1, "pc");
  const auto p = random_distribution(5, rng);
  Vector x = L.F()->apply(p.vec());
  Vector q = p.vec();
  for (int t = 0; t < 20; ++t) {
    x = L.A().mat() * x;
    q = P.mat() * q;
    EXPECT_LT(tv_distance(L.map().collapse(x), q), 1e-13);
  }
}

TEST(PeriodicClockLift, PositiveBridgeIrreducible) {
  Rng rng(5, "pci");
  const Graph g = cycle_graph(4);
  const Lift L = periodic_clock_lift(g, random_tvc(g, 2, rng));
  EXPECT_TRUE(is_irreducible(L.A()));
  const Graph p3 = path_graph(3);
  EXPECT_FALSE(is_irreducible(clock_lift(p3, random_tvc(p3, 2, rng)).A()));
}

TEST(NodeClockLift, SingleNodeDegenerates) {
  const Graph g(1, {});
  const TimeVaryingChain c({StochasticMatrix::identity(1)});
  const Lift L = node_clock_lift(g, {c}, Distribution::uniform(1));
  EXPECT_EQ(L.lifted_n(), 3u);
  EXPECT_EQ(validate_lift(L), 0.0);
}

TEST(NodeClockLift, ExactAtT) {
  Rng rng(3, "nc");
  for (int k = 0; k < 10; ++k) {
    const Graph g = random_connected_graph(6, 0.3, rng);
    const auto pi = random_distribution(6, rng);
    const Lift L = node_clock_lift(g, bridges_to(g, pi), pi);
    const std::size_t D = diameter(g);
    for (Node v = 0; v < 6; ++v) {
      Vector x = L.F()->mat().col(static_cast<Eigen::Index>(v));
      for (std::size_t t = 1; t <= D + 3; ++t) {
        x = L.A().mat() * x;
        if (t >= D) {
          EXPECT_LE(tv_distance(L.map().collapse(x), pi.vec()), 1e-12);
        }
      }
    }
  }
}

TEST(NodeClockLift, LengthMismatch) {
  const Graph g = path_graph(3);
  Rng rng(0, "lm");
  try {
    (void)node_clock_lift(g, {random_tvc(g, 2, rng), random_tvc(g, 2, rng), random_tvc(g, 3, rng)},
                          Distribution::uniform(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(PeriodicNodeClockLift, ConstantChainsFollowP) {
  const Graph g = cycle_graph(5);
  const auto P = metropolis_chain(g, Distribution::uniform(5));
  const TimeVaryingChain c({P, P});
  const Lift L = periodic_node_clock_lift(g, std::vector<TimeVaryingChain>(5, c));
  Rng rng(6, "pnc");
  const auto p = random_distribution(5, rng);
  Vector x = L.F()->apply(p.vec());
  Vector q = p.vec();
  // two chain steps per three lifted steps: the return to layer 0 is a pure hold
  for (int round = 0; round < 5; ++round) {
    for (int s = 0; s < 3; ++s) x = L.A().mat() * x;
    q = P.mat() * (P.mat() * q);
    EXPECT_LT(tv_distance(L.map().collapse(x), q), 1e-13);
  }
}

TEST(PeriodicNodeClockLift, SymmetricCycleFactorTwo) {
  const std::size_t n = 8;
  const Graph g = cycle_graph(n);
  const Distribution u = Distribution::uniform(n);
  const Lift L = periodic_node_clock_lift(g, cycle_symmetric_bridges(n));
  const auto t = marginal_mixing_time(L, u, 0.25, InitKind::Arbitrary);
  ASSERT_TRUE(t.has_value());
  EXPECT_LE(*t, 2 * (diameter(g) + 1));
}

TEST(TreeCorrection, ZeroRequirement) {
  const Graph g = cycle_graph(5);
  const auto P = metropolis_chain(g, Distribution::uniform(5));
  const auto c = spanning_tree_correction(g, P, Distribution::uniform(5), Vector::Zero(5));
  EXPECT_EQ(c.P_prime.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TreeCorrection, PathThree) {
  const Graph g = path_graph(3);
  const Distribution u = Distribution::uniform(3);
  const auto P = metropolis_chain(g, u);
  const double eps = 1e-3;
  const Vector y = Vector{{eps, -eps, 0.0}};
  const auto c = spanning_tree_correction(g, P, u, y);
  EXPECT_LE((c.P_prime * u.vec() - y).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(c.P_prime.colwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  int off_diag = 0;
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      if (i != j && c.P_prime(j, i) != 0.0) ++off_diag;
  EXPECT_EQ(off_diag, 1);
  EXPECT_LT(c.P_prime(1, 0), 0.0);  // less flow 0 -> 1
}

TEST(TreeCorrection, RandomRequirements) {
  Rng rng(13, "tc");
  for (int k = 0; k < 20; ++k) {
    const Graph g = random_connected_graph(7, 0.3, rng);
    const auto pi = random_distribution(7, rng);
    const auto P = metropolis_chain(g, pi);
    Vector y(7);
    for (auto& v : y) v = rng.uniform(-1e-4, 1e-4);
    y.array() -= y.mean();
    const auto c = spanning_tree_correction(g, P, pi, y);
    EXPECT_LE((c.P_prime * pi.vec() - y).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(c.P_prime.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    for (Node v = 0; v < 7; ++v)
      if (v != c.tree.root) {
        EXPECT_TRUE(g.has_arc(c.tree.parent[v], v));
      }
  }
}

TEST(TreeCorrection, TooLargeIsNegative) {
  const Graph g = path_graph(3);
  const Distribution u = Distribution::uniform(3);
  try {
    (void)spanning_tree_correction(g, metropolis_chain(g, u), u, Vector{{0.5, -0.5, 0.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeEntry);
  }
}

TEST(DiameterMixer, AllVariantsExactAtD) {
  const Graph g = barbell_graph(3);
  const Distribution u = Distribution::uniform(6);
  MixerParams mp;
  mp.reference = metropolis_chain(g, u);
  for (auto v : {MixerVariant::Reducible, MixerVariant::Flows, MixerVariant::Irreducible}) {
    const Lift L = diameter_mixer(g, u, v, mp);
    const std::size_t D = diameter(g);
    for (Node i = 0; i < 6; ++i) {
      Vector x = L.F()->mat().col(static_cast<Eigen::Index>(i));
      for (std::size_t t = 0; t < D; ++t) x = L.A().mat() * x;
      EXPECT_LE(tv_distance(L.map().collapse(x), u.vec()), 1e-10) << to_string(v);
    }
  }
}

TEST(DiameterMixer, ReferenceRequired) {
  try {
    (void)diameter_mixer(cycle_graph(4), Distribution::uniform(4), MixerVariant::Irreducible);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingReferenceChain);
  }
}

TEST(DiameterMixer, IrreducibleStationaryProjectsToPi) {
  Rng rng(19, "irr");
  const Graph g = random_connected_graph(5, 0.3, rng);
  const auto pi = random_distribution(5, rng);
  MixerParams mp;
  mp.reference = metropolis_chain(g, pi);
  const Lift L = diameter_mixer(g, pi, MixerVariant::Irreducible, mp);
  EXPECT_TRUE(is_irreducible(L.A()));
  const auto ph = stationary(L.A());
  EXPECT_LE(tv_distance(L.map().collapse(ph.vec()), pi.vec()), 1e-8);
  EXPECT_TRUE(check_flow_match(L, ph, *mp.reference, 10 * L.metadata().params.at("gamma")).ok);
}

TEST(DiameterMixer, FlowsVariantMatchesReference) {
  const Graph g = cycle_graph(6);
  const Distribution u = Distribution::uniform(6);
  MixerParams mp;
  mp.reference = metropolis_chain(g, u, 0.3);
  const Lift L = diameter_mixer(g, u, MixerVariant::Flows, mp);
  const auto ph = lifted_stationary(L, Distribution(L.F()->apply(u.vec())));
  EXPECT_LE(check_flow_match(L, ph, *mp.reference, 0.0).max_dev, 1e-12);
}

TEST(Diaconis, Structure) {
  const std::size_t N = 8;
  const Lift D = diaconis_cycle_lift(N);
  EXPECT_EQ(D.lifted_n(), 2 * N);
  EXPECT_FALSE(D.F().has_value());
  EXPECT_DOUBLE_EQ(D.A()(1, 0), 1.0 - 1.0 / N);
  EXPECT_DOUBLE_EQ(D.A()(N + 1, 0), 1.0 / N);
  EXPECT_DOUBLE_EQ(D.A()(N + 6, N + 7), 1.0 - 1.0 / N);
  EXPECT_THROW((void)diaconis_cycle_lift(7), Error);
}

TEST(Diaconis, InvarianceWitness) {
  const std::size_t N = 8;
  const Lift D = diaconis_cycle_lift(N);
  // uniform marginal; node 3 moving +1 and node 1 moving -1, both away from 2
  Vector x = Vector::Zero(static_cast<Eigen::Index>(2 * N));
  for (Node k = 0; k < N; ++k) x[static_cast<Eigen::Index>(k == 1 ? N + 1 : k)] = 1.0 / N;
  EXPECT_LT((D.map().collapse(x).array() - 1.0 / N).abs().maxCoeff(), 1e-15);
  const Vector m = D.map().collapse(D.A().mat() * x);
  EXPECT_EQ(m[2], 0.0);
  EXPECT_NE(m[2], 1.0 / N);
}

TEST(FourCycle, ClosedForms) {
  const auto fc = four_cycle_lift(0.05, 0.01);
  EXPECT_NEAR(fc.phi, 0.0147059, 1e-7);
  EXPECT_NEAR(fc.epsilon, (1 - 0.9 * (1.005 / 0.99)) / 2, 1e-15);
  EXPECT_NEAR(fc.epsilon, 0.0431818, 1e-7);
  EXPECT_EQ(*marginal_mixing_time(fc.lift, Distribution::uniform(4), 0.25, InitKind::Designed), 2u);
  EXPECT_NEAR(1.0 / (4 * phi_chain(fc.reference, Distribution::uniform(4)).phi), 5.07, 5e-3);
}

TEST(FourCycle, FactorGrowsAsDeltaShrinks) {
  const Distribution u = Distribution::uniform(4);
  auto factor = [&](double delta) {
    const auto fc = four_cycle_lift(delta, 0.01);
    const double tau = static_cast<double>(*marginal_mixing_time(fc.lift, u, 0.25, InitKind::Designed));
    return 1.0 / (4 * phi_chain(fc.reference, u).phi) / tau;
  };
  EXPECT_NEAR(factor(0.01) / factor(0.05), 5.0, 0.05);
}

TEST(FourCycle, GammaTooLarge) {
  try {
    (void)four_cycle_lift(0.01, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GammaTooLargeForDelta);
  }
}

TEST(Replicated, OneCopyIsTrivial) {
  const auto P = metropolis_chain(cycle_graph(5), Distribution::uniform(5));
  EXPECT_EQ(si_replicated_lift(P, 1).A().mat(), P.mat());
}

TEST(Replicated, TrajectoriesMatch) {
  const auto P = metropolis_chain(cycle_graph(6), Distribution::uniform(6));
  const Lift L = si_replicated_lift(P, 2);
  EXPECT_TRUE(check_invariance(L, Distribution::uniform(6), InitKind::Arbitrary).ok);
  Rng rng(10, "rep");
  for (int s = 0; s < 20; ++s) {
    Vector x = random_distribution(12, rng, 0.0).vec();
    Vector p = L.map().collapse(x);
    for (int t = 0; t < 50; ++t) {
      x = L.A().mat() * x;
      p = P.mat() * p;
      EXPECT_LE(tv_distance(L.map().collapse(x), p), 1e-9);
    }
  }
}
