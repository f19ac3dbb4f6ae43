#include <gtest/gtest.h>

#include "liftmix/constructions.hpp"
#include "liftmix/lift.hpp"

using namespace liftmix;

namespace {

StochasticMatrix lazy_cycle(std::size_t n) { return metropolis_chain(cycle_graph(n), Distribution::uniform(n)); }

Lift path3_clock() {
  const Graph g = path_graph(3);
  return clock_lift(g, stochastic_bridge(g, Distribution::point(3, 0), Distribution::uniform(3)));
}

}  // namespace

TEST(LiftCtor, RejectsEmptyFiber) {
  try {
    LiftMap m(3, {0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadLift);
  }
}

TEST(LiftCtor, RejectsNonLocalArc) {
  Matrix A = Matrix::Zero(3, 3);
  A(2, 0) = 1;
  A(1, 1) = 1;
  A(2, 2) = 1;
  try {
    Lift L(path_graph(3), LiftMap(3, {0, 1, 2}), A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LocalityViolation);
  }
}

TEST(LiftCtor, RejectsInitOutsideFiber) {
  Matrix F = Matrix::Zero(4, 2);
  F(1, 0) = 1;  // lifted node 1 projects to base node 1
  F(3, 1) = 1;
  EXPECT_THROW(Lift(path_graph(2), LiftMap(2, {0, 1, 0, 1}), Matrix::Identity(4, 4), F), Error);
}

TEST(LiftCtor, ValidateBuiltLifts) {
  EXPECT_LT(validate_lift(path3_clock()), 1e-12);
  EXPECT_LT(validate_lift(diaconis_cycle_lift(8)), 1e-12);
  EXPECT_LT(validate_lift(four_cycle_lift(0.05, 0.01).lift), 1e-12);
}

TEST(Marginal, Examples) {
  const Lift L = path3_clock();
  for (Node l = 0; l < L.lifted_n(); ++l) {
    const auto m = marginal(L, Distribution::point(L.lifted_n(), l));
    EXPECT_EQ(m[L.map()(l)], 1.0);
  }
  const Distribution p{0.2, 0.5, 0.3};
  EXPECT_LT((marginal(L, L.F()->apply(p.vec())) - p.vec()).cwiseAbs().maxCoeff(), 1e-15);
  const Lift D = diaconis_cycle_lift(8);
  EXPECT_LT((marginal(D, Distribution::uniform(16)).vec().array() - 0.125).abs().maxCoeff(), 1e-15);
}

TEST(ConditionalUnlift, TrivialLiftIsA) {
  const auto P = lazy_cycle(5);
  const Lift L = trivial_lift(cycle_graph(5), P);
  Rng rng(1, "cu");
  const auto res = conditional_unlift(L, random_distribution(5, rng).vec());
  EXPECT_LT((res.P.mat() - P.mat()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(res.uniform_columns.empty());
}

TEST(ConditionalUnlift, ClockFirstStep) {
  const Graph g = path_graph(3);
  const auto chain = stochastic_bridge(g, Distribution::point(3, 0), Distribution::uniform(3));
  const Lift L = clock_lift(g, chain);
  for (Node i = 0; i < 3; ++i) {
    const auto res = conditional_unlift(L, L.F()->mat().col(static_cast<Eigen::Index>(i)));
    EXPECT_LT((res.P.mat().col(static_cast<Eigen::Index>(i)) - chain.step(1).mat().col(static_cast<Eigen::Index>(i)))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
    EXPECT_EQ(res.uniform_columns.size(), 2u);
  }
}

TEST(InducedChain, TrivialLift) {
  const auto P = lazy_cycle(6);
  const Lift L = trivial_lift(cycle_graph(6), P);
  EXPECT_LT((induced_chain(L, Distribution::uniform(6)).mat() - P.mat()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InducedChain, DiaconisIsSymmetricWalk) {
  const std::size_t N = 8;
  const Lift D = diaconis_cycle_lift(N);
  const auto Pt = induced_chain(D, Distribution::uniform(2 * N));
  const Distribution u = Distribution::uniform(N);
  EXPECT_LT(stationarity_residual(Pt.mat(), u.vec()), 1e-14);
  for (Node k = 0; k < N; ++k) {
    EXPECT_NEAR(Pt((k + 1) % N, k), 0.5, 1e-15);
    EXPECT_NEAR(Pt((k + N - 1) % N, k), 0.5, 1e-15);
  }
}

TEST(InducedChain, FourCycleMatchesReference) {
  const auto fc = four_cycle_lift(0.05, 0.01);
  const auto Pt = induced_chain(fc.lift, stationary(fc.lift.A()));
  EXPECT_LT((Pt.mat() - fc.reference.mat()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(LiftedStationary, IrreducibleIgnoresSeed) {
  const Lift D = diaconis_cycle_lift(6, 0.1);
  const auto a = lifted_stationary(D, Distribution::point(12, 0));
  const auto b = lifted_stationary(D, Distribution::point(12, 7));
  EXPECT_LT(tv_distance(a, b), 1e-14);
}

TEST(LiftedStationary, ClockAbsorbsInTopLayer) {
  const Graph g = path_graph(4);
  Rng rng(3, "clock");
  std::vector<StochasticMatrix> steps;
  for (int t = 0; t < 3; ++t) steps.push_back(random_chain(g, rng));
  const TimeVaryingChain chain(steps);
  const Lift L = clock_lift(g, chain);
  const Distribution p = random_distribution(4, rng);
  const auto ph = lifted_stationary(L, Distribution(L.F()->apply(p.vec())));
  const Vector top = chain.apply(p.vec(), 3);
  for (std::size_t t = 0; t < 3; ++t)
    for (Node v = 0; v < 4; ++v) EXPECT_NEAR(ph[t * 4 + v], 0.0, 1e-12);
  for (Node v = 0; v < 4; ++v) EXPECT_NEAR(ph[12 + v], top[static_cast<Eigen::Index>(v)], 1e-12);
}

TEST(LiftedStationary, FourCycleClosedForm) {
  const double g = 0.01;
  const auto fc = four_cycle_lift(0.05, g);
  const auto ph = lifted_stationary(fc.lift, Distribution::uniform(12));
  const double layer[3] = {g / (1 + 2 * g), g / (1 + 2 * g), 1 / (1 + 2 * g)};
  for (std::size_t s = 0; s < 3; ++s)
    for (Node v = 0; v < 4; ++v) EXPECT_NEAR(ph[4 * s + v], layer[s] / 4, 1e-13);
}

TEST(Invariance, TrivialLiftUnderS) {
  const auto P = lazy_cycle(5);
  EXPECT_TRUE(check_invariance(trivial_lift(cycle_graph(5), P), Distribution::uniform(5), InitKind::Arbitrary).ok);
}

TEST(Invariance, DiaconisWitness) {
  const std::size_t N = 8;
  const Lift D = diaconis_cycle_lift(N);
  const Distribution u = Distribution::uniform(N);
  const auto r = check_invariance(D, u, InitKind::Arbitrary);
  ASSERT_FALSE(r.ok);
  ASSERT_TRUE(r.witness.has_value());
  const Vector w = min_inflow_witness(D, u, 2);
  EXPECT_GT(w[3], 0.0);       // (+1, 3)
  EXPECT_GT(w[N + 1], 0.0);   // (-1, 1)
  EXPECT_LT((D.map().collapse(w) - u.vec()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(D.map().collapse(D.A().mat() * w)[2], 0.0);
  const Vector next = D.map().collapse(D.A().mat() * *r.witness);
  EXPECT_GT((next - u.vec()).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Invariance, FourCycleUnderDesignedInit) {
  const auto fc = four_cycle_lift(0.05, 0.01);
  EXPECT_TRUE(check_invariance(fc.lift, Distribution::uniform(4), InitKind::Designed, 50).ok);
}

TEST(Invariance, DesignedNeedsInitMap) {
  EXPECT_THROW((void)check_invariance(diaconis_cycle_lift(8), Distribution::uniform(8), InitKind::Designed), Error);
}

TEST(MarginalMixing, TrivialLiftEqualsBaseChain) {
  const auto P = lazy_cycle(10);
  const Distribution u = Distribution::uniform(10);
  const Lift L = trivial_lift(cycle_graph(10), P);
  EXPECT_EQ(marginal_mixing_time(L, u, 0.25, InitKind::Arbitrary), mixing_time(P, u, 0.25));
  EXPECT_EQ(marginal_mixing_time(L, u, 0.25, InitKind::Designed), mixing_time(P, u, 0.25));
  EXPECT_EQ(full_mixing_time(L, 0.25, InitKind::Arbitrary), mixing_time(P, u, 0.25));
}

TEST(MarginalMixing, ReducibleMixerBarbell) {
  const Graph g = barbell_graph(6);
  const Distribution u = Distribution::uniform(12);
  const Lift L = diameter_mixer(g, u, MixerVariant::Reducible);
  const auto t = marginal_mixing_time(L, u, 0.25, InitKind::Designed);
  ASSERT_TRUE(t.has_value());
  EXPECT_LE(*t, 4u);
  for (Node i = 0; i < 12; ++i) {
    Vector x = L.F()->mat().col(static_cast<Eigen::Index>(i));
    for (int s = 0; s < 3; ++s) x = L.A().mat() * x;
    for (int s = 0; s < 4; ++s) {
      EXPECT_LE(tv_distance(L.map().collapse(x), u.vec()), 1e-10);
      x = L.A().mat() * x;
    }
  }
}

TEST(MarginalMixing, DiaconisLinearRange) {
  const Lift D = diaconis_cycle_lift(16, 1.0 / 16);
  const auto t = marginal_mixing_time(D, Distribution::uniform(16), 0.25, InitKind::Arbitrary);
  ASSERT_TRUE(t.has_value());
  EXPECT_LE(*t, 32u);
  EXPECT_GE(*t, 4u);
}

TEST(FullMixing, ClockLiftAbsorbs) {
  const Lift L = path3_clock();
  const auto t = full_mixing_time(L, 0.25, InitKind::Designed);
  ASSERT_TRUE(t.has_value());
  EXPECT_LE(*t, 3u);
}

TEST(FullMixing, PeriodicClockCyclesWhileMarginalMixes) {
  const Graph g = cycle_graph(4);
  const Distribution u = Distribution::uniform(4);
  const auto chain = stochastic_bridge(g, Distribution::point(4, 0), u);
  const Lift L = periodic_clock_lift(g, chain);
  EXPECT_EQ(full_mixing_time(L, 0.25, InitKind::Designed), std::nullopt);
  // from the designed start at node 0 the marginal is uniform after one period
  Vector x = L.F()->mat().col(0);
  for (std::size_t s = 0; s < chain.length(); ++s) x = L.A().mat() * x;
  EXPECT_LT(tv_distance(L.map().collapse(x), u.vec()), 1e-12);
}

TEST(FlowMatch, TrivialLiftZero) {
  const auto P = lazy_cycle(6);
  const Lift L = trivial_lift(cycle_graph(6), P);
  const auto r = check_flow_match(L, Distribution::uniform(6), P, 0.0);
  EXPECT_EQ(r.max_dev, 0.0);
  EXPECT_TRUE(r.ok);
}

TEST(FlowMatch, FourCycleExact) {
  const auto fc = four_cycle_lift(0.05, 0.01);
  const auto r = check_flow_match(fc.lift, stationary(fc.lift.A()), fc.reference, 1e-8);
  EXPECT_TRUE(r.ok);
  EXPECT_LT(r.max_dev, 1e-9);
}

TEST(FlowMatch, IrreducibleMixerOrderGamma) {
  const Graph g = cycle_graph(4);
  const Distribution u = Distribution::uniform(4);
  MixerParams mp;
  mp.reference = metropolis_chain(g, u);
  const Lift L = diameter_mixer(g, u, MixerVariant::Irreducible, mp);
  const auto r = check_flow_match(L, stationary(L.A()), *mp.reference, 10 * mp.gamma);
  EXPECT_TRUE(r.ok);
}

TEST(UnliftSi, TrivialLiftIdentityChoice) {
  const auto P = lazy_cycle(5);
  const Lift L = trivial_lift(cycle_graph(5), P);
  const auto u = unlift_si(L, {0, 1, 2, 3, 4});
  EXPECT_EQ(u.P.mat(), P.mat());
  EXPECT_TRUE(u.equivalent);
}

TEST(UnliftSi, ReplicatedAnyChoice) {
  const auto P = lazy_cycle(6);
  const Lift L = si_replicated_lift(P, 2);
  for (Node off : {0u, 6u}) {
    std::vector<Node> q;
    for (Node k = 0; k < 6; ++k) q.push_back(k + (k % 2 ? off : 0));
    const auto u = unlift_si(L, q);
    EXPECT_LT((u.P.mat() - P.mat()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(u.equivalent);
  }
}

TEST(UnliftSi, BadChoice) {
  const Lift L = si_replicated_lift(lazy_cycle(4), 2);
  try {
    (void)unlift_si(L, {1, 1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadChoiceMap);
  }
}

TEST(UnliftSi, DiaconisTrajectoriesDiverge) {
  const Lift D = diaconis_cycle_lift(8);
  std::vector<Node> q;
  for (Node k = 0; k < 8; ++k) q.push_back(k);
  const auto u = unlift_si(D, q);
  EXPECT_FALSE(u.equivalent);
  const Vector w = min_inflow_witness(D, Distribution::uniform(8), 2);
  const Vector lifted = D.map().collapse(D.A().mat() * w);
  const Vector base = u.P.mat() * D.map().collapse(w);
  EXPECT_GT(tv_distance(lifted, base), 1e-3);
}

TEST(AdversarialInit, Examples) {
  const Lift D = diaconis_cycle_lift(8, 0.1);
  const auto ph = stationary(D.A());
  std::vector<Node> all(8);
  for (Node k = 0; k < 8; ++k) all[k] = k;
  EXPECT_LT(tv_distance(adversarial_init(D.map(), ph, all), ph), 1e-15);
  const auto x = adversarial_init(D.map(), ph, std::vector<Node>{3});
  EXPECT_NEAR(x[3], 0.5, 1e-12);
  EXPECT_NEAR(x[11], 0.5, 1e-12);
  EXPECT_NEAR(x.vec().sum(), 1.0, 1e-15);
}

TEST(AdversarialInit, LeakageBoundHoldsOnLift) {
  const Graph g = barbell_graph(4);
  const Distribution u = Distribution::uniform(8);
  const Lift L = diameter_mixer(g, u, MixerVariant::Reducible);
  const auto ph = lifted_stationary(L, Distribution(L.F()->apply(u.vec())));
  const auto Pt = induced_chain(L, ph);
  const Cut X = Cut::of({0, 1, 2, 3}, u);
  const double phiX = phi_cut(Pt, u, X);
  Vector x = adversarial_init(L.map(), ph, X).vec();
  for (std::size_t t = 1; t <= 10; ++t) {
    x = L.A().mat() * x;
    const Vector m = L.map().collapse(x);
    double out = 0.0;
    for (Node k = 4; k < 8; ++k) out += m[static_cast<Eigen::Index>(k)];
    EXPECT_LE(out, static_cast<double>(t) * phiX + 1e-9);
  }
}

TEST(ScenarioSpecParse, RoundTrip) {
  for (const char* s : {"sImrE", "SIMRE", "simre", "SiMre"}) EXPECT_EQ(ScenarioSpec::parse(s).str(), s);
  const auto d = ScenarioSpec::parse("SIMre:0.001");
  EXPECT_EQ(d.flows, FlowConstraint::Delta);
  EXPECT_DOUBLE_EQ(d.delta, 0.001);
  EXPECT_DOUBLE_EQ(d.flow_tolerance(), 0.001);
  EXPECT_EQ(d.str(), "SIMre:0.001");
  EXPECT_DOUBLE_EQ(ScenarioSpec::parse("sImre").flow_tolerance(), ScenarioSpec::kExactFlowTol);
}

TEST(ScenarioSpecParse, Rejects) {
  for (const char* s : {"", "sIm", "xImrE", "sImrEx", "sImre:", "sImre:abc", "sImre:-1", "sImre;0.1"}) {
    try {
      (void)ScenarioSpec::parse(s);
      ADD_FAILURE() << s;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadScenario) << s;
    }
  }
}
