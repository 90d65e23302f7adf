#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qmut/dynamics.hpp"

using namespace qmut;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(AltOrbit, RecordsStatesAndMultiplicities) {
  const Quiver q = fixtures::two_mutable(1, 3, 1);
  const auto t = alt_orbit(q, "C", "D", 4);
  ASSERT_EQ(t.steps(), 4U);
  ASSERT_EQ(t.half_states.size(), 4U);
  EXPECT_EQ(t.alpha, 3);
  EXPECT_EQ(t.delta_at("A", "C", 0), 1);
  EXPECT_EQ(t.delta_at("A", "C", 1), 8);
  for (std::size_t n = 0; n <= 4; ++n) {
    EXPECT_EQ(t.states[n], n == 0 ? q : t.half_states[n - 1].mutated(t.half_states[n - 1].index_of("D")));
    for (std::size_t p = 0; p < t.pairs.size(); ++p)
      EXPECT_EQ(t.delta[n][p], multiplicity(t.states[n], t.pairs[p].first, t.pairs[p].second));
  }
  EXPECT_LT(t.delta_at("A", "C", 1), t.delta_at("A", "C", 2));
  EXPECT_EQ(error_of([&] { t.delta_at("A", "Q", 0); }), ErrorCode::UnknownVertex);
}

TEST(AltOrbit, Errors) {
  const Quiver q = fixtures::two_mutable(1, 2, 1);
  EXPECT_EQ(error_of([&] { alt_orbit(q, "A", "D", 3); }), ErrorCode::FrozenVertexMutation);
  EXPECT_EQ(error_of([&] { alt_orbit(q, "C", "C", 3); }), ErrorCode::SameVertex);
  EXPECT_EQ(error_of([&] { alt_orbit(q, "C", "D", 0); }), ErrorCode::InsufficientSteps);
  EXPECT_EQ(error_of([&] { alt_orbit(fixtures::a3_path(), "X", "Y", 3); }), ErrorCode::WrongMutableCount);
}

TEST(AltOrbit, DisplayedQuiversOverAGrid) {
  for (int beta = 1; beta <= 4; ++beta) {
    for (int alpha = 2; alpha <= 5; ++alpha) {
      for (int gamma = 1; gamma <= 3; ++gamma) {
        const auto t = alt_orbit(fixtures::two_mutable(beta, alpha, gamma), "C", "D", 2);
        const Multiplicity b = beta, a = alpha, g = gamma;
        const Multiplicity sigma = b * a * a * a - 2 * b * a;
        // The A -> C count after the second double step is b a^4 - 3 b a^2 + b.
        const Multiplicity tau = b * a * a * a * a - 3 * b * a * a + b;
        const Multiplicity printed_tau = b * a * a * a * a - 2 * b * a * a - b * a * a * a + b;
        // mu_C Q
        EXPECT_EQ(t.half_states[0].b(0, 3), b * a);
        // (mu_D mu_C) Q
        EXPECT_EQ(t.states[1].b(0, 1), b * a * g);
        EXPECT_EQ(t.states[1].b(0, 2), b * a * a - b);
        EXPECT_EQ(t.states[1].b(3, 0), b * a);
        // mu_C (mu_D mu_C) Q
        EXPECT_EQ(t.half_states[1].b(0, 3), sigma);
        EXPECT_EQ(t.half_states[1].b(2, 0), b * a * a - b);
        // (mu_D mu_C)^2 Q
        EXPECT_EQ(t.states[2].b(0, 2), tau);
        EXPECT_EQ(t.states[2].b(3, 0), sigma);
        EXPECT_EQ(t.states[2].b(1, 2), a * g);
        EXPECT_EQ(t.states[2].b(0, 1), b * a * g);
        EXPECT_GT(sigma, 0);
        EXPECT_GT(tau, 0);
        EXPECT_NE(tau, printed_tau);
      }
    }
  }
}

TEST(AltOrbit, SecondDoubleStepAtBetaOneAlphaTwo) {
  // Hand count: A -> D : 4 and D -> C : 2 give 8 paths, less C -> A : 3.
  const auto t = alt_orbit(fixtures::two_mutable(1, 2, 1), "C", "D", 2);
  EXPECT_EQ(t.delta_at("A", "C", 2), 5);
}

TEST(AltOrbit, AlphaZeroFourQuivers) {
  const Quiver q = new_quiver({{"A", true}, {"B", true}, {"C", false}, {"D", false}}, {{"A", "C", 1}, {"D", "B", 2}});
  const auto t = alt_orbit(q, "C", "D", 12);
  EXPECT_EQ(t.states[2], t.states[0]);
  EXPECT_NE(t.states[1], t.states[0]);
  const auto g = classify_growth(t);
  EXPECT_EQ(g.kind, GrowthClass::Kind::Periodic);
  EXPECT_EQ(g.period, 2U);
  EXPECT_EQ(orbit_size(q).labeled, 4U);
}

TEST(AltOrbit, AlphaOneReturnsAfterFiveDoubleSteps) {
  // Five double steps bring the quiver back to itself, five single
  // mutations give the C <-> D relabeling.
  const Quiver q = fixtures::two_mutable(1, 1, 1);
  const auto t = alt_orbit(q, "C", "D", 10);
  for (std::size_t n = 1; n < 5; ++n) EXPECT_NE(t.states[n], q);
  EXPECT_EQ(t.states[5], q);
  EXPECT_EQ(t.states[10], q);
  const Quiver five = mutate_seq(q, MutationSequence{"C", "D", "C", "D", "C"});
  EXPECT_EQ(five, swap_labels(q, "C", "D"));
  EXPECT_NE(t.states[5], swap_labels(q, "C", "D"));
  const auto g = classify_growth(alt_orbit(q, "C", "D", 12));
  EXPECT_EQ(g.kind, GrowthClass::Kind::Periodic);
  EXPECT_EQ(g.period, 5U);
}

TEST(OrbitSize, SmallCases) {
  for (int beta = 1; beta <= 3; ++beta) {
    for (int gamma = 1; gamma <= 3; ++gamma) {
      EXPECT_EQ(orbit_size(fixtures::two_mutable(beta, 0, gamma)).labeled, 4U);
      const auto one = orbit_size(fixtures::two_mutable(beta, 1, gamma));
      EXPECT_EQ(one.labeled, 10U);
      EXPECT_EQ(one.iso, 5U);
    }
  }
  SearchLimits l;
  l.max_states = 500;
  EXPECT_EQ(error_of([&] { orbit_size(fixtures::two_mutable(1, 2, 1), l); }), ErrorCode::Truncated);
  EXPECT_EQ(error_of([&] { orbit_size(fixtures::a3_path()); }), ErrorCode::WrongMutableCount);
}

TEST(ClosedForm, StepFromDisplayedQuiver) {
  // (mu_D mu_C) Q for beta = gamma = 1, alpha = 3: x = 8, y = 3, z = 0, w = -1.
  AltState s;
  s.form = AltState::Form::One;
  s.alpha = 3;
  s.u1 = 8;
  s.u2 = 3;
  s.v1 = 0;
  s.v2 = -1;
  s.top = 3;
  ASSERT_TRUE(in_validity_window(s));
  const AltState next = closed_form_step(s);
  EXPECT_EQ(next.form, AltState::Form::Two);
  EXPECT_EQ(next.u2, 21);
  EXPECT_EQ(next.u1, 8);
  EXPECT_EQ(next.v2, 1);
  EXPECT_EQ(next.top, 3);
  const auto t = alt_orbit(fixtures::two_mutable(1, 3, 1), "C", "D", 2);
  EXPECT_EQ(alt_state_of(t.states[1]), s);
  EXPECT_EQ(quiver_of(next, t.states[1]), t.half_states[1]);
}

TEST(ClosedForm, OutsideWindowThrows) {
  AltState s;
  s.alpha = 2;
  s.u1 = 1;
  s.u2 = 5;
  s.v1 = 0;
  s.v2 = 0;
  EXPECT_FALSE(in_validity_window(s));
  EXPECT_EQ(error_of([&] { closed_form_step(s); }), ErrorCode::ValidityWindowViolated);
}

TEST(ClosedForm, MatchesEngineAcrossGrid) {
  for (int alpha = 2; alpha <= 6; ++alpha) {
    for (int beta = 1; beta <= 4; ++beta) {
      for (int gamma = 1; gamma <= 4; ++gamma) {
        const Quiver q = fixtures::two_mutable(beta, alpha, gamma);
        const auto engine = alt_orbit(q, "C", "D", 30);
        const auto closed = closed_form_orbit(q, 30);
        ASSERT_EQ(closed.states, engine.states);
        ASSERT_EQ(closed.half_states, engine.half_states);
        ASSERT_EQ(closed.delta, engine.delta);
        ASSERT_LE(closed.engine_fallbacks, 2U);
        for (std::size_t n = 1; n <= 30; ++n) ASSERT_EQ(engine.states[n].b(0, 1), Multiplicity(beta * alpha * gamma));
      }
    }
  }
}

TEST(Restriction, AltOrbitCommutesWithRestrictionToFourVertices) {
  // Two extra frozen vertices hanging off C and D.
  const Quiver q = new_quiver({{"A", true}, {"B", true}, {"C", false}, {"D", false}, {"E", true}, {"F", true}},
                              {{"A", "C", 2}, {"C", "D", 3}, {"D", "B", 1}, {"E", "D", 2}, {"C", "F", 1}, {"E", "A", 1}});
  const auto full = alt_orbit(q, "C", "D", 15);
  const std::vector<std::vector<VertexId>> subsets{
      {"A", "B", "C", "D"}, {"E", "F", "C", "D"}, {"A", "E", "C", "D"}, {"B", "F", "C", "D"}};
  for (const auto& keep : subsets) {
    const auto part = alt_orbit(restrict_to(q, keep), "C", "D", 15);
    for (std::size_t n = 0; n <= 15; ++n) ASSERT_EQ(restrict_to(full.states[n], keep), part.states[n]);
  }
}

TEST(Growth, Classification) {
  const auto lin = classify_growth(alt_orbit(fixtures::two_mutable(1, 2, 1), "C", "D", 30));
  EXPECT_EQ(lin.kind, GrowthClass::Kind::Linear);
  for (int alpha = 3; alpha <= 5; ++alpha) {
    const auto g = classify_growth(alt_orbit(fixtures::two_mutable(1, alpha, 1), "C", "D", 30));
    EXPECT_EQ(g.kind, GrowthClass::Kind::Exponential) << alpha;
  }
  EXPECT_EQ(error_of([] { classify_growth(alt_orbit(fixtures::two_mutable(1, 2, 1), "C", "D", 11)); }),
            ErrorCode::Inconclusive);
  EXPECT_EQ(growth_name(GrowthClass::Kind::Linear), "linear");
  const Quiver isolated = new_quiver({{"A", true}, {"B", true}, {"C", false}, {"D", false}}, {{"C", "D", 3}});
  EXPECT_EQ(classify_growth(alt_orbit(isolated, "C", "D", 12)).kind, GrowthClass::Kind::Trivial);
}

TEST(Ratio, Targets) {
  EXPECT_DOUBLE_EQ(ratio_target(2), 1.0);
  EXPECT_NEAR(ratio_target(3), (3.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(ratio_target(4), 3.732050807568877, 1e-14);
}

TEST(Ratio, ConvergesForAlphaThree) {
  const auto t = alt_orbit(fixtures::two_mutable(1, 3, 1), "C", "D", 60);
  const auto r = ratio_limit_check(t, "A", 1e-9);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.estimate, 2.618033988749895, 1e-12);
}

TEST(Ratio, AlphaTwoApproachesOneSlowly) {
  const auto t = alt_orbit(fixtures::two_mutable(1, 2, 1), "C", "D", 60);
  const auto r = ratio_limit_check(t, "A", 1e-9);
  EXPECT_EQ(r.exact, Rational(121, 120));
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(ratio_limit_check(t, "A", 1e-2).converged);
}

TEST(Ratio, Errors) {
  const auto t = alt_orbit(fixtures::two_mutable(1, 3, 1), "C", "D", 5);
  EXPECT_EQ(error_of([&] { ratio_limit_check(t, "C", 1e-9); }), ErrorCode::DegenerateVertex);
  const auto one = alt_orbit(fixtures::two_mutable(1, 1, 1), "C", "D", 5);
  EXPECT_EQ(error_of([&] { ratio_limit_check(one, "A", 1e-9); }), ErrorCode::InvalidWeights);
  const Quiver lonely = new_quiver({{"A", true}, {"B", true}, {"C", false}, {"D", false}, {"Z", true}},
                                   {{"A", "C", 1}, {"C", "D", 3}, {"D", "B", 1}});
  EXPECT_EQ(error_of([&] { ratio_limit_check(alt_orbit(lonely, "C", "D", 5), "Z", 1e-9); }),
            ErrorCode::DegenerateVertex);
}

TEST(Ratio, EngineRatiosFollowTheRatioMap) {
  for (int alpha = 3; alpha <= 5; ++alpha) {
    const auto t = alt_orbit(fixtures::two_mutable(2, alpha, 1), "C", "D", 12);
    for (std::size_t n = 1; n < 12; ++n) {
      const Rational now(abs(t.states[n].b(0, 2)), abs(t.states[n].b(0, 3)));
      const Rational next(abs(t.states[n + 1].b(0, 2)), abs(t.states[n + 1].b(0, 3)));
      ASSERT_EQ(ratio_map(alpha, now), next);
    }
  }
}

TEST(Ratio, FixedPointsOfTheRatioMap) {
  for (int alpha = 3; alpha <= 8; ++alpha) {
    const long double a = alpha;
    const long double plus = (a + std::sqrt(a * a - 4)) / 2, minus = (a - std::sqrt(a * a - 4)) / 2;
    for (long double r : {plus, minus}) {
      EXPECT_NEAR(static_cast<double>(r * r - a * r + 1), 0.0, 1e-12);
      EXPECT_NEAR(static_cast<double>(a - r / (a * r - 1)), static_cast<double>(r), 1e-12);
    }
    // Start from the gadget's first ratio x/y = (alpha^2 - 1)/alpha.
    const Rational start(Multiplicity(alpha * alpha - 1), Multiplicity(alpha));
    const Rational end = iterate_ratio_map(alpha, start, 200);
    EXPECT_NEAR(to_double(end), ratio_target(alpha), 1e-12);
  }
}

TEST(PathQuiver, Construction) {
  const Quiver direct = build_path_quiver({2});
  EXPECT_EQ(direct, new_quiver({{"A", true}, {"B", true}}, {{"A", "B", 2}}));
  const Quiver p = build_path_quiver({1, 2, 1});
  EXPECT_EQ(p, new_quiver({{"A", true}, {"C1", false}, {"C2", false}, {"B", true}},
                          {{"A", "C1", 1}, {"C1", "C2", 2}, {"C2", "B", 1}}));
  EXPECT_EQ(error_of([] { build_path_quiver({}); }), ErrorCode::InvalidWeights);
  EXPECT_EQ(error_of([] { build_path_quiver({1, 0}); }), ErrorCode::InvalidWeights);
}

TEST(Conjecture, Examples) {
  SearchLimits l;
  l.max_states = 2000;
  const auto r = conjecture_scan({1, 2, 1}, l);
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.product, 2);
  EXPECT_EQ(r.observed, (std::set<Multiplicity>{0, 2}));
  EXPECT_FALSE(r.exhausted);

  const auto trivial = conjecture_scan({5}, l);
  EXPECT_TRUE(trivial.exhausted);
  EXPECT_EQ(trivial.observed, (std::set<Multiplicity>{5}));
  EXPECT_TRUE(trivial.consistent);

  const auto finite = conjecture_scan({2, 1, 3}, l);
  EXPECT_TRUE(finite.exhausted);
  EXPECT_TRUE(finite.consistent);
  EXPECT_EQ(finite.observed, (std::set<Multiplicity>{0, 6}));

  const auto k3 = conjecture_scan({1, 1, 1, 1}, l);
  EXPECT_EQ(k3.product, 1);
  EXPECT_FALSE(k3.observed.empty());
}
