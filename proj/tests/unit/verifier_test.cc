// Copyright 2026 The pkdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pkdp/verifier.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "pkdp/scenarios.h"
#include "testing/brute_force.h"
#include "testing/generators.h"

namespace pkdp {
namespace {

using testing::BruteForce;
using testing::Gen;

constexpr int kNo = 0;
constexpr int kYes = 1;

Rational Q(int num, int den) { return Rational(num) / Rational(den); }

template <typename S>
Scenario<S> Build(const ScenarioSpec& spec) {
  return MakeScenario<S>(spec).value();
}

ScenarioSpec SingleSpec(size_t n, DistributionSpec theta, KnowledgeSpec zeta,
                        MechanismSpec mech) {
  ScenarioSpec spec;
  spec.alphabet = {"No", "Yes"};
  spec.n = n;
  spec.distributions = {std::move(theta)};
  spec.knowledge = {std::move(zeta)};
  spec.mechanism = std::move(mech);
  return spec;
}

// Scaled thresholding: n=6, p=0.1, T=3, prefix(3), targets 4..6 (1-based).
Scenario<Rational> ScaledThresholding() {
  ScenarioSpec spec = ThresholdingScenario(6, 0.1, 3, 3);
  return Build<Rational>(spec);
}

TEST(TightDeltaIndistTest, Examples) {
  const std::vector<double> p = {0.5, 0.5}, q = {0.25, 0.75};
  const auto eps0 = Epsilon<double>::FromValue(0.0);
  EXPECT_DOUBLE_EQ(TightDeltaIndist<double>(p, q, eps0), 0.25);
  EXPECT_EQ(TightDeltaIndist<double>(p, p, Epsilon<double>::FromValue(0.3)),
            0.0);
  const std::vector<double> x = {1.0, 0.0}, y = {0.0, 1.0};
  EXPECT_EQ(TightDeltaIndist<double>(x, y, Epsilon<double>::FromValue(1.0)),
            1.0);
}

TEST(TightDeltaDpTest, Examples) {
  const DatabaseSpace space2(BinaryAlphabet(), 2);
  const auto constant = MakeMechanism<double>(space2, ConstantSpec{}).value();
  EXPECT_EQ(TightDeltaDp(constant, Epsilon<double>::FromValue(0.7))->delta, 0.0);
  const auto count = MakeMechanism<double>(space2, CountSpec{}).value();
  EXPECT_EQ(TightDeltaDp(count, Epsilon<double>::FromValue(1.0))->delta, 1.0);
  const DatabaseSpace space1(BinaryAlphabet(), 1);
  const auto rr =
      MakeMechanism<Rational>(space1, RandomizedResponseSpec{0.25}).value();
  EXPECT_EQ(TightDeltaDp(rr, Epsilon<Rational>::FromValue(0.0))->delta,
            Q(1, 2));
}

TEST(TightDeltaDpTest, RefusesSpacesBeyondTheBudget) {
  const DatabaseSpace space(BinaryAlphabet(), 40);
  const auto count = MakeMechanism<double>(space, CountSpec{}).value();
  EXPECT_TRUE(
      IsInfeasible(TightDeltaDp(count, Epsilon<double>::FromValue(0.0)).status()));
}

TEST(ApkTermTest, ConstantMechanismIsPrivate) {
  const auto sc = Build<Rational>(SingleSpec(3, IidBernoulliSpec{0.5},
                                             PrefixKnowledgeSpec{1},
                                             ConstantSpec{}));
  for (int b : {kNo, kYes}) {
    EXPECT_EQ(ApkTerm(sc.mechanism, sc.distributions[0], sc.knowledge[0], 2,
                      1 - b, b, KnowledgeValue{{kYes}},
                      Epsilon<Rational>::FromValue(0.0))
                  .value(),
              Rational(0));
    EXPECT_EQ(PpkTerm(sc.mechanism, sc.distributions[0], sc.knowledge[0], 2,
                      1 - b, b, Epsilon<Rational>::FromValue(0.0))
                  .value(),
              Rational(0));
  }
}

TEST(ApkTermTest, CountWithoutKnowledge) {
  const auto sc = Build<Rational>(SingleSpec(2, IidBernoulliSpec{0.5},
                                             NoKnowledgeSpec{}, CountSpec{}));
  EXPECT_EQ(ApkTerm(sc.mechanism, sc.distributions[0], sc.knowledge[0], 1, kYes,
                    kNo, KnowledgeValue{}, Epsilon<Rational>::FromValue(0.0))
                .value(),
            Q(1, 2));
}

TEST(ApkTermTest, ScaledThresholdingPinned) {
  const auto sc = ScaledThresholding();
  struct Row {
    double epsilon, apk, ppk;
  };
  const Row rows[] = {
      {0.0, 0.81, 0.0081},
      {0.5, 0.6867429585669756521, 0.0078015882154779410524},
      {1.0, 0.48352645259278140528, 0.0073095903589088391917},
      {2.0, 0.11610943901069349773, 0.0056810642922994179364},
  };
  for (const Row& row : rows) {
    const auto eps = Epsilon<Rational>::FromValue(row.epsilon);
    const Rational apk =
        ApkTerm(sc.mechanism, sc.distributions[0], sc.knowledge[0], 3, kYes,
                kNo, KnowledgeValue{{kYes, kYes, kYes}}, eps)
            .value();
    const Rational ppk = PpkTerm(sc.mechanism, sc.distributions[0],
                                 sc.knowledge[0], 3, kYes, kNo, eps)
                             .value();
    EXPECT_NEAR(ToDouble(apk), row.apk, 1e-12) << row.epsilon;
    EXPECT_NEAR(ToDouble(ppk), row.ppk, 1e-12) << row.epsilon;
    if (row.epsilon == 0.0) {
      EXPECT_EQ(apk, Q(81, 100));
      EXPECT_EQ(ppk, Q(81, 10000));
      EXPECT_GE(apk, Rational(10) * ppk);
    }
  }
}

TEST(TightDeltaTest, ScaledThresholdingCurvePinned) {
  const auto sc = ScaledThresholding();
  const std::vector<double> eps = {0.0, 0.5, 1.0, 2.0};
  const std::vector<double> ppk = {0.0081, 0.0078015882154779410524,
                                   0.0073095903589088391917,
                                   0.0056810642922994179364};
  const auto apk_curve = DeltaCurve(AttackerModel::kApk, sc, eps).value();
  const auto ppk_curve = DeltaCurve(AttackerModel::kPpk, sc, eps).value();
  for (size_t e = 0; e < eps.size(); ++e) {
    EXPECT_EQ(apk_curve[e].delta, Q(81, 100));
    const auto& arg = *apk_curve[e].argmax;
    EXPECT_EQ(arg.index, 3u);
    EXPECT_EQ(arg.a, kNo);
    EXPECT_EQ(arg.b, kYes);
    EXPECT_EQ(arg.bhat->symbols, (std::vector<int>{kYes, kYes, kYes}));
    EXPECT_NEAR(ToDouble(ppk_curve[e].delta), ppk[e], 1e-12);
    EXPECT_FALSE(ppk_curve[e].argmax->bhat.has_value());
    EXPECT_GE(apk_curve[e].delta, Rational(10) * ppk_curve[e].delta);
  }
}

TEST(TightDeltaTest, PointMassLeavesNoUncertainty) {
  const auto sc = Build<Rational>(SingleSpec(
      3, TabulatedDistributionSpec{{{{"Yes", "No", "Yes"}, 1.0}}},
      NoKnowledgeSpec{}, CountSpec{}));
  EXPECT_EQ(ApkTightDelta(sc, Epsilon<Rational>::FromValue(0.0))->delta,
            Rational(0));
  EXPECT_EQ(PpkTightDelta(sc, Epsilon<Rational>::FromValue(0.0))->delta,
            Rational(0));
}

TEST(TightDeltaTest, ImpossibleHypothesisContributesZero) {
  // Pr[D(i) = Yes] = 0: the PPK term is undefined, the quantifier skips it.
  const auto sc = Build<Rational>(SingleSpec(2, IidBernoulliSpec{0.0},
                                             NoKnowledgeSpec{}, CountSpec{}));
  EXPECT_TRUE(IsZeroMassEvent(PpkTerm(sc.mechanism, sc.distributions[0],
                                      sc.knowledge[0], 0, kYes, kNo,
                                      Epsilon<Rational>::FromValue(0.0))
                                  .status()));
  EXPECT_EQ(PpkTightDelta(sc, Epsilon<Rational>::FromValue(0.0))->delta,
            Rational(0));
  EXPECT_EQ(ApkTightDelta(sc, Epsilon<Rational>::FromValue(0.0))->delta,
            Rational(0));
}

TEST(ConditionFamilyTest, Examples) {
  const auto sc = Build<Rational>(SingleSpec(2, IidBernoulliSpec{0.5},
                                             PrefixKnowledgeSpec{1}, CountSpec{}));
  const auto family = ConditionFamily<Rational>(sc.distributions, sc.knowledge)
                          .value();
  ASSERT_EQ(family.size(), 2u);
  for (int first : {kNo, kYes}) {
    const auto& theta = family[first];
    EXPECT_EQ(theta.RecordMarginal(0, first), Rational(1));
    EXPECT_EQ(theta.RecordMarginal(1, kYes), Q(1, 2));
  }

  const DatabaseSpace& space = sc.mechanism.space();
  const std::vector<KnowledgeFunction<Rational>> none = {
      MakeKnowledge<Rational>(space, NoKnowledgeSpec{}).value()};
  const auto same = ConditionFamily<Rational>(sc.distributions, none).value();
  ASSERT_EQ(same.size(), 1u);
  EXPECT_EQ(same[0].Expand(), sc.distributions[0].Expand());

  const std::vector<KnowledgeFunction<Rational>> identity = {
      MakeKnowledge<Rational>(space, IdentityKnowledgeSpec{}).value()};
  const auto points = ConditionFamily<Rational>(sc.distributions, identity)
                          .value();
  ASSERT_EQ(points.size(), 4u);
  for (const auto& theta : points) {
    int ones = 0;
    for (const Rational& w : theta.Expand()) {
      if (w == Rational(1)) ++ones;
    }
    EXPECT_EQ(ones, 1);
  }
}

TEST(DeltaCurveTest, ConstantMechanismIsZeroEverywhere) {
  const auto sc = Build<double>(SingleSpec(3, IidBernoulliSpec{0.3},
                                           IndependentRevealSpec{0.5},
                                           ConstantSpec{}));
  const std::vector<double> eps = {0.0, 0.1, 1.0};
  for (auto model : {AttackerModel::kApk, AttackerModel::kPpk}) {
    const auto curve = DeltaCurve(model, sc, eps).value();
    for (const auto& point : curve) EXPECT_EQ(point.delta, 0.0);
  }
}

TEST(EpsilonForDeltaTest, Examples) {
  const auto rr = Build<double>(SingleSpec(1, IidBernoulliSpec{0.5},
                                           NoKnowledgeSpec{},
                                           RandomizedResponseSpec{0.25}));
  EXPECT_NEAR(EpsilonForDelta(AttackerModel::kClassicalDp, rr, 0.0).value(),
              std::log(3.0), 1e-6);
  const auto constant = Build<double>(SingleSpec(
      2, IidBernoulliSpec{0.5}, NoKnowledgeSpec{}, ConstantSpec{}));
  EXPECT_EQ(EpsilonForDelta(AttackerModel::kClassicalDp, constant, 0.01).value(),
            0.0);
  const auto count = Build<double>(
      SingleSpec(2, IidBernoulliSpec{0.5}, NoKnowledgeSpec{}, CountSpec{}));
  EXPECT_EQ(EpsilonForDelta(AttackerModel::kClassicalDp, count, 0.5).value(),
            std::numeric_limits<double>::infinity());
  EXPECT_EQ(EpsilonForDelta(AttackerModel::kApk, count, 1.5).status().code(),
            absl::StatusCode::kInvalidArgument);
}

class VerifierPropertyTest : public ::testing::TestWithParam<uint64_t> {};

TEST_P(VerifierPropertyTest, TermsMatchTheOracleAndDecompose) {
  Gen gen(GetParam());
  testing::GenOptions opts;
  opts.max_databases = 243;
  const auto sc = testing::RandomScenario<Rational>(gen, opts);
  const auto& theta = sc.distributions[0];
  const auto& zeta = sc.knowledge[0];
  const BruteForce<Rational> oracle(sc.mechanism, theta, zeta);
  const auto eps = Epsilon<Rational>::FromFactor(Q(static_cast<int>(gen.Int(2, 8)), 2));
  const int radix = static_cast<int>(theta.space().alphabet().size());
  const auto engine =
      ExactTermEngine<Rational>::Create(sc.mechanism, theta, zeta).value();
  const std::vector<KnowledgeValue> support = oracle.Support();
  for (size_t i : sc.TargetIndices()) {
    const auto stats = engine.ForIndex(i);
    for (int a = 0; a < radix; ++a) {
      const Rational record_mass = oracle.RecordMass(i, a);
      for (int b = 0; b < radix; ++b) {
        if (a == b) continue;
        Rational weighted(0);
        for (size_t s = 0; s < support.size(); ++s) {
          const KnowledgeValue& bhat = support[s];
          const auto k = engine.joint().FindKnowledge(bhat);
          ASSERT_TRUE(k.has_value());
          const auto ca = oracle.Condition(i, a, bhat);
          const Rational apk = stats.ApkTerm(a, b, *k, eps);
          EXPECT_EQ(apk, oracle.Apk(i, a, b, bhat, eps.factor));
          // The standalone entry point agrees on a few values.
          if (s < 2) {
            EXPECT_EQ(apk, ApkTerm(sc.mechanism, theta, zeta, i, a, b, bhat,
                                   eps)
                               .value());
          }
          if (Rational(0) < record_mass) {
            weighted += ca.mass / record_mass * apk;
          }
        }
        const auto ppk = PpkTerm(sc.mechanism, theta, zeta, i, a, b, eps);
        if (!(Rational(0) < record_mass)) {
          EXPECT_TRUE(IsZeroMassEvent(ppk.status()));
          continue;
        }
        EXPECT_EQ(ppk.value(), weighted);
        EXPECT_EQ(ppk.value(), oracle.Ppk(i, a, b, eps.factor));
      }
    }
  }
}

TEST_P(VerifierPropertyTest, IndistinguishabilityEquivalence) {
  Gen gen(GetParam() + 100);
  testing::GenOptions opts;
  opts.max_databases = 243;
  const auto sc = testing::RandomScenario<Rational>(gen, opts);
  const auto& theta = sc.distributions[0];
  const auto& zeta = sc.knowledge[0];
  const BruteForce<Rational> oracle(sc.mechanism, theta, zeta);
  const auto eps = Epsilon<Rational>::FromFactor(Q(static_cast<int>(gen.Int(2, 8)), 2));
  const int radix = static_cast<int>(theta.space().alphabet().size());
  const auto engine =
      ExactTermEngine<Rational>::Create(sc.mechanism, theta, zeta).value();
  for (size_t i : sc.TargetIndices()) {
    const auto stats = engine.ForIndex(i);
    for (const KnowledgeValue& bhat : oracle.Support()) {
      const uint32_t k = *engine.joint().FindKnowledge(bhat);
      for (int a = 0; a < radix; ++a) {
        for (int b = a + 1; b < radix; ++b) {
          const auto ca = oracle.Condition(i, a, bhat);
          const auto cb = oracle.Condition(i, b, bhat);
          if (!(Rational(0) < ca.mass && Rational(0) < cb.mass)) continue;
          const Rational both = std::max(stats.ApkTerm(a, b, k, eps),
                                         stats.ApkTerm(b, a, k, eps));
          EXPECT_EQ(both, TightDeltaIndist<Rational>(ca.outputs, cb.outputs, eps));
        }
      }
    }
  }
}

TEST_P(VerifierPropertyTest, ClassicalConsistency) {
  Gen gen(GetParam() + 200);
  const auto sc = testing::RandomScenario<Rational>(gen, {});
  const BruteForce<Rational> oracle(sc.mechanism, sc.distributions[0],
                                    sc.knowledge[0]);
  for (int f : {2, 3, 5}) {
    const auto eps = Epsilon<Rational>::FromFactor(Q(f, 2));
    const auto dp = TightDeltaDp(sc.mechanism, eps).value();
    EXPECT_EQ(dp.delta, oracle.Dp(eps.factor));
    if (dp.argmax.has_value()) {
      EXPECT_FALSE(dp.argmax->theta.has_value());
      EXPECT_EQ(dp.argmax->model, AttackerModel::kClassicalDp);
    }
  }
}

TEST_P(VerifierPropertyTest, DominationMonotonicityAndRange) {
  Gen gen(GetParam() + 300);
  const auto sc = testing::RandomScenario<double>(gen, {});
  const std::vector<double> eps = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  const auto apk = DeltaCurve(AttackerModel::kApk, sc, eps).value();
  const auto ppk = DeltaCurve(AttackerModel::kPpk, sc, eps).value();
  for (size_t e = 0; e < eps.size(); ++e) {
    EXPECT_LE(ppk[e].delta, apk[e].delta + 1e-12);
    for (const auto* curve : {&apk, &ppk}) {
      EXPECT_GE((*curve)[e].delta, 0.0);
      EXPECT_LE((*curve)[e].delta, 1.0 + 1e-12);
      EXPECT_EQ((*curve)[e].epsilon, eps[e]);
      if (e > 0) EXPECT_LE((*curve)[e].delta, (*curve)[e - 1].delta + 1e-12);
    }
  }
}

TEST_P(VerifierPropertyTest, ArgmaxReproducesTheMaximum) {
  Gen gen(GetParam() + 400);
  const auto sc = testing::RandomScenario<Rational>(gen, {});
  const auto eps = Epsilon<Rational>::FromValue(0.0);
  const auto apk = ApkTightDelta(sc, eps).value();
  if (apk.argmax.has_value()) {
    const auto& t = *apk.argmax;
    EXPECT_EQ(ApkTerm(sc.mechanism, sc.distributions[*t.theta],
                      sc.knowledge[*t.zeta], t.index, t.a, t.b, *t.bhat, eps)
                  .value(),
              apk.delta);
  }
  const auto ppk = PpkTightDelta(sc, eps).value();
  if (ppk.argmax.has_value() && Rational(0) < ppk.delta) {
    const auto& t = *ppk.argmax;
    EXPECT_FALSE(t.bhat.has_value());
    EXPECT_EQ(PpkTerm(sc.mechanism, sc.distributions[*t.theta],
                      sc.knowledge[*t.zeta], t.index, t.a, t.b, eps)
                  .value(),
              ppk.delta);
  }
}

TEST_P(VerifierPropertyTest, NoKnowledgeMakesBothModelsAgree) {
  Gen gen(GetParam() + 500);
  testing::GenOptions opts;
  opts.max_distributions = 1;
  const DatabaseSpace space = testing::RandomSpace(gen, opts);
  const auto mech = testing::RandomMechanism<Rational>(gen, space, opts);
  const auto theta = testing::RandomDistribution<Rational>(gen, space, opts);
  const auto none = MakeKnowledge<Rational>(space, NoKnowledgeSpec{}).value();
  const auto eps = Epsilon<Rational>::FromFactor(Q(3, 2));
  for (size_t i = 0; i < space.n(); ++i) {
    for (int a = 0; a < 2; ++a) {
      const int b = 1 - a;
      const auto ppk = PpkTerm(mech, theta, none, i, a, b, eps);
      if (!ppk.ok()) continue;
      EXPECT_EQ(*ppk,
                ApkTerm(mech, theta, none, i, a, b, KnowledgeValue{}, eps).value());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, VerifierPropertyTest,
                         ::testing::Range<uint64_t>(0, 40));

}  // namespace
}  // namespace pkdp
