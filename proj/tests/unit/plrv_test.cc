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

#include "pkdp/plrv.h"

#include <vector>

#include <gtest/gtest.h>

#include "pkdp/scenarios.h"
#include "testing/brute_force.h"
#include "testing/generators.h"

namespace pkdp {
namespace {

using testing::Gen;
using Value = PlrvValue<Rational>;

Rational Q(int num, int den) { return Rational(num) / Rational(den); }

DatabaseDistribution<Rational> Iid(size_t n, Rational p) {
  return DatabaseDistribution<Rational>::IidBernoulli(BinaryAlphabet(), n, p)
      .value();
}

KnowledgeFunction<Rational> Knowledge(const DatabaseSpace& space,
                                      const KnowledgeSpec& spec) {
  return MakeKnowledge<Rational>(space, spec).value();
}

Mechanism<Rational> Make(const DatabaseSpace& space, const MechanismSpec& spec) {
  return MakeMechanism<Rational>(space, spec).value();
}

TEST(PlrvConventionTest, CascadeOrder) {
  const Rational one(1), zero(0);
  EXPECT_TRUE(PartialPlrvOf(one, one, false).is_zero_by_convention());
  EXPECT_TRUE(PartialPlrvOf(zero, zero, false).is_zero_by_convention());
  EXPECT_EQ(PartialPlrvOf(zero, zero, true).kind(),
            Value::Kind::kNegativeInfinity);
  EXPECT_EQ(PartialPlrvOf(one, zero, true).kind(),
            Value::Kind::kPositiveInfinity);
  EXPECT_EQ(PartialPlrvOf(Q(1, 2), Q(1, 4), true), Value::Finite(Rational(2)));
}

TEST(PlrvConventionTest, ConventionZeroComparesEqualToFiniteZero) {
  const Value convention = Value::ZeroByConvention();
  const Value computed = Value::Finite(Rational(1));
  EXPECT_EQ(convention, computed);
  EXPECT_TRUE(convention.is_zero_by_convention());
  EXPECT_FALSE(computed.is_zero_by_convention());
  EXPECT_EQ(convention.value(), 0.0);
  EXPECT_EQ(computed.value(), 0.0);
}

TEST(PlrvConventionTest, IntegrandLimits) {
  const Rational e(3);
  EXPECT_EQ(Integrand(Value::PositiveInfinity(), e), Rational(1));
  EXPECT_EQ(Integrand(Value::NegativeInfinity(), e), Rational(0));
  EXPECT_EQ(Integrand(Value::ZeroByConvention(), e), Rational(0));
  EXPECT_EQ(Integrand(Value::ZeroByConvention(), Q(1, 2)), Q(1, 2));
  EXPECT_EQ(Integrand(Value::Finite(Rational(6)), e), Q(1, 2));
  EXPECT_EQ(Integrand(Value::Finite(Rational(2)), e), Rational(0));
}

TEST(PlrvClassicalTest, ConstantMechanismHasNoLoss) {
  const DatabaseSpace space(BinaryAlphabet(), 2);
  const auto mech = Make(space, ConstantSpec{"c"});
  const Database d1{{0, 0}}, d2{{1, 1}};
  EXPECT_EQ(PlrvClassical(mech, d1, d2, 0), Value::Finite(Rational(1)));
}

TEST(PlrvClassicalTest, DisjointSupportsAreInfinite) {
  const DatabaseSpace space(BinaryAlphabet(), 1);
  const auto mech = Make(space, CountSpec{});
  const Database no{{0}}, yes{{1}};
  EXPECT_EQ(PlrvClassical(mech, no, yes, 0).kind(),
            Value::Kind::kPositiveInfinity);
  EXPECT_EQ(PlrvClassical(mech, no, yes, 1).kind(),
            Value::Kind::kNegativeInfinity);
}

TEST(CondOutputProbTest, RemainingCoin) {
  const auto theta = Iid(2, Q(1, 2));
  const auto zeta = Knowledge(theta.space(), NoKnowledgeSpec{});
  const auto mech = Make(theta.space(), CountSpec{});
  EXPECT_EQ(CondOutputProb(mech, theta, zeta, 0, 1, 2, KnowledgeValue{}).value(),
            Q(1, 2));
}

TEST(CondOutputProbTest, PrefixRevealsFirstRecord) {
  const auto theta = Iid(3, Q(1, 4));
  const auto zeta = Knowledge(theta.space(), PrefixKnowledgeSpec{1});
  const auto mech = Make(theta.space(), CountSpec{});
  EXPECT_EQ(
      CondOutputProb(mech, theta, zeta, 1, 1, 1, KnowledgeValue{{0}}).value(),
      Q(3, 4));
}

TEST(CondOutputProbTest, ImpossibleEventIsTyped) {
  const auto theta = Iid(2, Rational(0));
  const auto zeta = Knowledge(theta.space(), NoKnowledgeSpec{});
  const auto mech = Make(theta.space(), CountSpec{});
  EXPECT_TRUE(IsZeroMassEvent(
      CondOutputProb(mech, theta, zeta, 0, 1, 0, KnowledgeValue{}).status()));
}

TEST(PlrvPartialTest, ThresholdedPrefixExampleIsFiniteZero) {
  const auto theta = Iid(4, Q(1, 2));
  const auto zeta = Knowledge(theta.space(), PrefixKnowledgeSpec{2});
  const auto mech = Make(theta.space(), ThresholdedCountSpec{2, true, {}});
  const int three = *mech.FindOutput("3");
  const auto value = PlrvPartial(mech, theta, zeta, 2, 1, 0, three,
                                 KnowledgeValue{{1, 1}})
                         .value();
  EXPECT_EQ(value.kind(), Value::Kind::kFinite);
  EXPECT_EQ(value.ratio(), Rational(1));
}

TEST(PlrvPartialTest, RevealedTargetTriggersConvention) {
  const auto theta = Iid(3, Q(1, 2));
  const auto zeta = Knowledge(theta.space(), PrefixKnowledgeSpec{2});
  const auto mech = Make(theta.space(), CountSpec{});
  const auto value =
      PlrvPartial(mech, theta, zeta, 0, 1, 0, 1, KnowledgeValue{{1, 0}}).value();
  EXPECT_TRUE(value.is_zero_by_convention());
}

class PlrvPropertyTest : public ::testing::TestWithParam<uint64_t> {};

TEST_P(PlrvPropertyTest, Antisymmetry) {
  Gen gen(GetParam());
  testing::GenOptions opts;
  opts.max_databases = 243;
  const auto scenario = testing::RandomScenario<Rational>(gen, opts);
  const auto& mech = scenario.mechanism;
  const auto& theta = scenario.distributions[0];
  const auto& zeta = scenario.knowledge[0];
  const testing::BruteForce<Rational> oracle(mech, theta, zeta);
  const size_t i =
      static_cast<size_t>(gen.Int(0, static_cast<int64_t>(theta.n()) - 1));
  const int radix = static_cast<int>(theta.space().alphabet().size());
  for (const KnowledgeValue& bhat : oracle.Support()) {
    for (int a = 0; a < radix; ++a) {
      for (int b = a + 1; b < radix; ++b) {
        const auto ca = oracle.Condition(i, a, bhat);
        const auto cb = oracle.Condition(i, b, bhat);
        const bool possible = Rational(0) < ca.mass && Rational(0) < cb.mass;
        for (size_t o = 0; o < mech.num_outputs(); ++o) {
          const int out = static_cast<int>(o);
          const auto ab = PlrvPartial(mech, theta, zeta, i, a, b, out, bhat);
          const auto ba = PlrvPartial(mech, theta, zeta, i, b, a, out, bhat);
          ASSERT_TRUE(ab.ok() && ba.ok());
          if (possible && ca.outputs[o] == 0 && cb.outputs[o] == 0) {
            // Unreachable from either side: the ordered cascade stops at
            // the a-side zero in both directions.
            EXPECT_EQ(ab->kind(), Value::Kind::kNegativeInfinity);
            EXPECT_EQ(ba->kind(), Value::Kind::kNegativeInfinity);
            continue;
          }
          EXPECT_EQ(ab->Negated().kind(), ba->kind());
          EXPECT_EQ(ab->Negated(), *ba);
        }
      }
    }
  }
}

TEST_P(PlrvPropertyTest, AllButOneReducesToClassical) {
  Gen gen(GetParam() + 500);
  testing::GenOptions opts;
  opts.max_databases = 243;
  opts.zero_rate = 0.0;  // full support
  const DatabaseSpace space = testing::RandomSpace(gen, opts);
  const auto theta = DatabaseDistribution<Rational>::Tabulated(
                         space, testing::RandomWeights<Rational>(
                                    gen, *space.Size(), opts.zero_rate))
                         .value();
  testing::GenOptions mech_opts = opts;
  mech_opts.zero_rate = 0.3;
  const auto mech = testing::RandomMechanism<Rational>(gen, space, mech_opts);
  const size_t i =
      static_cast<size_t>(gen.Int(0, static_cast<int64_t>(space.n()) - 1));
  const auto zeta = Knowledge(space, AllButKnowledgeSpec{i});
  const int radix = static_cast<int>(space.alphabet().size());
  ForEachDatabase(space, [&](uint64_t, const Database& db) {
    if (db[i] != 0) return;
    KnowledgeValue rest;
    for (size_t j = 0; j < space.n(); ++j) {
      if (j != i) rest.symbols.push_back(db[j]);
    }
    for (int a = 0; a < radix; ++a) {
      for (int b = 0; b < radix; ++b) {
        if (a == b) continue;
        Database da = db, dbb = db;
        da.records[i] = a;
        dbb.records[i] = b;
        for (size_t o = 0; o < mech.num_outputs(); ++o) {
          const int out = static_cast<int>(o);
          const auto partial =
              PlrvPartial(mech, theta, zeta, i, a, b, out, rest).value();
          const auto classical = PlrvClassical(mech, da, dbb, out);
          if (classical.is_zero_by_convention()) {
            // Output unreachable from both neighbours.
            EXPECT_EQ(partial.kind(), Value::Kind::kNegativeInfinity);
            continue;
          }
          EXPECT_EQ(partial.kind(), classical.kind());
          EXPECT_EQ(partial, classical);
        }
      }
    }
  });
}

TEST_P(PlrvPropertyTest, NoKnowledgeOverProductIgnoresTheOtherRecords) {
  Gen gen(GetParam() + 1000);
  testing::GenOptions opts;
  opts.max_databases = 243;
  const DatabaseSpace space = testing::RandomSpace(gen, opts);
  std::vector<std::vector<Rational>> marginals;
  for (size_t i = 0; i < space.n(); ++i) {
    marginals.push_back(
        testing::RandomWeights<Rational>(gen, space.alphabet().size(), 0.0));
  }
  const auto theta = DatabaseDistribution<Rational>::ProductCategorical(
                         space.alphabet(), marginals)
                         .value();
  const auto mech = testing::RandomMechanism<Rational>(gen, space, opts);
  const auto none = Knowledge(space, NoKnowledgeSpec{});
  // Revealing a random other record must not change the loss once that
  // record is averaged out; with no knowledge the loss is a single value.
  const size_t i =
      static_cast<size_t>(gen.Int(0, static_cast<int64_t>(space.n()) - 1));
  const testing::BruteForce<Rational> oracle(mech, theta, none);
  for (size_t o = 0; o < mech.num_outputs(); ++o) {
    const int out = static_cast<int>(o);
    const auto value =
        PlrvPartial(mech, theta, none, i, 0, 1, out, KnowledgeValue{}).value();
    const auto ca = oracle.Condition(i, 0, KnowledgeValue{});
    const auto cb = oracle.Condition(i, 1, KnowledgeValue{});
    EXPECT_EQ(value, PartialPlrvOf(ca.outputs[o], cb.outputs[o], true));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, PlrvPropertyTest, ::testing::Range<uint64_t>(0, 30));

}  // namespace
}  // namespace pkdp
