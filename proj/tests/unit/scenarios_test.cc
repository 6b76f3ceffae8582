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

#include "pkdp/scenarios.h"

#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace pkdp {
namespace {

const RecordAlphabet kBinary = BinaryAlphabet();

std::vector<double> Dense(const Mechanism<double>& mech, const Database& db) {
  std::vector<double> row(mech.num_outputs(), 0.0);
  for (const auto& [o, p] : mech.Evaluate(db)) row[o] += p;
  return row;
}

// Output label with the largest probability.
std::string Mode(const Mechanism<double>& mech, const Database& db) {
  const auto row = Dense(mech, db);
  size_t best = 0;
  for (size_t o = 1; o < row.size(); ++o) {
    if (row[o] > row[best]) best = o;
  }
  return mech.outputs()[best];
}

Database WithYes(size_t n, size_t yes) {
  Database db{std::vector<int>(n, 0)};
  for (size_t j = 0; j < yes; ++j) db.records[j] = 1;
  return db;
}

TEST(MakeDistributionTest, Examples) {
  const auto point =
      MakeDistribution<double>(kBinary, 3, IidBernoulliSpec{0.0}).value();
  EXPECT_EQ(point.Probability(Database{{0, 0, 0}}), 1.0);
  EXPECT_EQ(point.Probability(Database{{0, 1, 0}}), 0.0);

  const auto large =
      MakeDistribution<double>(kBinary, 1000, IidBernoulliSpec{1e-6}).value();
  EXPECT_TRUE(large.is_product());
  EXPECT_FALSE(large.space().Size().has_value());
  EXPECT_DOUBLE_EQ(large.RecordMarginal(999, 1), 1e-6);

  const auto uniform =
      MakeDistribution<double>(
          kBinary, 2,
          TabulatedDistributionSpec{{{{"No", "No"}, 0.25},
                                     {{"No", "Yes"}, 0.25},
                                     {{"Yes", "No"}, 0.25},
                                     {{"Yes", "Yes"}, 0.25}}})
          .value();
  EXPECT_EQ(uniform.Expand(), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
}

TEST(MakeDistributionTest, RejectsInvalidParameters) {
  EXPECT_EQ(MakeDistribution<double>(kBinary, 3, IidBernoulliSpec{-0.1})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(MakeDistribution<double>(kBinary, 3, IidBernoulliSpec{1.5})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(MakeDistribution<double>(
                   kBinary, 1,
                   ProductCategoricalSpec{{{0.5, 0.5}, {0.5, 0.5}}})
                   .ok());
  EXPECT_FALSE(MakeDistribution<double>(
                   kBinary, 1, TabulatedDistributionSpec{{{{"Maybe"}, 1.0}}})
                   .ok());
  EXPECT_FALSE(MakeDistribution<double>(
                   kBinary, 1, TabulatedDistributionSpec{{{{"No"}, 0.5}}})
                   .ok());
}

TEST(MakeKnowledgeTest, Examples) {
  const DatabaseSpace big(kBinary, 1000);
  const auto prefix =
      MakeKnowledge<double>(big, PrefixKnowledgeSpec{100}).value();
  EXPECT_TRUE(prefix.deterministic());
  EXPECT_EQ(prefix.PrefixLength(), 100u);

  const DatabaseSpace space(kBinary, 4);
  const auto all_but =
      MakeKnowledge<double>(space, AllButKnowledgeSpec{2}).value();
  EXPECT_EQ(all_but.indices(), (std::vector<size_t>{0, 1, 3}));
  const auto values = all_but.Evaluate(Database{{1, 0, 1, 1}});
  ASSERT_EQ(values.size(), 1u);
  EXPECT_EQ(values[0].first.symbols, (std::vector<int>{1, 0, 1}));

  const auto none = MakeKnowledge<double>(space, NoKnowledgeSpec{}).value();
  EXPECT_EQ(none.SpaceSize(), 1u);
  EXPECT_TRUE(none.deterministic());

  const auto reveal =
      MakeKnowledge<double>(space, IndependentRevealSpec{0.5}).value();
  EXPECT_FALSE(reveal.deterministic());
  EXPECT_EQ(reveal.Evaluate(Database{{0, 0, 0, 0}}).size(), 16u);
}

TEST(MakeKnowledgeTest, RejectsBadIndices) {
  const DatabaseSpace space(kBinary, 4);
  EXPECT_EQ(MakeKnowledge<double>(space, PrefixKnowledgeSpec{5}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(MakeKnowledge<double>(space, AllButKnowledgeSpec{4}).ok());
  EXPECT_FALSE(MakeKnowledge<double>(space, SubsetKnowledgeSpec{{0, 7}}).ok());
  EXPECT_FALSE(MakeKnowledge<double>(space, IndependentRevealSpec{1.5}).ok());
}

TEST(MakeKnowledgeTest, PrefixExtremesMatchNoneAndIdentity) {
  const DatabaseSpace space(kBinary, 3);
  const auto full = MakeKnowledge<double>(space, PrefixKnowledgeSpec{3}).value();
  const auto identity =
      MakeKnowledge<double>(space, IdentityKnowledgeSpec{}).value();
  const auto empty = MakeKnowledge<double>(space, PrefixKnowledgeSpec{0}).value();
  const auto none = MakeKnowledge<double>(space, NoKnowledgeSpec{}).value();
  ForEachDatabase(space, [&](uint64_t, const Database& db) {
    EXPECT_EQ(full.Evaluate(db), identity.Evaluate(db));
    EXPECT_EQ(empty.Evaluate(db), none.Evaluate(db));
  });
}

TEST(MakeMechanismTest, ThresholdingExample) {
  const DatabaseSpace space(kBinary, 1000);
  const auto mech =
      MakeMechanism<double>(space, ThresholdedCountSpec{100, true, {}}).value();
  ASSERT_NE(mech.count_kernel(), nullptr);
  EXPECT_EQ(mech.num_outputs(), 901u);  // "0" and 101..1000
  EXPECT_EQ(Mode(mech, WithYes(1000, 101)), "101");
  EXPECT_EQ(Mode(mech, WithYes(1000, 100)), "0");
  EXPECT_EQ(Mode(mech, WithYes(1000, 0)), "0");
}

TEST(MakeMechanismTest, NonStrictThresholdReleasesAtTheThreshold) {
  const DatabaseSpace space(kBinary, 6);
  const auto mech =
      MakeMechanism<double>(space, ThresholdedCountSpec{3, false, {}}).value();
  EXPECT_EQ(mech.outputs(), (std::vector<std::string>{"0", "3", "4", "5", "6"}));
  EXPECT_EQ(Mode(mech, WithYes(6, 3)), "3");
  EXPECT_EQ(Mode(mech, WithYes(6, 2)), "0");
}

TEST(MakeMechanismTest, SimpleExamples) {
  const DatabaseSpace space(kBinary, 3);
  const auto count = MakeMechanism<double>(space, CountSpec{}).value();
  EXPECT_EQ(Mode(count, WithYes(3, 0)), "0");
  EXPECT_EQ(Mode(count, WithYes(3, 2)), "2");

  const auto constant = MakeMechanism<double>(space, ConstantSpec{"c"}).value();
  EXPECT_EQ(constant.outputs(), (std::vector<std::string>{"c"}));

  const auto rr = MakeMechanism<double>(space, RandomizedResponseSpec{0.0}).value();
  ForEachDatabase(space, [&](uint64_t, const Database& db) {
    const auto row = rr.Evaluate(db);
    ASSERT_EQ(row.size(), 1u);
    EXPECT_EQ(row[0].second, 1.0);
    EXPECT_EQ(rr.outputs()[row[0].first], space.Label(db));
  });
}

TEST(MakeMechanismTest, RejectsInvalidParameters) {
  const DatabaseSpace space(kBinary, 5);
  EXPECT_EQ(MakeMechanism<double>(space, ThresholdedCountSpec{6, true, {}})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(MakeMechanism<double>(space, ThresholdedCountSpec{-1, true, {}})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(MakeMechanism<double>(space, RandomizedResponseSpec{-0.5}).ok());
  EXPECT_FALSE(MakeMechanism<double>(space, RandomizedResponseSpec{1.5}).ok());
  EXPECT_FALSE(
      MakeMechanism<double>(space, CountSpec{std::string("Maybe")}).ok());
}

TEST(MakeMechanismTest, ThresholdExtremes) {
  for (size_t n = 1; n <= 6; ++n) {
    const DatabaseSpace space(kBinary, n);
    const auto count = MakeMechanism<double>(space, CountSpec{}).value();
    const auto open =
        MakeMechanism<double>(space, ThresholdedCountSpec{0, false, {}}).value();
    const auto closed =
        MakeMechanism<double>(space,
                              ThresholdedCountSpec{static_cast<int64_t>(n), true, {}})
            .value();
    EXPECT_EQ(open.outputs(), count.outputs());
    EXPECT_EQ(closed.outputs(), (std::vector<std::string>{"0"}));
    ForEachDatabase(space, [&](uint64_t, const Database& db) {
      EXPECT_EQ(Dense(open, db), Dense(count, db));
      EXPECT_EQ(Dense(closed, db), (std::vector<double>{1.0}));
    });
  }
}

TEST(MakeMechanismTest, KernelsAreRowStochastic) {
  const RecordAlphabet three = RecordAlphabet::Create({"a", "b", "c"}).value();
  const DatabaseSpace binary(kBinary, 5);
  const DatabaseSpace ternary(three, 3);
  const std::vector<std::pair<DatabaseSpace, MechanismSpec>> cases = {
      {binary, ThresholdedCountSpec{2, true, {}}},
      {binary, ThresholdedCountSpec{2, false, {}}},
      {binary, CountSpec{}},
      {binary, ConstantSpec{}},
      {binary, RandomizedResponseSpec{0.3}},
      {ternary, RandomizedResponseSpec{0.4}},
      {ternary, CountSpec{std::string("b")}},
  };
  for (const auto& [space, spec] : cases) {
    const auto mech = MakeMechanism<double>(space, spec).value();
    ForEachDatabase(space, [&](uint64_t, const Database& db) {
      double total = 0.0;
      for (const auto& [o, p] : mech.Evaluate(db)) {
        EXPECT_GE(p, 0.0);
        total += p;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    });
  }
}

TEST(MakeScenarioTest, ThresholdingScenarioShape) {
  const ScenarioSpec spec = ThresholdingScenario(1000, 1e-6, 100, 100);
  const auto sc = MakeScenario<double>(spec).value();
  EXPECT_EQ(sc.targets.size(), 900u);
  EXPECT_EQ(sc.targets.front(), 100u);
  EXPECT_EQ(sc.knowledge[0].PrefixLength(), 100u);
  EXPECT_EQ(sc.mechanism.num_outputs(), 901u);
}

TEST(MakeScenarioTest, RejectsInconsistentTargets) {
  ScenarioSpec spec = ThresholdingScenario(6, 0.1, 3, 3);
  spec.targets = std::make_pair(size_t{4}, size_t{9});
  EXPECT_FALSE(MakeScenario<double>(spec).ok());
  spec.targets = std::make_pair(size_t{4}, size_t{2});
  EXPECT_FALSE(MakeScenario<double>(spec).ok());
}

TEST(MakeScenarioTest, EmptyKnowledgeMeansNone) {
  ScenarioSpec spec = ThresholdingScenario(4, 0.5, 1, 0);
  spec.knowledge.clear();
  const auto sc = MakeScenario<double>(spec).value();
  ASSERT_EQ(sc.knowledge.size(), 1u);
  EXPECT_EQ(sc.knowledge[0].PrefixLength(), 0u);
}

}  // namespace
}  // namespace pkdp
