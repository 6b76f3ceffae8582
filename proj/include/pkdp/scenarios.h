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

// Declarative scenario descriptions and the constructors that turn them into
// model objects.

#ifndef PKDP_SCENARIOS_H_
#define PKDP_SCENARIOS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "pkdp/model.h"
#include "pkdp/verifier.h"

namespace pkdp {

struct IidBernoulliSpec {
  double p = 0.0;
};
struct ProductCategoricalSpec {
  // probabilities[i][r] = Pr[D(i) = alphabet[r]].
  std::vector<std::vector<double>> probabilities;
};
struct TabulatedDistributionSpec {
  // (records as labels, probability); unlisted databases get probability 0.
  std::vector<std::pair<std::vector<std::string>, double>> entries;
};
using DistributionSpec = std::variant<IidBernoulliSpec, ProductCategoricalSpec,
                                      TabulatedDistributionSpec>;

struct NoKnowledgeSpec {};
struct PrefixKnowledgeSpec {
  size_t k = 0;
};
struct SubsetKnowledgeSpec {
  std::vector<size_t> indices;  // 0-based
};
struct AllButKnowledgeSpec {
  size_t index = 0;  // 0-based
};
struct IdentityKnowledgeSpec {};
struct IndependentRevealSpec {
  double q = 0.0;
};
using KnowledgeSpec =
    std::variant<NoKnowledgeSpec, PrefixKnowledgeSpec, SubsetKnowledgeSpec,
                 AllButKnowledgeSpec, IdentityKnowledgeSpec,
                 IndependentRevealSpec>;

// Releases the count of `positive` records when it exceeds `threshold`
// (strict) or reaches it (non-strict); releases 0 otherwise.
struct ThresholdedCountSpec {
  int64_t threshold = 0;
  bool strict = true;
  std::optional<std::string> positive;  // defaults to the last label
};
struct CountSpec {
  std::optional<std::string> positive;
};
struct ConstantSpec {
  std::string output = "0";
};
struct RandomizedResponseSpec {
  double q = 0.0;
};
struct TabulatedMechanismSpec {
  std::vector<std::string> outputs;
  // (records as labels, dense output distribution); every database needed.
  std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;
};
using MechanismSpec =
    std::variant<ThresholdedCountSpec, CountSpec, ConstantSpec,
                 RandomizedResponseSpec, TabulatedMechanismSpec>;

enum class ModelSelection { kDp, kApk, kPpk, kCompare };

struct AnalysisSpec {
  ModelSelection model = ModelSelection::kCompare;
  std::vector<double> epsilons = {0.0};
  Engine engine = Engine::kExact;
  std::optional<uint64_t> samples;
  std::optional<uint64_t> seed;
  bool threshold_strict = true;
};

struct ScenarioSpec {
  std::vector<std::string> alphabet;
  size_t n = 0;
  std::vector<DistributionSpec> distributions;
  std::vector<KnowledgeSpec> knowledge;
  MechanismSpec mechanism;
  // Inclusive 0-based index range; all indices when unset.
  std::optional<std::pair<size_t, size_t>> targets;
  AnalysisSpec analysis;
};

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> MakeDistribution(
    const RecordAlphabet& alphabet, size_t n, const DistributionSpec& spec);

template <typename S>
absl::StatusOr<KnowledgeFunction<S>> MakeKnowledge(const DatabaseSpace& space,
                                                   const KnowledgeSpec& spec);

template <typename S>
absl::StatusOr<Mechanism<S>> MakeMechanism(const DatabaseSpace& space,
                                           const MechanismSpec& spec);

// Builds every component and checks they agree with each other.
template <typename S>
absl::StatusOr<Scenario<S>> MakeScenario(const ScenarioSpec& spec);

// The referendum example: n iid Yes/No votes with Pr[Yes] = p, a thresholded
// Yes-count with threshold T, and an attacker who sees the first k votes and
// targets an index after them.
ScenarioSpec ThresholdingScenario(size_t n, double p, int64_t threshold,
                                  size_t k, bool strict = true);

}  // namespace pkdp

#endif  // PKDP_SCENARIOS_H_
