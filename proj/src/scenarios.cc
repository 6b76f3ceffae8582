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

#include <algorithm>
#include <charconv>
#include <numeric>
#include <string>
#include <type_traits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace pkdp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Probabilities written in decimal become the decimal rational in exact mode
// (0.05 -> 1/20) rather than the nearest binary fraction.
template <typename S>
S Probability(double v) {
  if constexpr (std::is_same_v<S, double>) {
    return v;
  } else {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return FromDouble<S>(v);
    std::string text(buf, end);
    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
      exponent = std::stoi(text.substr(e + 1));
      text.resize(e);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      exponent -= static_cast<int>(text.size() - dot - 1);
      text.erase(dot, 1);
    }
    S value(text);
    S ten(10);
    for (; exponent > 0; --exponent) value *= ten;
    for (; exponent < 0; ++exponent) value /= ten;
    return value;
  }
}

absl::StatusOr<Database> ParseRecords(const DatabaseSpace& space,
                                      const std::vector<std::string>& labels) {
  if (labels.size() != space.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("database (", absl::StrJoin(labels, ","), ") has ",
                     labels.size(), " records, expected ", space.n()));
  }
  Database db{std::vector<int>(labels.size())};
  for (size_t i = 0; i < labels.size(); ++i) {
    std::optional<int> record = space.alphabet().Find(labels[i]);
    if (!record) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown record label '", labels[i], "'"));
    }
    db.records[i] = *record;
  }
  return db;
}

absl::StatusOr<int> PositiveRecord(const DatabaseSpace& space,
                                   const std::optional<std::string>& label) {
  if (!label) return static_cast<int>(space.alphabet().size()) - 1;
  std::optional<int> record = space.alphabet().Find(*label);
  if (!record) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown positive label '", *label, "'"));
  }
  return *record;
}

absl::Status CheckIndex(const DatabaseSpace& space, size_t index) {
  if (index >= space.n()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "index ", index + 1, " outside 1..", space.n()));
  }
  return absl::OkStatus();
}

}  // namespace

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> MakeDistribution(
    const RecordAlphabet& alphabet, size_t n, const DistributionSpec& spec) {
  using Dist = DatabaseDistribution<S>;
  return std::visit(
      Overloaded{
          [&](const IidBernoulliSpec& s) -> absl::StatusOr<Dist> {
            return Dist::IidBernoulli(alphabet, n, Probability<S>(s.p));
          },
          [&](const ProductCategoricalSpec& s) -> absl::StatusOr<Dist> {
            if (s.probabilities.size() != n) {
              return absl::InvalidArgumentError(absl::StrCat(
                  "product distribution lists ", s.probabilities.size(),
                  " marginals, expected ", n));
            }
            std::vector<std::vector<S>> marginals;
            for (const auto& row : s.probabilities) {
              std::vector<S>& out = marginals.emplace_back();
              for (double v : row) out.push_back(Probability<S>(v));
            }
            return Dist::ProductCategorical(alphabet, std::move(marginals));
          },
          [&](const TabulatedDistributionSpec& s) -> absl::StatusOr<Dist> {
            DatabaseSpace space(alphabet, n);
            if (!space.Enumerable()) {
              return InfeasibleError(
                  "tabulated distribution over a non-enumerable space");
            }
            std::vector<S> weights(*space.Size(), S(0));
            for (const auto& [labels, p] : s.entries) {
              PKDP_ASSIGN_OR_RETURN(Database db, ParseRecords(space, labels));
              weights[space.Index(db)] += Probability<S>(p);
            }
            return Dist::Tabulated(std::move(space), std::move(weights));
          },
      },
      spec);
}

template <typename S>
absl::StatusOr<KnowledgeFunction<S>> MakeKnowledge(const DatabaseSpace& space,
                                                   const KnowledgeSpec& spec) {
  using Fn = KnowledgeFunction<S>;
  const size_t n = space.n();
  return std::visit(
      Overloaded{
          [&](const NoKnowledgeSpec&) -> absl::StatusOr<Fn> {
            return Fn::Subset(space, {}, "none");
          },
          [&](const PrefixKnowledgeSpec& s) -> absl::StatusOr<Fn> {
            if (s.k > n) {
              return absl::InvalidArgumentError(
                  absl::StrCat("prefix length ", s.k, " exceeds n = ", n));
            }
            std::vector<size_t> indices(s.k);
            std::iota(indices.begin(), indices.end(), size_t{0});
            return Fn::Subset(space, std::move(indices),
                              absl::StrCat("prefix(", s.k, ")"));
          },
          [&](const SubsetKnowledgeSpec& s) -> absl::StatusOr<Fn> {
            std::vector<size_t> indices = s.indices;
            std::sort(indices.begin(), indices.end());
            std::vector<std::string> names;
            for (size_t index : indices) {
              PKDP_RETURN_IF_ERROR(CheckIndex(space, index));
              names.push_back(absl::StrCat(index + 1));
            }
            if (std::adjacent_find(indices.begin(), indices.end()) !=
                indices.end()) {
              return absl::InvalidArgumentError("subset repeats an index");
            }
            return Fn::Subset(space, std::move(indices),
                              absl::StrCat("subset(", absl::StrJoin(names, ","),
                                           ")"));
          },
          [&](const AllButKnowledgeSpec& s) -> absl::StatusOr<Fn> {
            PKDP_RETURN_IF_ERROR(CheckIndex(space, s.index));
            std::vector<size_t> indices;
            for (size_t j = 0; j < n; ++j) {
              if (j != s.index) indices.push_back(j);
            }
            return Fn::Subset(space, std::move(indices),
                              absl::StrCat("all_but(", s.index + 1, ")"));
          },
          [&](const IdentityKnowledgeSpec&) -> absl::StatusOr<Fn> {
            std::vector<size_t> indices(n);
            std::iota(indices.begin(), indices.end(), size_t{0});
            return Fn::Subset(space, std::move(indices), "identity");
          },
          [&](const IndependentRevealSpec& s) -> absl::StatusOr<Fn> {
            return Fn::IndependentReveal(space, Probability<S>(s.q));
          },
      },
      spec);
}

template <typename S>
absl::StatusOr<Mechanism<S>> MakeMechanism(const DatabaseSpace& space,
                                           const MechanismSpec& spec) {
  using Mech = Mechanism<S>;
  const size_t n = space.n();
  return std::visit(
      Overloaded{
          [&](const ThresholdedCountSpec& s) -> absl::StatusOr<Mech> {
            if (s.threshold < 0 || static_cast<size_t>(s.threshold) > n) {
              return absl::InvalidArgumentError(absl::StrCat(
                  "threshold ", s.threshold, " outside 0..", n));
            }
            PKDP_ASSIGN_OR_RETURN(int positive,
                                  PositiveRecord(space, s.positive));
            const size_t first = static_cast<size_t>(s.threshold) +
                                 (s.strict ? 1 : 0);
            // Outputs: 0, then every count that can be released.
            std::vector<std::string> outputs = {"0"};
            std::vector<size_t> position(n + 1, 0);
            for (size_t c = std::max<size_t>(first, 1); c <= n; ++c) {
              position[c] = outputs.size();
              outputs.push_back(absl::StrCat(c));
            }
            std::vector<std::vector<S>> rows(
                n + 1, std::vector<S>(outputs.size(), S(0)));
            for (size_t c = 0; c <= n; ++c) {
              rows[c][c >= first ? position[c] : 0] = S(1);
            }
            return Mech::CountBased(space, positive, std::move(outputs),
                                    std::move(rows));
          },
          [&](const CountSpec& s) -> absl::StatusOr<Mech> {
            PKDP_ASSIGN_OR_RETURN(int positive,
                                  PositiveRecord(space, s.positive));
            std::vector<std::string> outputs;
            std::vector<std::vector<S>> rows(n + 1,
                                             std::vector<S>(n + 1, S(0)));
            for (size_t c = 0; c <= n; ++c) {
              outputs.push_back(absl::StrCat(c));
              rows[c][c] = S(1);
            }
            return Mech::CountBased(space, positive, std::move(outputs),
                                    std::move(rows));
          },
          [&](const ConstantSpec& s) -> absl::StatusOr<Mech> {
            std::vector<std::vector<S>> rows(n + 1, std::vector<S>{S(1)});
            return Mech::CountBased(
                space, static_cast<int>(space.alphabet().size()) - 1,
                {s.output}, std::move(rows));
          },
          [&](const RandomizedResponseSpec& s) -> absl::StatusOr<Mech> {
            return Mech::RandomizedResponse(space, Probability<S>(s.q));
          },
          [&](const TabulatedMechanismSpec& s) -> absl::StatusOr<Mech> {
            if (!space.Enumerable()) {
              return InfeasibleError(
                  "tabulated mechanism over a non-enumerable space");
            }
            const uint64_t size = *space.Size();
            std::vector<std::vector<S>> rows(size);
            for (const auto& [labels, dist] : s.rows) {
              PKDP_ASSIGN_OR_RETURN(Database db, ParseRecords(space, labels));
              std::vector<S>& row = rows[space.Index(db)];
              if (!row.empty()) {
                return absl::InvalidArgumentError(absl::StrCat(
                    "mechanism row for ", space.Label(db), " given twice"));
              }
              for (double v : dist) row.push_back(Probability<S>(v));
            }
            for (uint64_t index = 0; index < size; ++index) {
              if (rows[index].empty()) {
                return absl::InvalidArgumentError(
                    absl::StrCat("no mechanism row for ",
                                 space.Label(space.At(index))));
              }
            }
            return Mech::Tabulated(space, s.outputs, std::move(rows));
          },
      },
      spec);
}

template <typename S>
absl::StatusOr<Scenario<S>> MakeScenario(const ScenarioSpec& spec) {
  PKDP_ASSIGN_OR_RETURN(RecordAlphabet alphabet,
                        RecordAlphabet::Create(spec.alphabet));
  if (spec.n == 0) return absl::InvalidArgumentError("n must be positive");
  if (spec.distributions.empty()) {
    return absl::InvalidArgumentError("at least one distribution is required");
  }
  DatabaseSpace space(alphabet, spec.n);
  PKDP_ASSIGN_OR_RETURN(Mechanism<S> mechanism,
                        MakeMechanism<S>(space, spec.mechanism));
  Scenario<S> scenario{std::move(mechanism), {}, {}, {}};
  for (const DistributionSpec& d : spec.distributions) {
    PKDP_ASSIGN_OR_RETURN(DatabaseDistribution<S> theta,
                          MakeDistribution<S>(alphabet, spec.n, d));
    scenario.distributions.push_back(std::move(theta));
  }
  if (spec.knowledge.empty()) {
    PKDP_ASSIGN_OR_RETURN(KnowledgeFunction<S> none,
                          MakeKnowledge<S>(space, NoKnowledgeSpec{}));
    scenario.knowledge.push_back(std::move(none));
  }
  for (const KnowledgeSpec& k : spec.knowledge) {
    PKDP_ASSIGN_OR_RETURN(KnowledgeFunction<S> zeta,
                          MakeKnowledge<S>(space, k));
    scenario.knowledge.push_back(std::move(zeta));
  }
  if (spec.targets) {
    const auto [from, to] = *spec.targets;
    if (from > to || to >= spec.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "target range ", from + 1, "..", to + 1, " outside 1..", spec.n));
    }
    for (size_t i = from; i <= to; ++i) scenario.targets.push_back(i);
  }
  return scenario;
}

ScenarioSpec ThresholdingScenario(size_t n, double p, int64_t threshold,
                                  size_t k, bool strict) {
  ScenarioSpec spec;
  spec.alphabet = BinaryAlphabet().labels();
  spec.n = n;
  spec.distributions = {IidBernoulliSpec{p}};
  spec.knowledge = {PrefixKnowledgeSpec{k}};
  spec.mechanism = ThresholdedCountSpec{threshold, strict, std::nullopt};
  if (k < n) spec.targets = std::make_pair(k, n - 1);
  spec.analysis.threshold_strict = strict;
  return spec;
}

#define PKDP_INSTANTIATE_SCENARIOS(S)                                         \
  template absl::StatusOr<DatabaseDistribution<S>> MakeDistribution<S>(       \
      const RecordAlphabet&, size_t, const DistributionSpec&);                \
  template absl::StatusOr<KnowledgeFunction<S>> MakeKnowledge<S>(             \
      const DatabaseSpace&, const KnowledgeSpec&);                            \
  template absl::StatusOr<Mechanism<S>> MakeMechanism<S>(                     \
      const DatabaseSpace&, const MechanismSpec&);                            \
  template absl::StatusOr<Scenario<S>> MakeScenario<S>(const ScenarioSpec&);

PKDP_INSTANTIATE_SCENARIOS(double)
PKDP_INSTANTIATE_SCENARIOS(Rational)

#undef PKDP_INSTANTIATE_SCENARIOS

}  // namespace pkdp
