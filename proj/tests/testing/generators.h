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

// Seeded random generators for small scenarios. Probabilities are ratios of
// small integers, so the same draw is exact in rational mode.

#ifndef PKDP_TESTS_TESTING_GENERATORS_H_
#define PKDP_TESTS_TESTING_GENERATORS_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "pkdp/model.h"

namespace pkdp::testing {

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  // Uniform on [lo, hi].
  int64_t Int(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng_);
  }
  bool Coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double Uniform() { return std::uniform_real_distribution<double>()(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct GenOptions {
  size_t max_n = 6;
  size_t max_alphabet = 3;
  size_t max_outputs = 8;
  uint64_t max_databases = 729;
  // Probability that an individual weight is forced to zero.
  double zero_rate = 0.2;
  // Mechanism rows with full support (no infinite privacy loss).
  bool full_support_mechanism = false;
  bool allow_randomized_knowledge = true;
  size_t max_distributions = 2;
  size_t max_knowledge = 2;
};

// Integer weights in 0..6 normalized to a distribution; never all zero.
template <typename S>
std::vector<S> RandomWeights(Gen& gen, size_t count, double zero_rate) {
  std::vector<int64_t> raw(count);
  int64_t total = 0;
  for (int64_t& w : raw) {
    w = gen.Coin(zero_rate) ? 0 : gen.Int(1, 6);
    total += w;
  }
  if (total == 0) {
    raw[gen.Int(0, static_cast<int64_t>(count) - 1)] = 1;
    total = 1;
  }
  std::vector<S> out;
  out.reserve(count);
  for (int64_t w : raw) out.push_back(S(w) / S(total));
  return out;
}

inline RecordAlphabet AlphabetOfSize(size_t size) {
  if (size == 2) return BinaryAlphabet();
  std::vector<std::string> labels;
  for (size_t r = 0; r < size; ++r) labels.push_back("r" + std::to_string(r));
  return RecordAlphabet::Create(std::move(labels)).value();
}

inline DatabaseSpace RandomSpace(Gen& gen, const GenOptions& opts) {
  while (true) {
    const size_t radix = static_cast<size_t>(
        gen.Int(2, static_cast<int64_t>(opts.max_alphabet)));
    const size_t n =
        static_cast<size_t>(gen.Int(1, static_cast<int64_t>(opts.max_n)));
    DatabaseSpace space(AlphabetOfSize(radix), n);
    if (*space.Size() <= opts.max_databases) return space;
  }
}

template <typename S>
DatabaseDistribution<S> RandomDistribution(Gen& gen, const DatabaseSpace& space,
                                           const GenOptions& opts) {
  const size_t radix = space.alphabet().size();
  switch (gen.Int(0, 2)) {
    case 0: {
      std::vector<std::vector<S>> marginals;
      for (size_t i = 0; i < space.n(); ++i) {
        marginals.push_back(RandomWeights<S>(gen, radix, opts.zero_rate / 2));
      }
      return DatabaseDistribution<S>::ProductCategorical(space.alphabet(),
                                                         std::move(marginals))
          .value();
    }
    case 1:
      if (radix == 2) {
        const S p = S(gen.Int(0, 4)) / S(4);
        return DatabaseDistribution<S>::IidBernoulli(space.alphabet(),
                                                     space.n(), p)
            .value();
      }
      [[fallthrough]];
    default:
      return DatabaseDistribution<S>::Tabulated(
                 space, RandomWeights<S>(gen, *space.Size(), opts.zero_rate))
          .value();
  }
}

template <typename S>
Mechanism<S> RandomMechanism(Gen& gen, const DatabaseSpace& space,
                             const GenOptions& opts) {
  const size_t outputs =
      static_cast<size_t>(gen.Int(1, static_cast<int64_t>(opts.max_outputs)));
  std::vector<std::string> labels;
  for (size_t o = 0; o < outputs; ++o) labels.push_back("o" + std::to_string(o));
  std::vector<std::vector<S>> rows;
  const double zero_rate = opts.full_support_mechanism ? 0.0 : opts.zero_rate;
  for (uint64_t d = 0; d < *space.Size(); ++d) {
    rows.push_back(RandomWeights<S>(gen, outputs, zero_rate));
  }
  return Mechanism<S>::Tabulated(space, std::move(labels), std::move(rows))
      .value();
}

template <typename S>
KnowledgeFunction<S> RandomKnowledge(Gen& gen, const DatabaseSpace& space,
                                     const GenOptions& opts) {
  const int64_t kinds = opts.allow_randomized_knowledge ? 6 : 4;
  const size_t n = space.n();
  switch (gen.Int(0, kinds - 1)) {
    case 0:
      return KnowledgeFunction<S>::Subset(space, {}, "none").value();
    case 1: {
      const size_t k = static_cast<size_t>(gen.Int(0, static_cast<int64_t>(n)));
      std::vector<size_t> indices(k);
      for (size_t j = 0; j < k; ++j) indices[j] = j;
      return KnowledgeFunction<S>::Subset(space, std::move(indices), "prefix")
          .value();
    }
    case 2: {
      std::vector<size_t> indices;
      for (size_t j = 0; j < n; ++j) {
        if (gen.Coin()) indices.push_back(j);
      }
      return KnowledgeFunction<S>::Subset(space, std::move(indices), "subset")
          .value();
    }
    case 3: {
      const size_t skip =
          static_cast<size_t>(gen.Int(0, static_cast<int64_t>(n) - 1));
      std::vector<size_t> indices;
      for (size_t j = 0; j < n; ++j) {
        if (j != skip) indices.push_back(j);
      }
      return KnowledgeFunction<S>::Subset(space, std::move(indices), "all_but")
          .value();
    }
    case 4:
      return KnowledgeFunction<S>::IndependentReveal(
                 space, S(gen.Int(1, 3)) / S(4))
          .value();
    default: {
      const size_t width = static_cast<size_t>(gen.Int(2, 3));
      std::vector<std::string> labels;
      for (size_t l = 0; l < width; ++l) labels.push_back("k" + std::to_string(l));
      std::vector<std::vector<S>> rows;
      for (uint64_t d = 0; d < *space.Size(); ++d) {
        rows.push_back(RandomWeights<S>(gen, width, opts.zero_rate));
      }
      return KnowledgeFunction<S>::Tabulated(space, std::move(labels),
                                             std::move(rows))
          .value();
    }
  }
}

template <typename S>
Scenario<S> RandomScenario(Gen& gen, const GenOptions& opts = {}) {
  const DatabaseSpace space = RandomSpace(gen, opts);
  Scenario<S> scenario{RandomMechanism<S>(gen, space, opts), {}, {}, {}};
  const int64_t thetas = gen.Int(1, static_cast<int64_t>(opts.max_distributions));
  for (int64_t t = 0; t < thetas; ++t) {
    scenario.distributions.push_back(RandomDistribution<S>(gen, space, opts));
  }
  const int64_t zetas = gen.Int(1, static_cast<int64_t>(opts.max_knowledge));
  for (int64_t z = 0; z < zetas; ++z) {
    scenario.knowledge.push_back(RandomKnowledge<S>(gen, space, opts));
  }
  if (gen.Coin(0.3)) {
    for (size_t i = 0; i < space.n(); ++i) {
      if (gen.Coin()) scenario.targets.push_back(i);
    }
  }
  return scenario;
}

}  // namespace pkdp::testing

#endif  // PKDP_TESTS_TESTING_GENERATORS_H_
