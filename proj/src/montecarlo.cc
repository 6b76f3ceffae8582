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

#include "pkdp/montecarlo.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <thread>

#include "absl/strings/str_cat.h"
#include "pkdp/fastpath.h"

namespace pkdp {
namespace {

using Generator = std::mt19937_64;

double Uniform01(Generator& gen) { return (gen() >> 11) * 0x1.0p-53; }

// Index of the entry of `row` hit by one uniform draw.
template <typename Row>
size_t DrawFrom(const Row& row, Generator& gen) {
  if (row.size() == 1) return 0;
  double total = 0.0;
  for (const auto& entry : row) total += entry.second;
  const double u = Uniform01(gen) * total;
  double cumulative = 0.0;
  for (size_t t = 0; t < row.size(); ++t) {
    cumulative += row[t].second;
    if (u < cumulative) return t;
  }
  return row.size() - 1;
}

// Draws D ~ theta | D(i) = a.
class DatabaseSampler {
 public:
  static absl::StatusOr<DatabaseSampler> Create(
      const DatabaseDistribution<double>& theta, size_t i, int a) {
    if (!(theta.RecordMarginal(i, a) > 0.0)) {
      return ZeroMassEventError(absl::StrCat(
          "Pr[D(", i + 1, ") = ", theta.space().alphabet().label(a), "] = 0"));
    }
    DatabaseSampler sampler;
    sampler.space_ = &theta.space();
    sampler.i_ = i;
    sampler.a_ = a;
    if (theta.is_product()) {
      for (const auto& marginal : theta.marginals()) {
        std::vector<double>& cdf = sampler.cdfs_.emplace_back();
        double cumulative = 0.0;
        for (double v : marginal) cdf.push_back(cumulative += v);
      }
      return sampler;
    }
    const DatabaseSpace& space = theta.space();
    double cumulative = 0.0;
    for (uint64_t index = 0; index < *space.Size(); ++index) {
      const double w = theta.ProbabilityAt(index);
      if (w > 0.0 && space.RecordAt(index, i) == a) {
        sampler.indices_.push_back(index);
        sampler.cumulative_.push_back(cumulative += w);
      }
    }
    return sampler;
  }

  Database Draw(Generator& gen) const {
    if (!cdfs_.empty()) {
      Database db{std::vector<int>(cdfs_.size())};
      for (size_t j = 0; j < cdfs_.size(); ++j) {
        if (j == i_) {
          db.records[j] = a_;
          continue;
        }
        const std::vector<double>& cdf = cdfs_[j];
        const double u = Uniform01(gen) * cdf.back();
        const size_t r = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        db.records[j] = static_cast<int>(std::min(r, cdf.size() - 1));
      }
      return db;
    }
    const double u = Uniform01(gen) * cumulative_.back();
    size_t t = std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
               cumulative_.begin();
    t = std::min(t, indices_.size() - 1);
    return space_->At(indices_[t]);
  }

 private:
  DatabaseSampler() = default;

  const DatabaseSpace* space_ = nullptr;
  size_t i_ = 0;
  int a_ = 0;
  std::vector<std::vector<double>> cdfs_;  // product form
  std::vector<uint64_t> indices_;          // tabulated form
  std::vector<double> cumulative_;
};

// Exact access to m(O, B) for one (mechanism, theta, zeta, i).
class TermContext {
 public:
  static absl::StatusOr<TermContext> Create(
      const Mechanism<double>& mech, const DatabaseDistribution<double>& theta,
      const KnowledgeFunction<double>& zeta, size_t i, double budget) {
    TermContext ctx;
    absl::StatusOr<ExchangeableScenario> exchangeable =
        ExchangeableScenario::FromParts(mech, theta, zeta);
    if (exchangeable.ok() && i >= exchangeable->k()) {
      ctx.exchangeable_ = *std::move(exchangeable);
      return ctx;
    }
    absl::StatusOr<ExactTermEngine<double>> engine =
        ExactTermEngine<double>::Create(mech, theta, zeta, budget);
    if (!engine.ok()) {
      return InfeasibleError(absl::StrCat(
          "montecarlo needs the integrand in closed form (iid records, a "
          "count-based mechanism, prefix knowledge, a target after the "
          "prefix) or an enumerable joint law: ",
          engine.status().message()));
    }
    ctx.stats_ = engine->ForIndex(i);
    ctx.engine_ = *std::move(engine);
    return ctx;
  }

  bool exchangeable() const { return exchangeable_.has_value(); }
  const ExchangeableScenario& scenario() const { return *exchangeable_; }
  const JointState<double>& joint() const { return engine_->joint(); }

  // Row of the integrand table for a knowledge value; nullopt when the value
  // has mass zero.
  std::optional<size_t> Row(const KnowledgeValue& value) const {
    if (exchangeable_) {
      const int positive = exchangeable_->positive();
      return static_cast<size_t>(
          std::count(value.symbols.begin(), value.symbols.end(), positive));
    }
    std::optional<uint32_t> position = engine_->joint().FindKnowledge(value);
    if (!position) return std::nullopt;
    return *position;
  }

  bool Possible(int a, const KnowledgeValue& value) const {
    const std::optional<size_t> row = Row(value);
    if (!row) return false;
    if (exchangeable_) {
      return exchangeable_->Possible(a == exchangeable_->positive() ? 1 : 0,
                                     *row);
    }
    return stats_->mass(a, static_cast<uint32_t>(*row)) > 0.0;
  }

  // Row-major (row, output) table of m for hypotheses (a, b).
  std::vector<double> Table(int a, int b, double epsilon) const {
    if (exchangeable_) {
      const int positive = exchangeable_->positive();
      std::vector<std::vector<double>> rows = IntegrandTableFast<double>(
          *exchangeable_, a == positive ? 1 : 0, b == positive ? 1 : 0,
          epsilon);
      std::vector<double> flat;
      for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
      return flat;
    }
    return stats_->IntegrandTable(a, b, Epsilon<double>::FromValue(epsilon));
  }

 private:
  TermContext() = default;

  std::optional<ExchangeableScenario> exchangeable_;
  std::optional<ExactTermEngine<double>> engine_;
  std::optional<ConditionedOutputs<double>> stats_;
};

// One draw: the integrand value, or nullopt when rejected.
using SampleFn = std::function<std::optional<double>(Generator&)>;

absl::StatusOr<Estimate> RunBatches(const SampleFn& sample,
                                    const MonteCarloOptions& options) {
  if (options.samples == 0) {
    return absl::InvalidArgumentError("samples must be positive");
  }
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  const uint64_t batches =
      (options.samples + kMonteCarloBatchSize - 1) / kMonteCarloBatchSize;
  std::vector<double> sums(batches, 0.0);
  std::vector<char> exhausted(batches, 0);
  std::atomic<uint64_t> next{0};

  auto worker = [&] {
    for (uint64_t batch = next++; batch < batches; batch = next++) {
      const uint64_t first = batch * kMonteCarloBatchSize;
      const uint64_t needed =
          std::min<uint64_t>(kMonteCarloBatchSize, options.samples - first);
      const uint64_t attempt_cap = static_cast<uint64_t>(std::ceil(
          static_cast<double>(options.rejection_budget) * needed /
          static_cast<double>(options.samples)));
      std::seed_seq seq{static_cast<uint32_t>(options.seed),
                        static_cast<uint32_t>(options.seed >> 32),
                        static_cast<uint32_t>(batch),
                        static_cast<uint32_t>(batch >> 32)};
      Generator gen(seq);
      double sum = 0.0;
      uint64_t accepted = 0;
      for (uint64_t attempts = 0; accepted < needed; ++attempts) {
        if (attempts >= std::max<uint64_t>(attempt_cap, needed)) {
          exhausted[batch] = 1;
          break;
        }
        if (std::optional<double> value = sample(gen)) {
          sum += *value;
          ++accepted;
        }
      }
      sums[batch] = sum;
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, batches));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }
  if (std::find(exhausted.begin(), exhausted.end(), 1) != exhausted.end()) {
    return InfeasibleError(absl::StrCat(
        "rejection sampling ran out of its budget of ",
        options.rejection_budget, " draws; the knowledge event is too rare"));
  }
  double total = 0.0;
  for (double s : sums) total += s;

  Estimate estimate;
  estimate.mean = total / static_cast<double>(options.samples);
  estimate.half_width = HoeffdingHalfWidth(options.samples, options.confidence);
  estimate.confidence = options.confidence;
  estimate.samples = options.samples;
  estimate.seed = options.seed;
  return estimate;
}

absl::Status CheckHypotheses(const DatabaseSpace& space, size_t i, int a,
                             int b) {
  const int size = static_cast<int>(space.alphabet().size());
  if (i >= space.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("index ", i + 1, " outside 1..", space.n()));
  }
  if (a < 0 || a >= size || b < 0 || b >= size || a == b) {
    return absl::InvalidArgumentError(
        absl::StrCat("hypotheses (", a, ", ", b, ") must be distinct records"));
  }
  return absl::OkStatus();
}

// Draws (D, O, B) in that order for both models so that, with nothing
// revealed, APK and PPK consume the generator identically.
struct Draw {
  int output;
  KnowledgeValue knowledge;
};

Draw DrawJoint(const DatabaseSampler& sampler, const Mechanism<double>& mech,
               const KnowledgeFunction<double>& zeta, Generator& gen) {
  const Database db = sampler.Draw(gen);
  const SparseRow<double> outputs = mech.Evaluate(db);
  const int output = outputs[DrawFrom(outputs, gen)].first;
  auto values = zeta.Evaluate(db);
  const size_t pick = zeta.deterministic() ? 0 : DrawFrom(values, gen);
  return Draw{output, std::move(values[pick].first)};
}

absl::StatusOr<Estimate> EstimatePpk(const TermContext& ctx,
                                     const Mechanism<double>& mech,
                                     const DatabaseDistribution<double>& theta,
                                     const KnowledgeFunction<double>& zeta,
                                     size_t i, int a, int b, double epsilon,
                                     const MonteCarloOptions& options) {
  PKDP_ASSIGN_OR_RETURN(DatabaseSampler sampler,
                        DatabaseSampler::Create(theta, i, a));
  const std::vector<double> table = ctx.Table(a, b, epsilon);
  const size_t outputs = mech.num_outputs();
  SampleFn sample = [&](Generator& gen) -> std::optional<double> {
    const Draw draw = DrawJoint(sampler, mech, zeta, gen);
    const std::optional<size_t> row = ctx.Row(draw.knowledge);
    return row ? table[*row * outputs + draw.output] : 0.0;
  };
  return RunBatches(sample, options);
}

absl::StatusOr<Estimate> EstimateApk(const TermContext& ctx,
                                     const Mechanism<double>& mech,
                                     const DatabaseDistribution<double>& theta,
                                     const KnowledgeFunction<double>& zeta,
                                     size_t i, int a, int b,
                                     const KnowledgeValue& bhat, double epsilon,
                                     const MonteCarloOptions& options) {
  if (!ctx.Possible(a, bhat)) {
    if (options.samples == 0) {
      return absl::InvalidArgumentError("samples must be positive");
    }
    Estimate zero;
    zero.confidence = options.confidence;
    zero.samples = options.samples;
    zero.seed = options.seed;
    return zero;
  }
  PKDP_ASSIGN_OR_RETURN(DatabaseSampler sampler,
                        DatabaseSampler::Create(theta, i, a));
  const std::vector<double> table = ctx.Table(a, b, epsilon);
  const size_t outputs = mech.num_outputs();
  const size_t row = *ctx.Row(bhat);
  SampleFn sample = [&](Generator& gen) -> std::optional<double> {
    const Draw draw = DrawJoint(sampler, mech, zeta, gen);
    if (draw.knowledge != bhat) return std::nullopt;
    return table[row * outputs + draw.output];
  };
  return RunBatches(sample, options);
}

// Canonical prefix value with j positives.
KnowledgeValue PrefixWithCount(size_t k, size_t j, int positive) {
  KnowledgeValue value{std::vector<int>(k, 1 - positive)};
  for (size_t t = k - j; t < k; ++t) value.symbols[t] = positive;
  return value;
}

}  // namespace

double HoeffdingHalfWidth(uint64_t samples, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                   (2.0 * static_cast<double>(samples)));
}

absl::StatusOr<Estimate> EstimatePpkTerm(
    const Mechanism<double>& mech, const DatabaseDistribution<double>& theta,
    const KnowledgeFunction<double>& zeta, size_t i, int a, int b,
    double epsilon, const MonteCarloOptions& options) {
  PKDP_RETURN_IF_ERROR(CheckHypotheses(theta.space(), i, a, b));
  PKDP_ASSIGN_OR_RETURN(TermContext ctx, TermContext::Create(
                                             mech, theta, zeta, i, options.budget));
  return EstimatePpk(ctx, mech, theta, zeta, i, a, b, epsilon, options);
}

absl::StatusOr<Estimate> EstimateApkTerm(
    const Mechanism<double>& mech, const DatabaseDistribution<double>& theta,
    const KnowledgeFunction<double>& zeta, size_t i, int a, int b,
    const KnowledgeValue& bhat, double epsilon,
    const MonteCarloOptions& options) {
  PKDP_RETURN_IF_ERROR(CheckHypotheses(theta.space(), i, a, b));
  if (!zeta.IsValid(bhat)) {
    return absl::InvalidArgumentError("knowledge value outside the range");
  }
  PKDP_ASSIGN_OR_RETURN(TermContext ctx, TermContext::Create(
                                             mech, theta, zeta, i, options.budget));
  return EstimateApk(ctx, mech, theta, zeta, i, a, b, bhat, epsilon, options);
}

absl::StatusOr<std::vector<TightDelta<double>>> MonteCarloDeltaCurve(
    AttackerModel model, const Scenario<double>& scenario,
    std::span<const double> epsilons, const MonteCarloOptions& options) {
  if (model == AttackerModel::kClassicalDp) {
    return absl::InvalidArgumentError(
        "the montecarlo engine covers the apk and ppk models");
  }
  std::vector<TightDelta<double>> curve(epsilons.size());
  for (size_t e = 0; e < epsilons.size(); ++e) {
    if (!(epsilons[e] >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon ", epsilons[e], " is negative"));
    }
    curve[e].epsilon = epsilons[e];
  }
  const Mechanism<double>& mech = scenario.mechanism;
  const int records = static_cast<int>(mech.space().alphabet().size());
  const std::vector<size_t> all_targets = scenario.TargetIndices();

  for (size_t t = 0; t < scenario.distributions.size(); ++t) {
    const DatabaseDistribution<double>& theta = scenario.distributions[t];
    for (size_t z = 0; z < scenario.knowledge.size(); ++z) {
      const KnowledgeFunction<double>& zeta = scenario.knowledge[z];
      std::vector<size_t> targets = all_targets;
      absl::StatusOr<ExchangeableScenario> exchangeable =
          ExchangeableScenario::FromParts(mech, theta, zeta);
      const bool shared =
          exchangeable.ok() && !targets.empty() &&
          std::all_of(targets.begin(), targets.end(),
                      [&](size_t i) { return i >= exchangeable->k(); });
      if (shared) targets.resize(1);
      for (size_t i : targets) {
        PKDP_ASSIGN_OR_RETURN(
            TermContext ctx,
            TermContext::Create(mech, theta, zeta, i, options.budget));
        std::vector<KnowledgeValue> values;
        if (model == AttackerModel::kApk) {
          if (ctx.exchangeable()) {
            for (size_t j = 0; j <= ctx.scenario().k(); ++j) {
              values.push_back(PrefixWithCount(ctx.scenario().k(), j,
                                               ctx.scenario().positive()));
            }
          } else {
            for (uint32_t pos = 0; pos < ctx.joint().knowledge_ids().size();
                 ++pos) {
              values.push_back(ctx.joint().knowledge_value(pos));
            }
          }
        }
        for (int a = 0; a < records; ++a) {
          if (!(theta.RecordMarginal(i, a) > 0.0)) continue;
          for (int b = 0; b < records; ++b) {
            if (a == b) continue;
            for (size_t e = 0; e < epsilons.size(); ++e) {
              TermReport<double> report;
              report.model = model;
              report.theta = t;
              report.zeta = z;
              report.index = i;
              report.a = a;
              report.b = b;
              report.epsilon = epsilons[e];
              report.engine = Engine::kMonteCarlo;
              report.seed = options.seed;
              auto offer = [&](const Estimate& estimate) {
                report.delta = estimate.mean;
                report.half_width = estimate.half_width;
                if (!curve[e].argmax || report.delta > curve[e].delta) {
                  curve[e].delta = report.delta;
                  curve[e].argmax = report;
                }
              };
              if (model == AttackerModel::kPpk) {
                PKDP_ASSIGN_OR_RETURN(
                    Estimate estimate,
                    EstimatePpk(ctx, mech, theta, zeta, i, a, b, epsilons[e],
                                options));
                offer(estimate);
                continue;
              }
              for (const KnowledgeValue& value : values) {
                if (!ctx.Possible(a, value)) continue;
                PKDP_ASSIGN_OR_RETURN(
                    Estimate estimate,
                    EstimateApk(ctx, mech, theta, zeta, i, a, b, value,
                                epsilons[e], options));
                report.bhat = value;
                report.bhat_label = zeta.Label(value);
                offer(estimate);
              }
            }
          }
        }
      }
    }
  }
  return curve;
}

}  // namespace pkdp
