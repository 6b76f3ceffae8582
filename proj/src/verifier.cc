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

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace pkdp {

std::string_view ModelName(AttackerModel model) {
  switch (model) {
    case AttackerModel::kClassicalDp:
      return "dp";
    case AttackerModel::kApk:
      return "apk";
    case AttackerModel::kPpk:
      return "ppk";
  }
  return "?";
}

std::string_view EngineName(Engine engine) {
  switch (engine) {
    case Engine::kExact:
      return "exact";
    case Engine::kFastPath:
      return "fastpath";
    case Engine::kMonteCarlo:
      return "montecarlo";
  }
  return "?";
}

template <typename S>
S TightDeltaIndist(std::span<const S> p, std::span<const S> q,
                   const Epsilon<S>& epsilon) {
  assert(p.size() == q.size());
  S forward(0);
  S backward(0);
  for (size_t o = 0; o < p.size(); ++o) {
    const S f = p[o] - epsilon.factor * q[o];
    const S g = q[o] - epsilon.factor * p[o];
    if (S(0) < f) forward += f;
    if (S(0) < g) backward += g;
  }
  return forward < backward ? backward : forward;
}

// ConditionedOutputs

template <typename S>
S ConditionedOutputs<S>::RecordMass(int x) const {
  S total(0);
  for (size_t k = 0; k < num_knowledge_; ++k) total += mass(x, k);
  return total;
}

template <typename S>
S ConditionedOutputs<S>::Probability(int x, uint32_t k, int o) const {
  const S& m = mass(x, k);
  if (!(S(0) < m)) return S(0);
  return out_[(x * num_knowledge_ + k) * num_outputs_ + o] / m;
}

template <typename S>
std::vector<S> ConditionedOutputs<S>::OutputDistribution(int x,
                                                         uint32_t k) const {
  std::vector<S> dist(num_outputs_);
  for (size_t o = 0; o < num_outputs_; ++o) {
    dist[o] = Probability(x, k, static_cast<int>(o));
  }
  return dist;
}

template <typename S>
PlrvValue<S> ConditionedOutputs<S>::Plrv(int a, int b, uint32_t k,
                                         int o) const {
  const bool possible = S(0) < mass(a, k) && S(0) < mass(b, k);
  return PartialPlrvOf(Probability(a, k, o), Probability(b, k, o), possible);
}

template <typename S>
S ConditionedOutputs<S>::ApkTerm(int a, int b, uint32_t k,
                                 const Epsilon<S>& epsilon) const {
  if (!(S(0) < mass(a, k))) return S(0);
  S total(0);
  for (size_t o = 0; o < num_outputs_; ++o) {
    const S pa = Probability(a, k, static_cast<int>(o));
    if (!(S(0) < pa)) continue;
    total += pa * Integrand(Plrv(a, b, k, static_cast<int>(o)), epsilon.factor);
  }
  return total;
}

template <typename S>
std::vector<S> ConditionedOutputs<S>::IntegrandTable(
    int a, int b, const Epsilon<S>& epsilon) const {
  std::vector<S> table(num_knowledge_ * num_outputs_, S(0));
  for (size_t k = 0; k < num_knowledge_; ++k) {
    for (size_t o = 0; o < num_outputs_; ++o) {
      table[k * num_outputs_ + o] = Integrand(
          Plrv(a, b, static_cast<uint32_t>(k), static_cast<int>(o)),
          epsilon.factor);
    }
  }
  return table;
}

template <typename S>
std::vector<S> ConditionedOutputs<S>::KnowledgePosterior(int a) const {
  const S total = RecordMass(a);
  std::vector<S> posterior(num_knowledge_, S(0));
  if (!(S(0) < total)) return posterior;
  for (size_t k = 0; k < num_knowledge_; ++k) {
    posterior[k] = mass(a, static_cast<uint32_t>(k)) / total;
  }
  return posterior;
}

// ExactTermEngine

template <typename S>
absl::Status CheckExactBudget(const Mechanism<S>& mech,
                              const KnowledgeFunction<S>* zeta,
                              double budget) {
  const double knowledge = zeta == nullptr ? 1.0 : zeta->ApproxSpaceSize();
  const double terms = mech.space().ApproxSize() *
                       static_cast<double>(mech.num_outputs()) * knowledge;
  if (!(terms <= budget) || !mech.space().Size().has_value()) {
    return InfeasibleError(absl::StrFormat(
        "exact engine would enumerate %.3g elementary terms "
        "(|T|^n * |O| * |knowledge|), above the budget of %.3g; use "
        "engine=fastpath for exchangeable scenarios (iid records, "
        "count-based mechanism, prefix knowledge) or engine=montecarlo",
        terms, budget));
  }
  return absl::OkStatus();
}

template <typename S>
absl::StatusOr<ExactTermEngine<S>> ExactTermEngine<S>::Create(
    const Mechanism<S>& mech, const DatabaseDistribution<S>& theta,
    const KnowledgeFunction<S>& zeta, double budget) {
  if (!(mech.space() == theta.space())) {
    return absl::InvalidArgumentError(
        "mechanism and distribution disagree on alphabet or n");
  }
  PKDP_RETURN_IF_ERROR(CheckExactBudget(mech, &zeta, budget));
  PKDP_ASSIGN_OR_RETURN(JointState<S> joint, Joint(theta, zeta, budget));
  ExactTermEngine engine(std::move(joint), mech.num_outputs());
  engine.rows_.resize(mech.space().Size().value());
  uint64_t last = std::numeric_limits<uint64_t>::max();
  for (const auto& e : engine.joint_.entries()) {
    if (e.database == last) continue;
    last = e.database;
    engine.rows_[e.database] = mech.EvaluateAt(e.database);
  }
  return engine;
}

template <typename S>
ConditionedOutputs<S> ExactTermEngine<S>::ForIndex(size_t i) const {
  const DatabaseSpace& space = joint_.space();
  ConditionedOutputs<S> stats;
  stats.index_ = i;
  stats.num_records_ = space.alphabet().size();
  stats.num_knowledge_ = joint_.knowledge_ids().size();
  stats.num_outputs_ = num_outputs_;
  const size_t k_count = stats.num_knowledge_;
  stats.mass_.assign(stats.num_records_ * k_count, S(0));
  stats.out_.assign(stats.num_records_ * k_count * num_outputs_, S(0));
  for (const auto& e : joint_.entries()) {
    const size_t cell =
        static_cast<size_t>(space.RecordAt(e.database, i)) * k_count +
        e.knowledge;
    stats.mass_[cell] += e.weight;
    for (const auto& [o, p] : rows_[e.database]) {
      stats.out_[cell * num_outputs_ + o] += e.weight * p;
    }
  }
  return stats;
}

template <typename S>
absl::StatusOr<S> ExactTermEngine<S>::PpkTerm(const ConditionedOutputs<S>& stats,
                                              int a, int b,
                                              const Epsilon<S>& epsilon) const {
  const S record_mass = stats.RecordMass(a);
  if (!(S(0) < record_mass)) {
    return ZeroMassEventError(absl::StrCat("Pr[D(", stats.index() + 1, ")=",
                                           joint_.space().alphabet().label(a),
                                           "] is 0"));
  }
  const std::vector<S> table = stats.IntegrandTable(a, b, epsilon);
  const DatabaseSpace& space = joint_.space();
  S total(0);
  for (const auto& e : joint_.entries()) {
    if (space.RecordAt(e.database, stats.index()) != a) continue;
    S inner(0);
    for (const auto& [o, p] : rows_[e.database]) {
      inner += p * table[e.knowledge * num_outputs_ + o];
    }
    total += e.weight * inner;
  }
  return total / record_mass;
}

namespace {

template <typename S>
absl::Status ValidateScenario(const Scenario<S>& scenario) {
  const DatabaseSpace& space = scenario.mechanism.space();
  for (const auto& theta : scenario.distributions) {
    if (!(theta.space() == space)) {
      return absl::InvalidArgumentError(
          "a distribution disagrees with the mechanism on alphabet or n");
    }
  }
  for (const auto& zeta : scenario.knowledge) {
    if (!(zeta.space() == space)) {
      return absl::InvalidArgumentError(
          "a knowledge function disagrees with the mechanism on alphabet or n");
    }
  }
  for (size_t i : scenario.targets) {
    if (i >= space.n()) {
      return absl::InvalidArgumentError(
          absl::StrCat("target index ", i + 1, " outside 1..", space.n()));
    }
  }
  if (scenario.distributions.empty() || scenario.knowledge.empty()) {
    return absl::InvalidArgumentError(
        "scenario needs at least one distribution and one knowledge function");
  }
  return absl::OkStatus();
}

// In floating point, terms within this of the running maximum are ties: the
// delta is raised but the earlier argmax is kept, so rounding noise does not
// reorder equal terms.
constexpr double kArgmaxTieTolerance = 1e-12;

template <typename S>
void Offer(TightDelta<S>& best, const S& delta,
           const std::function<TermReport<S>()>& report) {
  if (best.argmax.has_value() && !(best.delta < delta)) return;
  if constexpr (!ScalarTraits<S>::kExact) {
    if (best.argmax.has_value() && delta <= best.delta + kArgmaxTieTolerance) {
      best.delta = delta;
      return;
    }
  }
  best.delta = delta;
  best.argmax = report();
  best.argmax->delta = delta;
}

// APK and PPK tight deltas at every epsilon in one sweep of the quantifiers.
template <typename S>
absl::StatusOr<std::vector<TightDelta<S>>> PartialKnowledgeCurve(
    AttackerModel model, const Scenario<S>& scenario,
    std::span<const Epsilon<S>> epsilons, double budget) {
  PKDP_RETURN_IF_ERROR(ValidateScenario(scenario));
  std::vector<TightDelta<S>> best(epsilons.size());
  for (size_t e = 0; e < epsilons.size(); ++e) {
    best[e].epsilon = epsilons[e].value;
  }
  const int records =
      static_cast<int>(scenario.mechanism.space().alphabet().size());
  const std::vector<size_t> targets = scenario.TargetIndices();
  for (size_t t = 0; t < scenario.distributions.size(); ++t) {
    for (size_t z = 0; z < scenario.knowledge.size(); ++z) {
      const KnowledgeFunction<S>& zeta = scenario.knowledge[z];
      PKDP_ASSIGN_OR_RETURN(
          ExactTermEngine<S> engine,
          ExactTermEngine<S>::Create(scenario.mechanism,
                                     scenario.distributions[t], zeta, budget));
      for (size_t i : targets) {
        const ConditionedOutputs<S> stats = engine.ForIndex(i);
        for (int a = 0; a < records; ++a) {
          for (int b = 0; b < records; ++b) {
            if (a == b) continue;
            auto base = [&](size_t e) {
              TermReport<S> r;
              r.model = model;
              r.theta = t;
              r.zeta = z;
              r.index = i;
              r.a = a;
              r.b = b;
              r.epsilon = epsilons[e].value;
              r.engine = Engine::kExact;
              return r;
            };
            if (model == AttackerModel::kApk) {
              for (uint32_t k = 0; k < stats.num_knowledge(); ++k) {
                for (size_t e = 0; e < epsilons.size(); ++e) {
                  const S delta = stats.ApkTerm(a, b, k, epsilons[e]);
                  Offer<S>(best[e], delta, [&] {
                    TermReport<S> r = base(e);
                    r.bhat = engine.joint().knowledge_value(k);
                    r.bhat_label = zeta.Label(*r.bhat);
                    return r;
                  });
                }
              }
            } else {
              const bool possible = S(0) < stats.RecordMass(a);
              for (size_t e = 0; e < epsilons.size(); ++e) {
                S delta(0);
                if (possible) {
                  PKDP_ASSIGN_OR_RETURN(
                      delta, engine.PpkTerm(stats, a, b, epsilons[e]));
                }
                Offer<S>(best[e], delta, [&] { return base(e); });
              }
            }
          }
        }
      }
    }
  }
  return best;
}

template <typename S>
std::vector<Epsilon<S>> ToEpsilons(std::span<const double> values) {
  std::vector<Epsilon<S>> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(Epsilon<S>::FromValue(v));
  return out;
}

}  // namespace

template <typename S>
absl::StatusOr<S> ApkTerm(const Mechanism<S>& mech,
                          const DatabaseDistribution<S>& theta,
                          const KnowledgeFunction<S>& zeta, size_t i, int a,
                          int b, const KnowledgeValue& bhat,
                          const Epsilon<S>& epsilon, double budget) {
  PKDP_ASSIGN_OR_RETURN(ExactTermEngine<S> engine,
                        ExactTermEngine<S>::Create(mech, theta, zeta, budget));
  if (i >= mech.space().n()) {
    return absl::InvalidArgumentError("index outside the database");
  }
  const std::optional<uint32_t> k = engine.joint().FindKnowledge(bhat);
  // Knowledge values outside the support make the conditioning event empty.
  if (!k.has_value()) return S(0);
  return engine.ForIndex(i).ApkTerm(a, b, *k, epsilon);
}

template <typename S>
absl::StatusOr<S> PpkTerm(const Mechanism<S>& mech,
                          const DatabaseDistribution<S>& theta,
                          const KnowledgeFunction<S>& zeta, size_t i, int a,
                          int b, const Epsilon<S>& epsilon, double budget) {
  PKDP_ASSIGN_OR_RETURN(ExactTermEngine<S> engine,
                        ExactTermEngine<S>::Create(mech, theta, zeta, budget));
  if (i >= mech.space().n()) {
    return absl::InvalidArgumentError("index outside the database");
  }
  return engine.PpkTerm(engine.ForIndex(i), a, b, epsilon);
}

template <typename S>
absl::StatusOr<TightDelta<S>> TightDeltaDp(const Mechanism<S>& mech,
                                           const Epsilon<S>& epsilon,
                                           double budget) {
  PKDP_RETURN_IF_ERROR(CheckExactBudget<S>(mech, nullptr, budget));
  const DatabaseSpace& space = mech.space();
  const uint64_t size = space.Size().value();
  std::vector<SparseRow<S>> rows(size);
  for (uint64_t index = 0; index < size; ++index) {
    rows[index] = mech.EvaluateAt(index);
  }
  const int records = static_cast<int>(space.alphabet().size());
  TightDelta<S> best;
  best.epsilon = epsilon.value;
  std::vector<S> dense(mech.num_outputs(), S(0));
  for (uint64_t index = 0; index < size; ++index) {
    for (size_t i = 0; i < space.n(); ++i) {
      const int a = space.RecordAt(index, i);
      for (int b = 0; b < records; ++b) {
        if (b == a) continue;
        const uint64_t other =
            index + (static_cast<int64_t>(b) - a) *
                        static_cast<int64_t>(space.stride(i));
        for (const auto& [o, p] : rows[other]) dense[o] = p;
        S delta(0);
        for (const auto& [o, p] : rows[index]) {
          delta += p * Integrand(ClassicalPlrvOf(p, dense[o]), epsilon.factor);
        }
        for (const auto& [o, p] : rows[other]) dense[o] = S(0);
        Offer<S>(best, delta, [&] {
          TermReport<S> r;
          r.model = AttackerModel::kClassicalDp;
          r.index = i;
          r.a = a;
          r.b = b;
          Database shared = space.At(index);
          shared.records[i] = kHidden;
          r.bhat = KnowledgeValue{shared.records};
          r.bhat_label = space.Label(shared);
          r.epsilon = epsilon.value;
          return r;
        });
      }
    }
  }
  return best;
}

template <typename S>
absl::StatusOr<TightDelta<S>> ApkTightDelta(const Scenario<S>& scenario,
                                            const Epsilon<S>& epsilon,
                                            double budget) {
  PKDP_ASSIGN_OR_RETURN(
      std::vector<TightDelta<S>> curve,
      PartialKnowledgeCurve(AttackerModel::kApk, scenario,
                            std::span<const Epsilon<S>>(&epsilon, 1), budget));
  return curve.front();
}

template <typename S>
absl::StatusOr<TightDelta<S>> PpkTightDelta(const Scenario<S>& scenario,
                                            const Epsilon<S>& epsilon,
                                            double budget) {
  PKDP_ASSIGN_OR_RETURN(
      std::vector<TightDelta<S>> curve,
      PartialKnowledgeCurve(AttackerModel::kPpk, scenario,
                            std::span<const Epsilon<S>>(&epsilon, 1), budget));
  return curve.front();
}

template <typename S>
absl::StatusOr<std::vector<DatabaseDistribution<S>>> ConditionFamily(
    std::span<const DatabaseDistribution<S>> thetas,
    std::span<const KnowledgeFunction<S>> zetas, double budget) {
  std::vector<DatabaseDistribution<S>> family;
  for (const auto& theta : thetas) {
    for (const auto& zeta : zetas) {
      PKDP_ASSIGN_OR_RETURN(JointState<S> joint, Joint(theta, zeta, budget));
      const size_t k_count = joint.knowledge_ids().size();
      const uint64_t size = joint.space().Size().value();
      std::vector<std::vector<S>> weights(k_count,
                                          std::vector<S>(size, S(0)));
      std::vector<S> mass(k_count, S(0));
      for (const auto& e : joint.entries()) {
        weights[e.knowledge][e.database] += e.weight;
        mass[e.knowledge] += e.weight;
      }
      for (size_t k = 0; k < k_count; ++k) {
        for (S& w : weights[k]) w /= mass[k];
        PKDP_ASSIGN_OR_RETURN(
            DatabaseDistribution<S> conditioned,
            DatabaseDistribution<S>::Tabulated(joint.space(),
                                               std::move(weights[k])));
        family.push_back(std::move(conditioned));
      }
    }
  }
  return family;
}

template <typename S>
absl::StatusOr<std::vector<TightDelta<S>>> DeltaCurve(
    AttackerModel model, const Scenario<S>& scenario,
    std::span<const double> epsilons, double budget) {
  for (double eps : epsilons) {
    if (!(eps >= 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon ", eps, " is negative"));
    }
  }
  const std::vector<Epsilon<S>> grid = ToEpsilons<S>(epsilons);
  if (model != AttackerModel::kClassicalDp) {
    return PartialKnowledgeCurve(model, scenario,
                                 std::span<const Epsilon<S>>(grid), budget);
  }
  std::vector<TightDelta<S>> curve;
  for (const auto& eps : grid) {
    PKDP_ASSIGN_OR_RETURN(TightDelta<S> point,
                          TightDeltaDp(scenario.mechanism, eps, budget));
    curve.push_back(std::move(point));
  }
  return curve;
}

double EpsilonForDelta(const std::function<double(double)>& tight_delta,
                       double delta_target, double tolerance) {
  constexpr double kInfinity = std::numeric_limits<double>::infinity();
  if (delta_target >= 1.0 || tight_delta(0.0) <= delta_target) return 0.0;
  if (tight_delta(kInfinity) > delta_target) return kInfinity;
  double lo = 0.0;
  double hi = 1.0;
  // Finite privacy losses are bounded by ~745 in double precision.
  while (tight_delta(hi) > delta_target) {
    lo = hi;
    hi *= 2;
    if (hi > 4096) return kInfinity;
  }
  while (hi - lo > tolerance) {
    const double mid = lo + (hi - lo) / 2;
    if (tight_delta(mid) <= delta_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

absl::StatusOr<double> EpsilonForDelta(AttackerModel model,
                                       const Scenario<double>& scenario,
                                       double delta_target, double budget) {
  if (!(delta_target >= 0.0 && delta_target <= 1.0)) {
    return absl::InvalidArgumentError("delta target must lie in [0, 1]");
  }
  absl::Status failure;
  auto evaluate = [&](double eps) {
    if (!failure.ok()) return 0.0;
    const Epsilon<double> point = Epsilon<double>::FromValue(eps);
    absl::StatusOr<std::vector<TightDelta<double>>> result;
    if (model == AttackerModel::kClassicalDp) {
      absl::StatusOr<TightDelta<double>> dp =
          TightDeltaDp(scenario.mechanism, point, budget);
      if (dp.ok()) {
        result = std::vector<TightDelta<double>>{*std::move(dp)};
      } else {
        result = dp.status();
      }
    } else {
      result = PartialKnowledgeCurve(
          model, scenario, std::span<const Epsilon<double>>(&point, 1), budget);
    }
    if (!result.ok()) {
      failure = result.status();
      return 0.0;
    }
    return result->front().delta;
  };
  const double eps = EpsilonForDelta(evaluate, delta_target);
  PKDP_RETURN_IF_ERROR(failure);
  return eps;
}

#define PKDP_INSTANTIATE_VERIFIER(S)                                           \
  template S TightDeltaIndist(std::span<const S>, std::span<const S>,          \
                              const Epsilon<S>&);                              \
  template class ConditionedOutputs<S>;                                        \
  template class ExactTermEngine<S>;                                           \
  template absl::Status CheckExactBudget(                                      \
      const Mechanism<S>&, const KnowledgeFunction<S>*, double);               \
  template absl::StatusOr<S> ApkTerm(                                          \
      const Mechanism<S>&, const DatabaseDistribution<S>&,                     \
      const KnowledgeFunction<S>&, size_t, int, int, const KnowledgeValue&,    \
      const Epsilon<S>&, double);                                              \
  template absl::StatusOr<S> PpkTerm(                                          \
      const Mechanism<S>&, const DatabaseDistribution<S>&,                     \
      const KnowledgeFunction<S>&, size_t, int, int, const Epsilon<S>&,        \
      double);                                                                 \
  template absl::StatusOr<TightDelta<S>> TightDeltaDp(                         \
      const Mechanism<S>&, const Epsilon<S>&, double);                         \
  template absl::StatusOr<TightDelta<S>> ApkTightDelta(                        \
      const Scenario<S>&, const Epsilon<S>&, double);                          \
  template absl::StatusOr<TightDelta<S>> PpkTightDelta(                        \
      const Scenario<S>&, const Epsilon<S>&, double);                          \
  template absl::StatusOr<std::vector<DatabaseDistribution<S>>>                \
  ConditionFamily(std::span<const DatabaseDistribution<S>>,                    \
                  std::span<const KnowledgeFunction<S>>, double);              \
  template absl::StatusOr<std::vector<TightDelta<S>>> DeltaCurve(              \
      AttackerModel, const Scenario<S>&, std::span<const double>, double);

PKDP_INSTANTIATE_VERIFIER(double)
PKDP_INSTANTIATE_VERIFIER(Rational)

#undef PKDP_INSTANTIATE_VERIFIER

}  // namespace pkdp
