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

// Exact tight delta(epsilon) under classical DP and under active (APK) and
// passive (PPK) partial-knowledge attackers, by enumeration of the finite
// model.
//
// For a fixed (theta, zeta, i, a, b) and epsilon, with
//   m(O, B) = max(0, 1 - e^(epsilon - L_{a,b}(O, B)))
// the APK term for a knowledge value B is the expectation of m(O, B) under
// D ~ theta | D(i) = a, zeta(D) = B, O ~ M(D), and the PPK term is the
// expectation of m(O, B) under D ~ theta | D(i) = a, O ~ M(D), B ~ zeta(D).
// The tight delta of a model is the maximum of its terms over every
// quantified variable.

#ifndef PKDP_VERIFIER_H_
#define PKDP_VERIFIER_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "pkdp/model.h"
#include "pkdp/plrv.h"
#include "pkdp/scalar.h"

namespace pkdp {

enum class AttackerModel { kClassicalDp, kApk, kPpk };
enum class Engine { kExact, kFastPath, kMonteCarlo };

std::string_view ModelName(AttackerModel model);
std::string_view EngineName(Engine engine);

// One evaluated quantifier assignment.
template <typename S = double>
struct TermReport {
  AttackerModel model = AttackerModel::kApk;
  // Positions in the distribution / knowledge families; unset for DP.
  std::optional<size_t> theta;
  std::optional<size_t> zeta;
  size_t index = 0;  // 0-based
  int a = 0;
  int b = 0;
  // Set for APK terms (the conditioned knowledge value) and for DP terms
  // (the shared records D_{-i}, with kHidden at the index).
  std::optional<KnowledgeValue> bhat;
  std::string bhat_label;
  double epsilon = 0.0;
  S delta = S(0);
  Engine engine = Engine::kExact;
  std::optional<double> half_width;
  std::optional<uint64_t> seed;
};

template <typename S = double>
struct TightDelta {
  double epsilon = 0.0;
  S delta = S(0);
  // First assignment in enumeration order attaining the maximum; unset when
  // nothing was quantified (e.g. a one-letter alphabet).
  std::optional<TermReport<S>> argmax;
};

// Smallest delta with P and Q (epsilon, delta)-indistinguishable:
// max over both directions of sum_o max(0, P(o) - e^epsilon Q(o)).
// P and Q must have the same length.
template <typename S>
S TightDeltaIndist(std::span<const S> p, std::span<const S> q,
                   const Epsilon<S>& epsilon);

// Conditioned output statistics for one (theta, zeta, i): the mass of
// {D(i) = x, zeta(D) = k} and the unnormalized output law on that event, for
// every record x and every knowledge value k of positive joint mass.
template <typename S>
class ConditionedOutputs {
 public:
  size_t index() const { return index_; }
  size_t num_records() const { return num_records_; }
  size_t num_knowledge() const { return num_knowledge_; }
  size_t num_outputs() const { return num_outputs_; }

  // Pr[D(i) = x, zeta(D) = k].
  const S& mass(int x, uint32_t k) const {
    return mass_[x * num_knowledge_ + k];
  }
  // Pr[D(i) = x].
  S RecordMass(int x) const;
  // Pr[M(D) = o | D(i) = x, zeta(D) = k]; 0 when the event is impossible.
  S Probability(int x, uint32_t k, int o) const;
  std::vector<S> OutputDistribution(int x, uint32_t k) const;

  // L_{a,b}(o, k) with the partial-knowledge conventions.
  PlrvValue<S> Plrv(int a, int b, uint32_t k, int o) const;
  // APK term; 0 when the a-side event is impossible.
  S ApkTerm(int a, int b, uint32_t k, const Epsilon<S>& epsilon) const;
  // m(o, k) for every (k, o), row-major in k.
  std::vector<S> IntegrandTable(int a, int b, const Epsilon<S>& epsilon) const;
  // Pr[zeta(D) = k | D(i) = a] for every k.
  std::vector<S> KnowledgePosterior(int a) const;

 private:
  template <typename T>
  friend class ExactTermEngine;

  size_t index_ = 0;
  size_t num_records_ = 0;
  size_t num_knowledge_ = 0;
  size_t num_outputs_ = 0;
  std::vector<S> mass_;  // [x][k]
  std::vector<S> out_;   // [x][k][o], unnormalized
};

// Exact evaluation for one (mechanism, theta, zeta).
template <typename S>
class ExactTermEngine {
 public:
  static absl::StatusOr<ExactTermEngine> Create(
      const Mechanism<S>& mech, const DatabaseDistribution<S>& theta,
      const KnowledgeFunction<S>& zeta,
      double budget = kDefaultEnumerationBudget);

  const JointState<S>& joint() const { return joint_; }
  size_t num_outputs() const { return num_outputs_; }

  ConditionedOutputs<S> ForIndex(size_t i) const;

  // PPK term as the joint expectation over (D, O, B), D ~ theta | D(i) = a.
  // ZeroMassEvent if Pr[D(i) = a] = 0.
  absl::StatusOr<S> PpkTerm(const ConditionedOutputs<S>& stats, int a, int b,
                            const Epsilon<S>& epsilon) const;

 private:
  ExactTermEngine(JointState<S> joint, size_t num_outputs)
      : joint_(std::move(joint)), num_outputs_(num_outputs) {}

  JointState<S> joint_;
  size_t num_outputs_;
  std::vector<SparseRow<S>> rows_;  // mechanism rows by database index
};

// Elementary-term estimate |T|^n * |O| * |knowledge| checked against budgets.
template <typename S>
absl::Status CheckExactBudget(const Mechanism<S>& mech,
                              const KnowledgeFunction<S>* zeta, double budget);

template <typename S>
absl::StatusOr<S> ApkTerm(const Mechanism<S>& mech,
                          const DatabaseDistribution<S>& theta,
                          const KnowledgeFunction<S>& zeta, size_t i, int a,
                          int b, const KnowledgeValue& bhat,
                          const Epsilon<S>& epsilon,
                          double budget = kDefaultEnumerationBudget);

template <typename S>
absl::StatusOr<S> PpkTerm(const Mechanism<S>& mech,
                          const DatabaseDistribution<S>& theta,
                          const KnowledgeFunction<S>& zeta, size_t i, int a,
                          int b, const Epsilon<S>& epsilon,
                          double budget = kDefaultEnumerationBudget);

// Tight delta under replace-one adjacency, through the PLRV expectation over
// every ordered adjacent pair.
template <typename S>
absl::StatusOr<TightDelta<S>> TightDeltaDp(
    const Mechanism<S>& mech, const Epsilon<S>& epsilon,
    double budget = kDefaultEnumerationBudget);

template <typename S>
absl::StatusOr<TightDelta<S>> ApkTightDelta(
    const Scenario<S>& scenario, const Epsilon<S>& epsilon,
    double budget = kDefaultEnumerationBudget);

template <typename S>
absl::StatusOr<TightDelta<S>> PpkTightDelta(
    const Scenario<S>& scenario, const Epsilon<S>& epsilon,
    double budget = kDefaultEnumerationBudget);

// Every theta conditioned on each knowledge value of positive mass, over all
// (theta, zeta). Knowledge then becomes implicit in the distributions.
template <typename S>
absl::StatusOr<std::vector<DatabaseDistribution<S>>> ConditionFamily(
    std::span<const DatabaseDistribution<S>> thetas,
    std::span<const KnowledgeFunction<S>> zetas,
    double budget = kDefaultEnumerationBudget);

// Tight delta of `model` at each epsilon, sharing the enumeration across the
// grid. Epsilons must be nonnegative.
template <typename S>
absl::StatusOr<std::vector<TightDelta<S>>> DeltaCurve(
    AttackerModel model, const Scenario<S>& scenario,
    std::span<const double> epsilons,
    double budget = kDefaultEnumerationBudget);

// Smallest epsilon (to within `tolerance`) whose tight delta is at most
// `delta_target`, by bisection on a non-increasing delta(epsilon). Returns
// +infinity when the mass of an infinite privacy loss alone exceeds the
// target.
double EpsilonForDelta(const std::function<double(double)>& tight_delta,
                       double delta_target, double tolerance = 1e-6);

absl::StatusOr<double> EpsilonForDelta(
    AttackerModel model, const Scenario<double>& scenario, double delta_target,
    double budget = kDefaultEnumerationBudget);

}  // namespace pkdp

#endif  // PKDP_VERIFIER_H_
