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

// Closed-form engine for exchangeable scenarios: iid Bernoulli(p) records, a
// mechanism that depends only on the count of positive records, a prefix
// knowledge function prefix(k), and a target index after the prefix.
//
// Conditioned on D(i) = x and a revealed prefix with j positive records, the
// count is j + x + R with R ~ Binomial(n - k - 1, p), so every term reduces to
// sums over R and over j ~ Binomial(k, p).

#ifndef PKDP_FASTPATH_H_
#define PKDP_FASTPATH_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "absl/status/statusor.h"
#include "pkdp/model.h"
#include "pkdp/verifier.h"

namespace pkdp {

// 50 decimal digits, enough to resolve tail masses far below the double
// range.
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

// Pr[Binomial(trials, p) = m], evaluated in log space.
template <typename Real = double>
Real BinomPmf(uint64_t m, uint64_t trials, const Real& p);

// Pr[Binomial(trials, p) >= m].
template <typename Real = double>
Real BinomTailAtLeast(uint64_t m, uint64_t trials, const Real& p);

// Compensated (Neumaier) summation.
template <typename Real>
class CompensatedSum {
 public:
  void Add(const Real& x) {
    const Real t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + compensation_; }

 private:
  static Real abs(const Real& x) { return x < Real(0) ? -x : x; }
  Real sum_ = Real(0);
  Real compensation_ = Real(0);
};

class ExchangeableScenario {
 public:
  // `kernel[c]` is the output distribution for count c (c = 0..n), as
  // (output position, probability) pairs.
  static absl::StatusOr<ExchangeableScenario> Create(
      size_t n, double p, size_t k,
      std::vector<SparseRow<double>> kernel, size_t num_outputs);

  // Recognizes the exchangeable shape in one (theta, zeta) of a scenario.
  // Records are positive when equal to the mechanism's positive label; the
  // other label is negative.
  static absl::StatusOr<ExchangeableScenario> FromScenario(
      const Scenario<double>& scenario, size_t theta, size_t zeta);
  static absl::StatusOr<ExchangeableScenario> FromParts(
      const Mechanism<double>& mech, const DatabaseDistribution<double>& theta,
      const KnowledgeFunction<double>& zeta);

  size_t n() const { return n_; }
  double p() const { return p_; }
  size_t k() const { return k_; }
  size_t num_outputs() const { return num_outputs_; }
  const std::vector<SparseRow<double>>& kernel() const { return kernel_; }
  // Record id of the positive label; the remaining label is 1 - positive.
  int positive() const { return positive_; }

  // Whether {D(i) = x, prefix has j positives} has positive mass; x is 1 for
  // a positive record, 0 otherwise.
  bool Possible(int x, size_t j) const;

 private:
  ExchangeableScenario() = default;

  size_t n_ = 0;
  double p_ = 0.0;
  size_t k_ = 0;
  size_t num_outputs_ = 0;
  std::vector<SparseRow<double>> kernel_;
  int positive_ = 1;
};

// Pr[M(D) = o | D(i) = x, prefix has j positives] for every o. x is 1 for a
// positive record.
template <typename Real = double>
std::vector<Real> ConditionedOutputsFast(const ExchangeableScenario& scenario,
                                         int x, size_t j);

// APK term for hypotheses a, b (1 = positive) and a prefix with j positives.
template <typename Real = double>
Real ApkTermFast(const ExchangeableScenario& scenario, int a, int b, size_t j,
                 double epsilon);

// m(o, j) for every o, where m is the integrand of the (a, b) terms.
template <typename Real = double>
std::vector<Real> IntegrandFast(const ExchangeableScenario& scenario, int a,
                                int b, size_t j, double epsilon);

// IntegrandFast for every j = 0..k, sharing the binomial weights.
template <typename Real = double>
std::vector<std::vector<Real>> IntegrandTableFast(
    const ExchangeableScenario& scenario, int a, int b, double epsilon);

// PPK term: sum over j ~ Binomial(k, p) of the APK term. 0 when D(i) = a has
// mass zero.
template <typename Real = double>
Real PpkTermFast(const ExchangeableScenario& scenario, int a, int b,
                 double epsilon);

// Tight APK / PPK delta over every (theta, zeta) of the scenario and both
// orderings of the two labels. Every target must lie after the prefix; by
// exchangeability the terms do not depend on which target, and the first one
// is reported.
absl::StatusOr<std::vector<TightDelta<double>>> FastDeltaCurve(
    AttackerModel model, const Scenario<double>& scenario,
    std::span<const double> epsilons);

extern template double BinomPmf<double>(uint64_t, uint64_t, const double&);
extern template HighPrecision BinomPmf<HighPrecision>(uint64_t, uint64_t,
                                                      const HighPrecision&);

}  // namespace pkdp

#endif  // PKDP_FASTPATH_H_
