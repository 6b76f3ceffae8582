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

// Sampling estimates of APK and PPK terms for scenarios too large to
// enumerate.
//
// The outer expectation over (D, O, B) is sampled; the integrand m(O, B) is
// evaluated exactly, through the closed form for exchangeable scenarios and
// otherwise through the enumerated conditioned outputs. Samples are drawn in
// fixed-size batches, each with its own generator seeded from (seed, batch),
// and batch sums are merged in batch order, so the estimate does not depend
// on the thread count.

#ifndef PKDP_MONTECARLO_H_
#define PKDP_MONTECARLO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pkdp/model.h"
#include "pkdp/verifier.h"

namespace pkdp {

inline constexpr uint64_t kMonteCarloBatchSize = 1024;

struct MonteCarloOptions {
  uint64_t samples = 100000;
  uint64_t seed = 0;
  // Two-sided confidence level of the reported half-width.
  double confidence = 0.99;
  unsigned threads = 1;
  // Total draws allowed for rejection sampling of the knowledge event.
  uint64_t rejection_budget = 10'000'000;
  // Enumeration budget for the exact integrand when no closed form applies.
  double budget = kDefaultEnumerationBudget;
};

struct Estimate {
  double mean = 0.0;
  // Hoeffding half-width at the requested confidence; the term lies in
  // [0, 1] so this holds without further assumptions.
  double half_width = 0.0;
  double confidence = 0.0;
  uint64_t samples = 0;
  uint64_t seed = 0;
  std::string generator = "mt19937_64";
};

// sqrt(ln(2 / (1 - confidence)) / (2 samples)).
double HoeffdingHalfWidth(uint64_t samples, double confidence);

absl::StatusOr<Estimate> EstimatePpkTerm(const Mechanism<double>& mech,
                                         const DatabaseDistribution<double>& theta,
                                         const KnowledgeFunction<double>& zeta,
                                         size_t i, int a, int b, double epsilon,
                                         const MonteCarloOptions& options);

// Rejection-samples the event zeta(D) = bhat. Returns a zero estimate when
// {D(i) = a, zeta(D) = bhat} has mass zero, and an infeasible error when the
// rejection budget runs out first.
absl::StatusOr<Estimate> EstimateApkTerm(const Mechanism<double>& mech,
                                         const DatabaseDistribution<double>& theta,
                                         const KnowledgeFunction<double>& zeta,
                                         size_t i, int a, int b,
                                         const KnowledgeValue& bhat,
                                         double epsilon,
                                         const MonteCarloOptions& options);

// Largest estimated term at each epsilon over every (theta, zeta, i, a, b)
// and, for APK, every knowledge value. Exchangeable scenarios use one value
// per prefix count and the first target only; other scenarios need an
// enumerable joint law to list the knowledge values. Reports carry the
// half-width and seed of the winning estimate.
absl::StatusOr<std::vector<TightDelta<double>>> MonteCarloDeltaCurve(
    AttackerModel model, const Scenario<double>& scenario,
    std::span<const double> epsilons, const MonteCarloOptions& options);

}  // namespace pkdp

#endif  // PKDP_MONTECARLO_H_
