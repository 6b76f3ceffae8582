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

// Privacy loss random variables, classical and under partial background
// knowledge.

#ifndef PKDP_PLRV_H_
#define PKDP_PLRV_H_

#include <limits>

#include "absl/status/statusor.h"
#include "pkdp/model.h"
#include "pkdp/scalar.h"

namespace pkdp {

// Value of a privacy loss random variable on the extended reals.
//
// Finite values are stored as the probability ratio whose log they are, so
// the exact mode never leaves the rationals. A value of zero assigned by the
// partial-knowledge convention (one of the two hypotheses is impossible given
// the knowledge) is tracked separately from a computed ratio of 1, but the
// two compare equal.
template <typename S>
class PlrvValue {
 public:
  enum class Kind {
    kFinite,
    kPositiveInfinity,
    kNegativeInfinity,
    kZeroByConvention,
  };

  static PlrvValue Finite(S ratio) { return PlrvValue(Kind::kFinite, std::move(ratio)); }
  static PlrvValue PositiveInfinity() { return PlrvValue(Kind::kPositiveInfinity, S(1)); }
  static PlrvValue NegativeInfinity() { return PlrvValue(Kind::kNegativeInfinity, S(1)); }
  static PlrvValue ZeroByConvention() { return PlrvValue(Kind::kZeroByConvention, S(1)); }

  Kind kind() const { return kind_; }
  bool is_finite() const {
    return kind_ == Kind::kFinite || kind_ == Kind::kZeroByConvention;
  }
  bool is_zero_by_convention() const { return kind_ == Kind::kZeroByConvention; }
  // exp(value) for finite values; 1 for the convention zero.
  const S& ratio() const { return ratio_; }

  double value() const {
    switch (kind_) {
      case Kind::kFinite:
        return std::log(ToDouble(ratio_));
      case Kind::kPositiveInfinity:
        return std::numeric_limits<double>::infinity();
      case Kind::kNegativeInfinity:
        return -std::numeric_limits<double>::infinity();
      case Kind::kZeroByConvention:
        return 0.0;
    }
    return 0.0;
  }

  PlrvValue Negated() const {
    switch (kind_) {
      case Kind::kFinite:
        return Finite(S(1) / ratio_);
      case Kind::kPositiveInfinity:
        return NegativeInfinity();
      case Kind::kNegativeInfinity:
        return PositiveInfinity();
      case Kind::kZeroByConvention:
        return ZeroByConvention();
    }
    return *this;
  }

  friend bool operator==(const PlrvValue& x, const PlrvValue& y) {
    if (x.is_finite() && y.is_finite()) return x.ratio_ == y.ratio_;
    return x.kind_ == y.kind_;
  }

 private:
  PlrvValue(Kind kind, S ratio) : kind_(kind), ratio_(std::move(ratio)) {}

  Kind kind_;
  S ratio_;
};

// Classical PLRV of two output probabilities p1 = Pr[M(D1) = O] and
// p2 = Pr[M(D2) = O]. Both zero gives the convention zero.
template <typename S>
PlrvValue<S> ClassicalPlrvOf(const S& p1, const S& p2) {
  const bool zero1 = !(S(0) < p1);
  const bool zero2 = !(S(0) < p2);
  if (zero1 && zero2) return PlrvValue<S>::ZeroByConvention();
  if (zero1) return PlrvValue<S>::NegativeInfinity();
  if (zero2) return PlrvValue<S>::PositiveInfinity();
  return PlrvValue<S>::Finite(p1 / p2);
}

// Partial-knowledge PLRV from the conditioned output probabilities pa (given
// D(i) = a) and pb (given D(i) = b). `events_possible` is condition 1: both
// conditioning events have positive mass. The cascade is then: convention
// zero if condition 1 fails, -infinity if pa = 0, +infinity if pb = 0.
template <typename S>
PlrvValue<S> PartialPlrvOf(const S& pa, const S& pb, bool events_possible) {
  if (!events_possible) return PlrvValue<S>::ZeroByConvention();
  if (!(S(0) < pa)) return PlrvValue<S>::NegativeInfinity();
  if (!(S(0) < pb)) return PlrvValue<S>::PositiveInfinity();
  return PlrvValue<S>::Finite(pa / pb);
}

// max(0, 1 - e^(epsilon - L)) for L = plrv, with the limits at +-infinity.
// `exp_epsilon` is e^epsilon; +infinity is allowed in double mode.
template <typename S>
S Integrand(const PlrvValue<S>& plrv, const S& exp_epsilon) {
  using Kind = typename PlrvValue<S>::Kind;
  switch (plrv.kind()) {
    case Kind::kPositiveInfinity:
      return S(1);
    case Kind::kNegativeInfinity:
      return S(0);
    case Kind::kZeroByConvention: {
      const S value = S(1) - exp_epsilon;
      return S(0) < value ? value : S(0);
    }
    case Kind::kFinite: {
      const S value = S(1) - exp_epsilon / plrv.ratio();
      return S(0) < value ? value : S(0);
    }
  }
  return S(0);
}

// ln(Pr[M(d1) = output] / Pr[M(d2) = output]). When both probabilities are
// zero the convention zero is returned.
template <typename S>
PlrvValue<S> PlrvClassical(const Mechanism<S>& mech, const Database& d1,
                           const Database& d2, int output);

// Pr[M(D) = output | D(i) = a, zeta(D) = knowledge] for D ~ theta.
// ZeroMassEvent when the conditioning event is impossible.
template <typename S>
absl::StatusOr<S> CondOutputProb(const Mechanism<S>& mech,
                                 const DatabaseDistribution<S>& theta,
                                 const KnowledgeFunction<S>& zeta, size_t i,
                                 int a, int output,
                                 const KnowledgeValue& knowledge);

// Partial-knowledge PLRV with its three-condition cascade: the convention
// zero when either conditioning event has mass zero, then -infinity when the
// a-side output probability vanishes, then +infinity when the b-side one
// does.
template <typename S>
absl::StatusOr<PlrvValue<S>> PlrvPartial(const Mechanism<S>& mech,
                                         const DatabaseDistribution<S>& theta,
                                         const KnowledgeFunction<S>& zeta,
                                         size_t i, int a, int b, int output,
                                         const KnowledgeValue& knowledge);

}  // namespace pkdp

#endif  // PKDP_PLRV_H_
