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

#ifndef PKDP_SCALAR_H_
#define PKDP_SCALAR_H_

#include <cmath>

#include <boost/multiprecision/gmp.hpp>

namespace pkdp {

// Exact rational arithmetic. Every model type and exact-engine routine is a
// template over the probability scalar; `double` is the default and `Rational`
// is the exact mode used where identities must hold with equality.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool kExact = false;
  static double FromDouble(double v) { return v; }
  static double ToDouble(double v) { return v; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool kExact = true;
  // Exact conversion of the binary value of `v`.
  static Rational FromDouble(double v) { return Rational(v); }
  static double ToDouble(const Rational& v) {
    return v.convert_to<double>();
  }
};

template <typename S>
double ToDouble(const S& v) {
  return ScalarTraits<S>::ToDouble(v);
}

template <typename S>
S FromDouble(double v) {
  return ScalarTraits<S>::FromDouble(v);
}

// A privacy parameter epsilon together with its multiplier e^epsilon.
//
// Every tight-delta computation only ever needs e^epsilon, so the exact mode
// carries the multiplier as a rational: identities between engines then hold
// exactly for that multiplier. `value` is kept for reporting.
template <typename S>
struct Epsilon {
  double value = 0.0;
  S factor = S(1);

  // e^0 is exactly 1 in both modes; other values go through std::exp.
  static Epsilon FromValue(double epsilon) {
    if (epsilon == 0.0) return Epsilon{0.0, S(1)};
    return Epsilon{epsilon, FromDouble<S>(std::exp(epsilon))};
  }
  static Epsilon FromFactor(const S& factor) {
    return Epsilon{std::log(ToDouble(factor)), factor};
  }
};

}  // namespace pkdp

#endif  // PKDP_SCALAR_H_
