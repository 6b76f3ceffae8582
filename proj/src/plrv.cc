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

#include "pkdp/plrv.h"

#include "absl/strings/str_cat.h"

namespace pkdp {
namespace {

template <typename S>
S RowProbability(const SparseRow<S>& row, int output) {
  for (const auto& [o, p] : row) {
    if (o == output) return p;
  }
  return S(0);
}

template <typename S>
absl::Status CheckOutput(const Mechanism<S>& mech, int output) {
  if (output < 0 || static_cast<size_t>(output) >= mech.num_outputs()) {
    return absl::InvalidArgumentError(
        absl::StrCat("output ", output, " outside the mechanism's range"));
  }
  return absl::OkStatus();
}

}  // namespace

template <typename S>
PlrvValue<S> PlrvClassical(const Mechanism<S>& mech, const Database& d1,
                           const Database& d2, int output) {
  return ClassicalPlrvOf(RowProbability(mech.Evaluate(d1), output),
                         RowProbability(mech.Evaluate(d2), output));
}

template <typename S>
absl::StatusOr<S> CondOutputProb(const Mechanism<S>& mech,
                                 const DatabaseDistribution<S>& theta,
                                 const KnowledgeFunction<S>& zeta, size_t i,
                                 int a, int output,
                                 const KnowledgeValue& knowledge) {
  PKDP_RETURN_IF_ERROR(CheckOutput(mech, output));
  PKDP_ASSIGN_OR_RETURN(JointState<S> joint, Joint(theta, zeta));
  PKDP_ASSIGN_OR_RETURN(DatabaseDistribution<S> conditioned,
                        Condition(joint, i, a, knowledge));
  PKDP_ASSIGN_OR_RETURN(std::vector<S> outputs, OutputDist(conditioned, mech));
  return outputs[output];
}

template <typename S>
absl::StatusOr<PlrvValue<S>> PlrvPartial(const Mechanism<S>& mech,
                                         const DatabaseDistribution<S>& theta,
                                         const KnowledgeFunction<S>& zeta,
                                         size_t i, int a, int b, int output,
                                         const KnowledgeValue& knowledge) {
  PKDP_RETURN_IF_ERROR(CheckOutput(mech, output));
  PKDP_ASSIGN_OR_RETURN(JointState<S> joint, Joint(theta, zeta));
  // Condition 1: both hypotheses possible given the knowledge.
  if (!(S(0) < EventProb(joint, i, a, knowledge)) ||
      !(S(0) < EventProb(joint, i, b, knowledge))) {
    return PlrvValue<S>::ZeroByConvention();
  }
  PKDP_ASSIGN_OR_RETURN(DatabaseDistribution<S> theta_a,
                        Condition(joint, i, a, knowledge));
  PKDP_ASSIGN_OR_RETURN(DatabaseDistribution<S> theta_b,
                        Condition(joint, i, b, knowledge));
  PKDP_ASSIGN_OR_RETURN(std::vector<S> out_a, OutputDist(theta_a, mech));
  PKDP_ASSIGN_OR_RETURN(std::vector<S> out_b, OutputDist(theta_b, mech));
  // Conditions 2 and 3 are the zero checks inside.
  const S& pa = out_a[output];
  const S& pb = out_b[output];
  if (!(S(0) < pa)) return PlrvValue<S>::NegativeInfinity();
  if (!(S(0) < pb)) return PlrvValue<S>::PositiveInfinity();
  return PlrvValue<S>::Finite(pa / pb);
}

#define PKDP_INSTANTIATE_PLRV(S)                                               \
  template PlrvValue<S> PlrvClassical(const Mechanism<S>&, const Database&,    \
                                      const Database&, int);                   \
  template absl::StatusOr<S> CondOutputProb(                                   \
      const Mechanism<S>&, const DatabaseDistribution<S>&,                     \
      const KnowledgeFunction<S>&, size_t, int, int, const KnowledgeValue&);   \
  template absl::StatusOr<PlrvValue<S>> PlrvPartial(                           \
      const Mechanism<S>&, const DatabaseDistribution<S>&,                     \
      const KnowledgeFunction<S>&, size_t, int, int, int,                      \
      const KnowledgeValue&);

PKDP_INSTANTIATE_PLRV(double)
PKDP_INSTANTIATE_PLRV(Rational)

#undef PKDP_INSTANTIATE_PLRV

}  // namespace pkdp
