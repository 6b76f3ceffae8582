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

#ifndef PKDP_STATUS_H_
#define PKDP_STATUS_H_

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace pkdp {

// Default cap on elementary terms (databases x outputs x knowledge values)
// the exact engine is willing to enumerate.
inline constexpr double kDefaultEnumerationBudget = 1e8;

// Conditioning on an event of probability zero. Reported as
// kFailedPrecondition carrying a payload so callers can tell it apart from
// other precondition failures.
absl::Status ZeroMassEventError(absl::string_view message);
bool IsZeroMassEvent(const absl::Status& status);

// The requested engine cannot handle the instance within its budget.
absl::Status InfeasibleError(absl::string_view message);
bool IsInfeasible(const absl::Status& status);

}  // namespace pkdp

#define PKDP_RETURN_IF_ERROR(expr)        \
  do {                                    \
    const absl::Status _pkdp_st = (expr); \
    if (!_pkdp_st.ok()) return _pkdp_st;  \
  } while (0)

#define PKDP_CONCAT_INNER_(a, b) a##b
#define PKDP_CONCAT_(a, b) PKDP_CONCAT_INNER_(a, b)
#define PKDP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(tmp).value()
#define PKDP_ASSIGN_OR_RETURN(lhs, rexpr) \
  PKDP_ASSIGN_OR_RETURN_IMPL_(PKDP_CONCAT_(_pkdp_or_, __LINE__), lhs, rexpr)

#endif  // PKDP_STATUS_H_
