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

#include "pkdp/status.h"

#include "absl/strings/cord.h"

namespace pkdp {
namespace {

constexpr char kErrorKindUrl[] = "type.pkdp/error-kind";
constexpr char kZeroMass[] = "zero-mass-event";
constexpr char kInfeasible[] = "engine-infeasible";

bool HasKind(const absl::Status& status, absl::string_view kind) {
  auto payload = status.GetPayload(kErrorKindUrl);
  return payload.has_value() && *payload == kind;
}

}  // namespace

absl::Status ZeroMassEventError(absl::string_view message) {
  absl::Status status = absl::FailedPreconditionError(message);
  status.SetPayload(kErrorKindUrl, absl::Cord(kZeroMass));
  return status;
}

bool IsZeroMassEvent(const absl::Status& status) {
  return HasKind(status, kZeroMass);
}

absl::Status InfeasibleError(absl::string_view message) {
  absl::Status status = absl::ResourceExhaustedError(message);
  status.SetPayload(kErrorKindUrl, absl::Cord(kInfeasible));
  return status;
}

bool IsInfeasible(const absl::Status& status) {
  return HasKind(status, kInfeasible);
}

}  // namespace pkdp
