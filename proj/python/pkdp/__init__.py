# Copyright 2026 The pkdp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Tight delta(epsilon) under partial-knowledge attacker models."""

from ._pkdp import (
    InfeasibleError,
    ZeroMassEventError,
    analyze,
    analyze_csv,
    apk_term,
    binom_pmf,
    binom_tail_at_least_log10,
    epsilon_for_delta,
    ppk_term,
    tight_delta_indist,
)

__all__ = [
    "InfeasibleError",
    "ZeroMassEventError",
    "analyze",
    "analyze_csv",
    "apk_term",
    "binom_pmf",
    "binom_tail_at_least_log10",
    "epsilon_for_delta",
    "ppk_term",
    "tight_delta_indist",
]
