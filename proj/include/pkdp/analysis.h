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

// Scenario files, analysis runs and their CSV reports.
//
// A scenario file is JSON (comments allowed). Indices in files and reports
// are 1-based.

#ifndef PKDP_ANALYSIS_H_
#define PKDP_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pkdp/scenarios.h"
#include "pkdp/status.h"

namespace pkdp {

// Parses and validates a scenario document. Errors name the offending key
// as a JSON pointer, or the line and column for malformed JSON.
absl::StatusOr<ScenarioSpec> ParseScenario(absl::string_view text);
absl::StatusOr<ScenarioSpec> LoadScenarioFile(const std::string& path);

absl::StatusOr<ModelSelection> ParseModel(absl::string_view name);
absl::StatusOr<Engine> ParseEngine(absl::string_view name);

// One CSV line: the tight delta of one model at one epsilon and the
// quantifier assignment attaining it.
struct ResultRow {
  std::string model;
  std::optional<size_t> theta;  // 1-based
  std::optional<size_t> zeta;   // 1-based
  std::optional<size_t> index;  // 1-based
  std::string a;
  std::string b;
  std::string bhat;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string engine;
  std::optional<double> half_width;
  std::optional<uint64_t> seed;
};

struct RunOptions {
  double budget = kDefaultEnumerationBudget;
  unsigned threads = 1;
  double confidence = 0.99;
};

// Cross-field checks; the montecarlo engine needs samples and a seed.
absl::Status ValidateAnalysis(const AnalysisSpec& analysis);

absl::StatusOr<std::vector<ResultRow>> RunAnalysis(
    const ScenarioSpec& spec, const RunOptions& options = {});

// Tight delta of one model at one epsilon with the engine of `spec`.
absl::StatusOr<double> TightDeltaAt(const ScenarioSpec& spec,
                                    AttackerModel model, double epsilon,
                                    const RunOptions& options = {});

// Header plus rows sorted by (model, epsilon, delta descending).
std::string FormatCsv(std::vector<ResultRow> rows);
absl::Status WriteCsv(const std::vector<ResultRow>& rows,
                      const std::string& path);

// One line per epsilon with both an APK and a PPK row: the two deltas and
// their ratio.
std::vector<std::string> CompareSummary(const std::vector<ResultRow>& rows);

}  // namespace pkdp

#endif  // PKDP_ANALYSIS_H_
