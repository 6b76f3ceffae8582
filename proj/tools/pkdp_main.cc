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

// pkdp: tight delta(epsilon) of a scenario file under classical DP and the
// active / passive partial-knowledge attacker models.
//
//   pkdp analyze <file> [--out <csv>] [--engine <e>] [--seed <s>]
//                       [--epsilons <list>] [--model <m>] [--samples <n>]
//                       [--budget <terms>] [--threads <t>]
//   pkdp epsilon <file> --delta <target> [--model <m>] [--engine <e>]
//
// Exit codes: 0 success, 1 usage or schema error, 2 engine infeasible,
// 3 internal error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "pkdp/analysis.h"
#include "pkdp/montecarlo.h"
#include "pkdp/status.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

int ExitCode(const absl::Status& status) {
  if (status.ok()) return 0;
  if (pkdp::IsInfeasible(status)) return kExitInfeasible;
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kPermissionDenied:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

int Fail(const absl::Status& status) {
  std::cerr << "pkdp: " << status.message() << "\n";
  return ExitCode(status);
}

absl::StatusOr<std::vector<double>> ParseEpsilons(const std::string& text) {
  std::vector<double> values;
  for (absl::string_view piece : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    double v;
    if (!absl::SimpleAtod(piece, &v) || !(v >= 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "--epsilons: '", piece, "' is not a nonnegative number"));
    }
    values.push_back(v);
  }
  if (values.empty()) {
    return absl::InvalidArgumentError("--epsilons: expected at least one value");
  }
  return values;
}

void LogOverride(absl::string_view field, absl::string_view value) {
  std::cerr << "pkdp: override analysis." << field << " = " << value << "\n";
}

struct Overrides {
  std::string engine;
  std::string model;
  std::string epsilons;
  uint64_t seed = 0;
  uint64_t samples = 0;
  bool has_seed = false;
  bool has_samples = false;
};

absl::Status ApplyOverrides(const Overrides& o, pkdp::ScenarioSpec& spec) {
  if (!o.engine.empty()) {
    PKDP_ASSIGN_OR_RETURN(spec.analysis.engine, pkdp::ParseEngine(o.engine));
    LogOverride("engine", o.engine);
  }
  if (!o.model.empty()) {
    PKDP_ASSIGN_OR_RETURN(spec.analysis.model, pkdp::ParseModel(o.model));
    LogOverride("model", o.model);
  }
  if (!o.epsilons.empty()) {
    PKDP_ASSIGN_OR_RETURN(spec.analysis.epsilons, ParseEpsilons(o.epsilons));
    LogOverride("epsilons", o.epsilons);
  }
  if (o.has_seed) {
    spec.analysis.seed = o.seed;
    LogOverride("seed", absl::StrCat(o.seed));
  }
  if (o.has_samples) {
    if (o.samples == 0) {
      return absl::InvalidArgumentError("--samples must be positive");
    }
    spec.analysis.samples = o.samples;
    LogOverride("samples", absl::StrCat(o.samples));
  }
  return pkdp::ValidateAnalysis(spec.analysis);
}

int Analyze(const std::string& path, const std::string& out,
            const Overrides& overrides, const pkdp::RunOptions& options) {
  absl::StatusOr<pkdp::ScenarioSpec> spec = pkdp::LoadScenarioFile(path);
  if (!spec.ok()) return Fail(spec.status());
  if (absl::Status s = ApplyOverrides(overrides, *spec); !s.ok()) return Fail(s);
  if (spec->analysis.engine == pkdp::Engine::kMonteCarlo) {
    std::cerr << "pkdp: montecarlo generator " << pkdp::Estimate().generator
              << ", batches of " << pkdp::kMonteCarloBatchSize
              << " seeded by seed_seq(seed, batch)\n";
  }
  absl::StatusOr<std::vector<pkdp::ResultRow>> rows =
      pkdp::RunAnalysis(*spec, options);
  if (!rows.ok()) return Fail(rows.status());
  if (out.empty()) {
    std::cout << pkdp::FormatCsv(*rows);
  } else if (absl::Status s = pkdp::WriteCsv(*rows, out); !s.ok()) {
    return Fail(s);
  }
  if (spec->analysis.model == pkdp::ModelSelection::kCompare) {
    std::ostream& summary = out.empty() ? std::cerr : std::cout;
    for (const std::string& line : pkdp::CompareSummary(*rows)) {
      summary << line << "\n";
    }
  }
  return 0;
}

int EpsilonFor(const std::string& path, double delta,
               const Overrides& overrides, const pkdp::RunOptions& options) {
  absl::StatusOr<pkdp::ScenarioSpec> spec = pkdp::LoadScenarioFile(path);
  if (!spec.ok()) return Fail(spec.status());
  if (absl::Status s = ApplyOverrides(overrides, *spec); !s.ok()) return Fail(s);
  pkdp::AttackerModel model;
  switch (spec->analysis.model) {
    case pkdp::ModelSelection::kDp:
      model = pkdp::AttackerModel::kClassicalDp;
      break;
    case pkdp::ModelSelection::kApk:
      model = pkdp::AttackerModel::kApk;
      break;
    case pkdp::ModelSelection::kPpk:
      model = pkdp::AttackerModel::kPpk;
      break;
    default:
      return Fail(absl::InvalidArgumentError(
          "epsilon needs a single model: dp, apk or ppk"));
  }
  absl::Status failure;
  auto tight = [&](double epsilon) {
    absl::StatusOr<double> value =
        pkdp::TightDeltaAt(*spec, model, epsilon, options);
    if (!value.ok()) {
      if (failure.ok()) failure = value.status();
      return 0.0;
    }
    return *value;
  };
  const double epsilon = pkdp::EpsilonForDelta(tight, delta);
  if (!failure.ok()) return Fail(failure);
  std::printf("%.17g\n", epsilon);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tight delta(epsilon) under partial-knowledge attacker models"};
  app.require_subcommand(1);

  Overrides overrides;
  pkdp::RunOptions options;
  std::string path;
  std::string out;
  double delta = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", path, "Scenario file (JSON)")->required();
    cmd->add_option("--engine", overrides.engine,
                    "exact, fastpath or montecarlo");
    cmd->add_option("--model", overrides.model, "dp, apk, ppk or compare");
    cmd->add_option("--seed", overrides.seed, "Monte Carlo seed")
        ->each([&](const std::string&) { overrides.has_seed = true; });
    cmd->add_option("--samples", overrides.samples, "Monte Carlo samples")
        ->each([&](const std::string&) { overrides.has_samples = true; });
    cmd->add_option("--budget", options.budget,
                    "Exact engine enumeration budget (elementary terms)")
        ->capture_default_str();
    cmd->add_option("--threads", options.threads, "Monte Carlo threads")
        ->capture_default_str();
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Write delta(epsilon) as CSV");
  add_common(analyze);
  analyze->add_option("--out", out, "CSV output path (default: stdout)");
  analyze->add_option("--epsilons", overrides.epsilons,
                      "Comma-separated epsilon grid");

  CLI::App* epsilon =
      app.add_subcommand("epsilon", "Smallest epsilon reaching a delta target");
  add_common(epsilon);
  epsilon->add_option("--delta", delta, "Target delta")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return Analyze(path, out, overrides, options);
    return EpsilonFor(path, delta, overrides, options);
  } catch (const std::exception& e) {
    std::cerr << "pkdp: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
