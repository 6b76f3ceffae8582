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

#include "pkdp/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "pkdp/fastpath.h"
#include "pkdp/montecarlo.h"
#include "pkdp/verifier.h"

namespace pkdp {
namespace {

using Json = nlohmann::json;

absl::Status SchemaError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat(path.empty() ? "/" : path, ": ", what));
}

std::string Child(const std::string& path, absl::string_view key) {
  return absl::StrCat(path, "/", key);
}
std::string Child(const std::string& path, size_t index) {
  return absl::StrCat(path, "/", index);
}

absl::Status CheckObject(const Json& node, const std::string& path,
                         std::initializer_list<absl::string_view> allowed) {
  if (!node.is_object()) return SchemaError(path, "expected an object");
  for (const auto& item : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      return SchemaError(Child(path, item.key()), "unknown key");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<const Json*> Required(const Json& node, const std::string& path,
                                     absl::string_view key) {
  auto it = node.find(std::string(key));
  if (it == node.end()) return SchemaError(Child(path, key), "missing");
  return &*it;
}

absl::StatusOr<double> AsNumber(const Json& node, const std::string& path) {
  if (!node.is_number()) return SchemaError(path, "expected a number");
  return node.get<double>();
}

absl::StatusOr<double> AsProbability(const Json& node, const std::string& path) {
  PKDP_ASSIGN_OR_RETURN(double v, AsNumber(node, path));
  if (!(v >= 0.0 && v <= 1.0)) {
    return SchemaError(path, "expected a probability in [0, 1]");
  }
  return v;
}

absl::StatusOr<uint64_t> AsCount(const Json& node, const std::string& path) {
  if (!node.is_number_integer() || node.get<int64_t>() < 0) {
    return SchemaError(path, "expected a nonnegative integer");
  }
  return node.get<uint64_t>();
}

absl::StatusOr<size_t> AsIndex(const Json& node, const std::string& path) {
  PKDP_ASSIGN_OR_RETURN(uint64_t v, AsCount(node, path));
  if (v == 0) return SchemaError(path, "indices are 1-based");
  return static_cast<size_t>(v - 1);
}

absl::StatusOr<std::string> AsString(const Json& node, const std::string& path) {
  if (!node.is_string()) return SchemaError(path, "expected a string");
  return node.get<std::string>();
}

absl::StatusOr<bool> AsBool(const Json& node, const std::string& path) {
  if (!node.is_boolean()) return SchemaError(path, "expected true or false");
  return node.get<bool>();
}

template <typename T, typename Fn>
absl::StatusOr<std::vector<T>> AsArray(const Json& node,
                                       const std::string& path, Fn&& element) {
  if (!node.is_array()) return SchemaError(path, "expected an array");
  std::vector<T> out;
  for (size_t t = 0; t < node.size(); ++t) {
    PKDP_ASSIGN_OR_RETURN(T value, element(node[t], Child(path, t)));
    out.push_back(std::move(value));
  }
  return out;
}

absl::StatusOr<std::vector<std::string>> AsStrings(const Json& node,
                                                   const std::string& path) {
  return AsArray<std::string>(node, path, AsString);
}

absl::StatusOr<std::vector<double>> AsProbabilities(const Json& node,
                                                    const std::string& path) {
  return AsArray<double>(node, path, AsProbability);
}

absl::StatusOr<std::string> Kind(const Json& node, const std::string& path) {
  if (!node.is_object()) return SchemaError(path, "expected an object");
  PKDP_ASSIGN_OR_RETURN(const Json* kind, Required(node, path, "kind"));
  return AsString(*kind, Child(path, "kind"));
}

absl::StatusOr<DistributionSpec> ParseDistribution(const Json& node,
                                                   const std::string& path) {
  PKDP_ASSIGN_OR_RETURN(std::string kind, Kind(node, path));
  if (kind == "iid_bernoulli") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "p"}));
    PKDP_ASSIGN_OR_RETURN(const Json* p, Required(node, path, "p"));
    PKDP_ASSIGN_OR_RETURN(double value, AsProbability(*p, Child(path, "p")));
    return IidBernoulliSpec{value};
  }
  if (kind == "product_categorical") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "probabilities"}));
    PKDP_ASSIGN_OR_RETURN(const Json* rows,
                          Required(node, path, "probabilities"));
    PKDP_ASSIGN_OR_RETURN(
        std::vector<std::vector<double>> probabilities,
        AsArray<std::vector<double>>(*rows, Child(path, "probabilities"),
                                     AsProbabilities));
    return ProductCategoricalSpec{std::move(probabilities)};
  }
  if (kind == "tabulated") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "entries"}));
    PKDP_ASSIGN_OR_RETURN(const Json* entries, Required(node, path, "entries"));
    TabulatedDistributionSpec spec;
    auto entry = [](const Json& e, const std::string& p)
        -> absl::StatusOr<std::pair<std::vector<std::string>, double>> {
      PKDP_RETURN_IF_ERROR(CheckObject(e, p, {"records", "probability"}));
      PKDP_ASSIGN_OR_RETURN(const Json* records, Required(e, p, "records"));
      PKDP_ASSIGN_OR_RETURN(const Json* prob, Required(e, p, "probability"));
      PKDP_ASSIGN_OR_RETURN(std::vector<std::string> labels,
                            AsStrings(*records, Child(p, "records")));
      PKDP_ASSIGN_OR_RETURN(double v, AsProbability(*prob, Child(p, "probability")));
      return std::make_pair(std::move(labels), v);
    };
    PKDP_ASSIGN_OR_RETURN(
        spec.entries,
        (AsArray<std::pair<std::vector<std::string>, double>>(
            *entries, Child(path, "entries"), entry)));
    return spec;
  }
  return SchemaError(Child(path, "kind"),
                     absl::StrCat("unknown distribution kind '", kind, "'"));
}

absl::StatusOr<KnowledgeSpec> ParseKnowledge(const Json& node,
                                             const std::string& path) {
  PKDP_ASSIGN_OR_RETURN(std::string kind, Kind(node, path));
  if (kind == "none") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind"}));
    return NoKnowledgeSpec{};
  }
  if (kind == "identity") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind"}));
    return IdentityKnowledgeSpec{};
  }
  if (kind == "prefix") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "k"}));
    PKDP_ASSIGN_OR_RETURN(const Json* k, Required(node, path, "k"));
    PKDP_ASSIGN_OR_RETURN(uint64_t value, AsCount(*k, Child(path, "k")));
    return PrefixKnowledgeSpec{static_cast<size_t>(value)};
  }
  if (kind == "subset") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "indices"}));
    PKDP_ASSIGN_OR_RETURN(const Json* indices, Required(node, path, "indices"));
    PKDP_ASSIGN_OR_RETURN(
        std::vector<size_t> values,
        AsArray<size_t>(*indices, Child(path, "indices"), AsIndex));
    return SubsetKnowledgeSpec{std::move(values)};
  }
  if (kind == "all_but") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "index"}));
    PKDP_ASSIGN_OR_RETURN(const Json* index, Required(node, path, "index"));
    PKDP_ASSIGN_OR_RETURN(size_t value, AsIndex(*index, Child(path, "index")));
    return AllButKnowledgeSpec{value};
  }
  if (kind == "independent_reveal") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "q"}));
    PKDP_ASSIGN_OR_RETURN(const Json* q, Required(node, path, "q"));
    PKDP_ASSIGN_OR_RETURN(double value, AsProbability(*q, Child(path, "q")));
    return IndependentRevealSpec{value};
  }
  return SchemaError(Child(path, "kind"),
                     absl::StrCat("unknown knowledge kind '", kind, "'"));
}

absl::StatusOr<std::optional<std::string>> OptionalString(
    const Json& node, const std::string& path, absl::string_view key) {
  auto it = node.find(std::string(key));
  if (it == node.end()) return std::optional<std::string>();
  PKDP_ASSIGN_OR_RETURN(std::string value, AsString(*it, Child(path, key)));
  return std::optional<std::string>(std::move(value));
}

absl::StatusOr<MechanismSpec> ParseMechanism(const Json& node,
                                             const std::string& path) {
  PKDP_ASSIGN_OR_RETURN(std::string kind, Kind(node, path));
  if (kind == "thresholded_count") {
    PKDP_RETURN_IF_ERROR(
        CheckObject(node, path, {"kind", "threshold", "positive"}));
    PKDP_ASSIGN_OR_RETURN(const Json* threshold,
                          Required(node, path, "threshold"));
    if (!threshold->is_number_integer()) {
      return SchemaError(Child(path, "threshold"), "expected an integer");
    }
    PKDP_ASSIGN_OR_RETURN(std::optional<std::string> positive,
                          OptionalString(node, path, "positive"));
    return ThresholdedCountSpec{threshold->get<int64_t>(), true,
                                std::move(positive)};
  }
  if (kind == "count") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "positive"}));
    PKDP_ASSIGN_OR_RETURN(std::optional<std::string> positive,
                          OptionalString(node, path, "positive"));
    return CountSpec{std::move(positive)};
  }
  if (kind == "constant") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "output"}));
    PKDP_ASSIGN_OR_RETURN(std::optional<std::string> output,
                          OptionalString(node, path, "output"));
    return ConstantSpec{output.value_or("0")};
  }
  if (kind == "randomized_response") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "q"}));
    PKDP_ASSIGN_OR_RETURN(const Json* q, Required(node, path, "q"));
    PKDP_ASSIGN_OR_RETURN(double value, AsProbability(*q, Child(path, "q")));
    return RandomizedResponseSpec{value};
  }
  if (kind == "tabulated") {
    PKDP_RETURN_IF_ERROR(CheckObject(node, path, {"kind", "outputs", "rows"}));
    PKDP_ASSIGN_OR_RETURN(const Json* outputs, Required(node, path, "outputs"));
    PKDP_ASSIGN_OR_RETURN(const Json* rows, Required(node, path, "rows"));
    TabulatedMechanismSpec spec;
    PKDP_ASSIGN_OR_RETURN(spec.outputs,
                          AsStrings(*outputs, Child(path, "outputs")));
    auto row = [](const Json& r, const std::string& p)
        -> absl::StatusOr<
            std::pair<std::vector<std::string>, std::vector<double>>> {
      PKDP_RETURN_IF_ERROR(CheckObject(r, p, {"records", "probabilities"}));
      PKDP_ASSIGN_OR_RETURN(const Json* records, Required(r, p, "records"));
      PKDP_ASSIGN_OR_RETURN(const Json* probs, Required(r, p, "probabilities"));
      PKDP_ASSIGN_OR_RETURN(std::vector<std::string> labels,
                            AsStrings(*records, Child(p, "records")));
      PKDP_ASSIGN_OR_RETURN(std::vector<double> dist,
                            AsProbabilities(*probs, Child(p, "probabilities")));
      return std::make_pair(std::move(labels), std::move(dist));
    };
    PKDP_ASSIGN_OR_RETURN(
        spec.rows,
        (AsArray<std::pair<std::vector<std::string>, std::vector<double>>>(
            *rows, Child(path, "rows"), row)));
    return spec;
  }
  return SchemaError(Child(path, "kind"),
                     absl::StrCat("unknown mechanism kind '", kind, "'"));
}

absl::Status ParseAnalysis(const Json& node, const std::string& path,
                           AnalysisSpec& analysis) {
  PKDP_RETURN_IF_ERROR(CheckObject(
      node, path,
      {"model", "epsilons", "engine", "samples", "seed", "threshold_strict"}));
  if (auto it = node.find("model"); it != node.end()) {
    PKDP_ASSIGN_OR_RETURN(std::string name, AsString(*it, Child(path, "model")));
    absl::StatusOr<ModelSelection> model = ParseModel(name);
    if (!model.ok()) return SchemaError(Child(path, "model"), model.status().message());
    analysis.model = *model;
  }
  if (auto it = node.find("engine"); it != node.end()) {
    PKDP_ASSIGN_OR_RETURN(std::string name, AsString(*it, Child(path, "engine")));
    absl::StatusOr<Engine> engine = ParseEngine(name);
    if (!engine.ok()) {
      return SchemaError(Child(path, "engine"), engine.status().message());
    }
    analysis.engine = *engine;
  }
  if (auto it = node.find("epsilons"); it != node.end()) {
    auto epsilon = [](const Json& e, const std::string& p) -> absl::StatusOr<double> {
      PKDP_ASSIGN_OR_RETURN(double v, AsNumber(e, p));
      if (!(v >= 0.0)) return SchemaError(p, "epsilon must be nonnegative");
      return v;
    };
    PKDP_ASSIGN_OR_RETURN(analysis.epsilons,
                          AsArray<double>(*it, Child(path, "epsilons"), epsilon));
    if (analysis.epsilons.empty()) {
      return SchemaError(Child(path, "epsilons"), "expected at least one value");
    }
  }
  if (auto it = node.find("samples"); it != node.end()) {
    PKDP_ASSIGN_OR_RETURN(uint64_t samples, AsCount(*it, Child(path, "samples")));
    if (samples == 0) return SchemaError(Child(path, "samples"), "must be positive");
    analysis.samples = samples;
  }
  if (auto it = node.find("seed"); it != node.end()) {
    PKDP_ASSIGN_OR_RETURN(analysis.seed, AsCount(*it, Child(path, "seed")));
  }
  if (auto it = node.find("threshold_strict"); it != node.end()) {
    PKDP_ASSIGN_OR_RETURN(analysis.threshold_strict,
                          AsBool(*it, Child(path, "threshold_strict")));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateAnalysis(const AnalysisSpec& analysis) {
  if (analysis.engine == Engine::kMonteCarlo &&
      (!analysis.samples || !analysis.seed)) {
    return SchemaError("/analysis",
                       "engine montecarlo requires samples and seed");
  }
  if (analysis.epsilons.empty()) {
    return SchemaError("/analysis/epsilons", "expected at least one value");
  }
  return absl::OkStatus();
}

namespace {

absl::Status CheckKnowledgeDimension(const KnowledgeSpec& knowledge, size_t n,
                                     const std::string& path) {
  if (const auto* prefix = std::get_if<PrefixKnowledgeSpec>(&knowledge)) {
    if (prefix->k > n) {
      return SchemaError(Child(path, "k"),
                         absl::StrCat("prefix length exceeds n = ", n));
    }
  } else if (const auto* subset = std::get_if<SubsetKnowledgeSpec>(&knowledge)) {
    for (size_t index : subset->indices) {
      if (index >= n) {
        return SchemaError(Child(path, "indices"),
                           absl::StrCat("index must lie within 1..", n));
      }
    }
  } else if (const auto* all_but = std::get_if<AllButKnowledgeSpec>(&knowledge)) {
    if (all_but->index >= n) {
      return SchemaError(Child(path, "index"),
                         absl::StrCat("index must lie within 1..", n));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ScenarioSpec> ParseDocument(const Json& root) {
  const std::string path;
  PKDP_RETURN_IF_ERROR(CheckObject(root, path,
                                   {"alphabet", "n", "distributions",
                                    "knowledge", "mechanism", "targets",
                                    "analysis"}));
  ScenarioSpec spec;
  spec.alphabet = BinaryAlphabet().labels();
  if (auto it = root.find("alphabet"); it != root.end()) {
    PKDP_ASSIGN_OR_RETURN(spec.alphabet, AsStrings(*it, "/alphabet"));
  }
  PKDP_ASSIGN_OR_RETURN(const Json* n, Required(root, path, "n"));
  PKDP_ASSIGN_OR_RETURN(uint64_t size, AsCount(*n, "/n"));
  if (size == 0) return SchemaError("/n", "must be positive");
  spec.n = static_cast<size_t>(size);

  PKDP_ASSIGN_OR_RETURN(const Json* distributions,
                        Required(root, path, "distributions"));
  PKDP_ASSIGN_OR_RETURN(spec.distributions,
                        AsArray<DistributionSpec>(*distributions,
                                                  "/distributions",
                                                  ParseDistribution));
  if (spec.distributions.empty()) {
    return SchemaError("/distributions", "expected at least one distribution");
  }
  if (auto it = root.find("knowledge"); it != root.end()) {
    PKDP_ASSIGN_OR_RETURN(
        spec.knowledge,
        AsArray<KnowledgeSpec>(*it, "/knowledge", ParseKnowledge));
  }
  PKDP_ASSIGN_OR_RETURN(const Json* mechanism,
                        Required(root, path, "mechanism"));
  PKDP_ASSIGN_OR_RETURN(spec.mechanism, ParseMechanism(*mechanism, "/mechanism"));
  if (auto it = root.find("targets"); it != root.end()) {
    PKDP_RETURN_IF_ERROR(CheckObject(*it, "/targets", {"from", "to"}));
    PKDP_ASSIGN_OR_RETURN(const Json* from, Required(*it, "/targets", "from"));
    PKDP_ASSIGN_OR_RETURN(const Json* to, Required(*it, "/targets", "to"));
    PKDP_ASSIGN_OR_RETURN(size_t first, AsIndex(*from, "/targets/from"));
    PKDP_ASSIGN_OR_RETURN(size_t last, AsIndex(*to, "/targets/to"));
    if (first > last || last >= spec.n) {
      return SchemaError("/targets",
                         absl::StrCat("range must lie within 1..", spec.n));
    }
    spec.targets = std::make_pair(first, last);
  }
  if (auto it = root.find("analysis"); it != root.end()) {
    PKDP_RETURN_IF_ERROR(ParseAnalysis(*it, "/analysis", spec.analysis));
  }
  if (auto* threshold = std::get_if<ThresholdedCountSpec>(&spec.mechanism)) {
    threshold->strict = spec.analysis.threshold_strict;
  }
  for (size_t z = 0; z < spec.knowledge.size(); ++z) {
    PKDP_RETURN_IF_ERROR(
        CheckKnowledgeDimension(spec.knowledge[z], spec.n, Child("/knowledge", z)));
  }
  PKDP_RETURN_IF_ERROR(ValidateAnalysis(spec.analysis));
  return spec;
}

std::string RecordLabel(const Scenario<double>& scenario, int record) {
  return scenario.mechanism.space().alphabet().label(record);
}

ResultRow ToRow(const Scenario<double>& scenario, AttackerModel model,
                const TightDelta<double>& tight, Engine engine) {
  ResultRow row;
  row.model = std::string(ModelName(model));
  row.epsilon = tight.epsilon;
  row.delta = tight.delta;
  row.engine = std::string(EngineName(engine));
  if (!tight.argmax) return row;
  const TermReport<double>& report = *tight.argmax;
  if (report.theta) row.theta = *report.theta + 1;
  if (report.zeta) row.zeta = *report.zeta + 1;
  row.index = report.index + 1;
  row.a = RecordLabel(scenario, report.a);
  row.b = RecordLabel(scenario, report.b);
  row.bhat = report.bhat_label;
  row.half_width = report.half_width;
  row.seed = report.seed;
  return row;
}

absl::StatusOr<std::vector<TightDelta<double>>> Curve(
    const ScenarioSpec& spec, const Scenario<double>& scenario,
    AttackerModel model, std::span<const double> epsilons,
    const RunOptions& options) {
  switch (spec.analysis.engine) {
    case Engine::kExact:
      if (model == AttackerModel::kClassicalDp) {
        std::vector<TightDelta<double>> curve;
        for (double epsilon : epsilons) {
          if (!(epsilon >= 0.0)) {
            return absl::InvalidArgumentError("epsilon must be nonnegative");
          }
          PKDP_ASSIGN_OR_RETURN(
              TightDelta<double> tight,
              TightDeltaDp(scenario.mechanism,
                           Epsilon<double>::FromValue(epsilon), options.budget));
          curve.push_back(std::move(tight));
        }
        return curve;
      }
      return DeltaCurve(model, scenario, epsilons, options.budget);
    case Engine::kFastPath:
      return FastDeltaCurve(model, scenario, epsilons);
    case Engine::kMonteCarlo: {
      MonteCarloOptions mc;
      mc.samples = *spec.analysis.samples;
      mc.seed = *spec.analysis.seed;
      mc.confidence = options.confidence;
      mc.threads = options.threads;
      mc.budget = options.budget;
      return MonteCarloDeltaCurve(model, scenario, epsilons, mc);
    }
  }
  return absl::InternalError("unknown engine");
}

std::vector<AttackerModel> Models(ModelSelection selection) {
  switch (selection) {
    case ModelSelection::kDp:
      return {AttackerModel::kClassicalDp};
    case ModelSelection::kApk:
      return {AttackerModel::kApk};
    case ModelSelection::kPpk:
      return {AttackerModel::kPpk};
    case ModelSelection::kCompare:
      return {AttackerModel::kApk, AttackerModel::kPpk};
  }
  return {};
}

std::string CsvField(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string Number(double v) { return absl::StrFormat("%.17g", v); }

template <typename T>
std::string Optional(const std::optional<T>& v) {
  return v ? absl::StrCat(*v) : "";
}

}  // namespace

absl::StatusOr<ModelSelection> ParseModel(absl::string_view name) {
  if (name == "dp") return ModelSelection::kDp;
  if (name == "apk") return ModelSelection::kApk;
  if (name == "ppk") return ModelSelection::kPpk;
  if (name == "compare") return ModelSelection::kCompare;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown model '", name, "' (expected dp, apk, ppk or compare)"));
}

absl::StatusOr<Engine> ParseEngine(absl::string_view name) {
  if (name == "exact") return Engine::kExact;
  if (name == "fastpath") return Engine::kFastPath;
  if (name == "montecarlo") return Engine::kMonteCarlo;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown engine '", name, "' (expected exact, fastpath or montecarlo)"));
}

absl::StatusOr<ScenarioSpec> ParseScenario(absl::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end(), nullptr,
                       /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed scenario: ", e.what()));
  }
  return ParseDocument(root);
}

absl::StatusOr<ScenarioSpec> LoadScenarioFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<ScenarioSpec> spec = ParseScenario(buffer.str());
  if (!spec.ok()) {
    return absl::Status(spec.status().code(),
                        absl::StrCat(path, ": ", spec.status().message()));
  }
  return spec;
}

absl::StatusOr<std::vector<ResultRow>> RunAnalysis(const ScenarioSpec& spec,
                                                   const RunOptions& options) {
  PKDP_RETURN_IF_ERROR(ValidateAnalysis(spec.analysis));
  PKDP_ASSIGN_OR_RETURN(Scenario<double> scenario, MakeScenario<double>(spec));
  std::vector<ResultRow> rows;
  for (AttackerModel model : Models(spec.analysis.model)) {
    PKDP_ASSIGN_OR_RETURN(
        std::vector<TightDelta<double>> curve,
        Curve(spec, scenario, model, spec.analysis.epsilons, options));
    for (const TightDelta<double>& tight : curve) {
      rows.push_back(ToRow(scenario, model, tight, spec.analysis.engine));
    }
  }
  return rows;
}

absl::StatusOr<double> TightDeltaAt(const ScenarioSpec& spec,
                                    AttackerModel model, double epsilon,
                                    const RunOptions& options) {
  PKDP_RETURN_IF_ERROR(ValidateAnalysis(spec.analysis));
  PKDP_ASSIGN_OR_RETURN(Scenario<double> scenario, MakeScenario<double>(spec));
  const double epsilons[] = {epsilon};
  PKDP_ASSIGN_OR_RETURN(std::vector<TightDelta<double>> curve,
                        Curve(spec, scenario, model, epsilons, options));
  return curve.front().delta;
}

std::string FormatCsv(std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& x, const ResultRow& y) {
                     if (x.model != y.model) return x.model < y.model;
                     if (x.epsilon != y.epsilon) return x.epsilon < y.epsilon;
                     return x.delta > y.delta;
                   });
  std::string out =
      "model,theta,zeta,i,a,b,bhat,epsilon,delta,engine,half_width,seed\n";
  for (const ResultRow& row : rows) {
    const std::string half_width =
        row.half_width ? Number(*row.half_width) : "";
    out += absl::StrJoin(
        {row.model, Optional(row.theta), Optional(row.zeta), Optional(row.index),
         CsvField(row.a), CsvField(row.b), CsvField(row.bhat),
         Number(row.epsilon), Number(row.delta), row.engine, half_width,
         Optional(row.seed)},
        ",");
    out += "\n";
  }
  return out;
}

absl::Status WriteCsv(const std::vector<ResultRow>& rows,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << FormatCsv(rows);
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

std::vector<std::string> CompareSummary(const std::vector<ResultRow>& rows) {
  std::vector<std::string> lines;
  for (const ResultRow& apk : rows) {
    if (apk.model != ModelName(AttackerModel::kApk)) continue;
    for (const ResultRow& ppk : rows) {
      if (ppk.model != ModelName(AttackerModel::kPpk) ||
          ppk.epsilon != apk.epsilon) {
        continue;
      }
      const double ratio = ppk.delta > 0.0
                               ? apk.delta / ppk.delta
                               : std::numeric_limits<double>::infinity();
      lines.push_back(absl::StrFormat(
          "epsilon=%g apk_delta=%.6g ppk_delta=%.6g apk/ppk=%.6g", apk.epsilon,
          apk.delta, ppk.delta, ratio));
    }
  }
  return lines;
}

}  // namespace pkdp
