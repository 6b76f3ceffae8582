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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pkdp/analysis.h"
#include "pkdp/fastpath.h"
#include "pkdp/verifier.h"

namespace py = pybind11;

namespace {

struct InfeasibleException : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroMassEventException : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void Raise(const absl::Status& status) {
  const std::string message(status.message());
  if (pkdp::IsInfeasible(status)) throw InfeasibleException(message);
  if (pkdp::IsZeroMassEvent(status)) throw ZeroMassEventException(message);
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      throw py::value_error(message);
    case absl::StatusCode::kNotFound:
      throw py::key_error(message);
    default:
      throw std::runtime_error(message);
  }
}

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) Raise(value.status());
  return *std::move(value);
}

struct Overrides {
  std::optional<std::string> engine;
  std::optional<std::string> model;
  std::optional<std::vector<double>> epsilons;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> samples;
};

pkdp::ScenarioSpec LoadSpec(const std::string& scenario,
                            const Overrides& overrides) {
  pkdp::ScenarioSpec spec = Unwrap(pkdp::ParseScenario(scenario));
  if (overrides.engine) {
    spec.analysis.engine = Unwrap(pkdp::ParseEngine(*overrides.engine));
  }
  if (overrides.model) {
    spec.analysis.model = Unwrap(pkdp::ParseModel(*overrides.model));
  }
  if (overrides.epsilons) spec.analysis.epsilons = *overrides.epsilons;
  if (overrides.seed) spec.analysis.seed = overrides.seed;
  if (overrides.samples) spec.analysis.samples = overrides.samples;
  if (absl::Status s = pkdp::ValidateAnalysis(spec.analysis); !s.ok()) Raise(s);
  return spec;
}

py::dict RowToDict(const pkdp::ResultRow& row) {
  auto opt = [](const auto& v) -> py::object {
    return v ? py::cast(*v) : py::none();
  };
  py::dict d;
  d["model"] = row.model;
  d["theta"] = opt(row.theta);
  d["zeta"] = opt(row.zeta);
  d["i"] = opt(row.index);
  d["a"] = row.a;
  d["b"] = row.b;
  d["bhat"] = row.bhat;
  d["epsilon"] = row.epsilon;
  d["delta"] = row.delta;
  d["engine"] = row.engine;
  d["half_width"] = opt(row.half_width);
  d["seed"] = opt(row.seed);
  return d;
}

int Record(const pkdp::Scenario<double>& scenario, const std::string& label) {
  std::optional<int> record = scenario.mechanism.space().alphabet().Find(label);
  if (!record) throw py::value_error("unknown record label '" + label + "'");
  return *record;
}

struct TermArgs {
  pkdp::Scenario<double> scenario;
  size_t theta;
  size_t zeta;
  size_t index;
  int a;
  int b;
};

TermArgs ResolveTerm(const std::string& text, size_t theta, size_t zeta,
                     size_t i, const std::string& a, const std::string& b) {
  pkdp::ScenarioSpec spec = Unwrap(pkdp::ParseScenario(text));
  pkdp::Scenario<double> scenario = Unwrap(pkdp::MakeScenario<double>(spec));
  if (theta < 1 || theta > scenario.distributions.size()) {
    throw py::value_error("theta outside the distribution family");
  }
  if (zeta < 1 || zeta > scenario.knowledge.size()) {
    throw py::value_error("zeta outside the knowledge family");
  }
  if (i < 1 || i > spec.n) throw py::value_error("i outside 1..n");
  const int ra = Record(scenario, a);
  const int rb = Record(scenario, b);
  return TermArgs{std::move(scenario), theta - 1, zeta - 1, i - 1, ra, rb};
}

}  // namespace

PYBIND11_MODULE(_pkdp, m) {
  m.doc() = "Tight delta(epsilon) under partial-knowledge attacker models.";

  py::register_exception<InfeasibleException>(m, "InfeasibleError",
                                              PyExc_RuntimeError);
  py::register_exception<ZeroMassEventException>(m, "ZeroMassEventError",
                                                 PyExc_ValueError);

  m.def(
      "tight_delta_indist",
      [](const std::vector<double>& p, const std::vector<double>& q,
         double epsilon) {
        if (p.size() != q.size()) {
          throw py::value_error("distributions differ in length");
        }
        return pkdp::TightDeltaIndist<double>(
            p, q, pkdp::Epsilon<double>::FromValue(epsilon));
      },
      py::arg("p"), py::arg("q"), py::arg("epsilon"),
      "Smallest delta making P and Q (epsilon, delta)-indistinguishable.");

  m.def(
      "binom_pmf",
      [](uint64_t m, uint64_t trials, double p) {
        return pkdp::BinomPmf<double>(m, trials, p);
      },
      py::arg("m"), py::arg("trials"), py::arg("p"));

  m.def(
      "binom_tail_at_least_log10",
      [](uint64_t m, uint64_t trials, double p) {
        const pkdp::HighPrecision tail = pkdp::BinomTailAtLeast(
            m, trials, pkdp::HighPrecision(p));
        return static_cast<double>(log10(tail));
      },
      py::arg("m"), py::arg("trials"), py::arg("p"),
      "log10 Pr[Binomial(trials, p) >= m], evaluated with 50 digits.");

  m.def(
      "analyze",
      [](const std::string& scenario, std::optional<std::string> engine,
         std::optional<std::string> model,
         std::optional<std::vector<double>> epsilons,
         std::optional<uint64_t> seed, std::optional<uint64_t> samples,
         double budget, unsigned threads) {
        const pkdp::ScenarioSpec spec = LoadSpec(
            scenario, Overrides{engine, model, epsilons, seed, samples});
        pkdp::RunOptions options;
        options.budget = budget;
        options.threads = threads;
        std::vector<pkdp::ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = Unwrap(pkdp::RunAnalysis(spec, options));
        }
        py::list out;
        for (const auto& row : rows) out.append(RowToDict(row));
        return out;
      },
      py::arg("scenario"), py::arg("engine") = py::none(),
      py::arg("model") = py::none(), py::arg("epsilons") = py::none(),
      py::arg("seed") = py::none(), py::arg("samples") = py::none(),
      py::arg("budget") = pkdp::kDefaultEnumerationBudget,
      py::arg("threads") = 1,
      "Runs a scenario (JSON text) and returns one dict per CSV row.");

  m.def(
      "analyze_csv",
      [](const std::string& scenario, std::optional<std::string> engine,
         std::optional<std::vector<double>> epsilons,
         std::optional<uint64_t> seed, double budget) {
        const pkdp::ScenarioSpec spec = LoadSpec(
            scenario, Overrides{engine, std::nullopt, epsilons, seed,
                                std::nullopt});
        pkdp::RunOptions options;
        options.budget = budget;
        py::gil_scoped_release release;
        return pkdp::FormatCsv(Unwrap(pkdp::RunAnalysis(spec, options)));
      },
      py::arg("scenario"), py::arg("engine") = py::none(),
      py::arg("epsilons") = py::none(), py::arg("seed") = py::none(),
      py::arg("budget") = pkdp::kDefaultEnumerationBudget);

  m.def(
      "apk_term",
      [](const std::string& scenario, size_t i, const std::string& a,
         const std::string& b, const std::vector<std::optional<std::string>>& bhat,
         double epsilon, size_t theta, size_t zeta, double budget) {
        TermArgs args = ResolveTerm(scenario, theta, zeta, i, a, b);
        pkdp::KnowledgeValue value;
        for (const auto& label : bhat) {
          value.symbols.push_back(label ? Record(args.scenario, *label)
                                        : pkdp::kHidden);
        }
        return Unwrap(pkdp::ApkTerm<double>(
            args.scenario.mechanism, args.scenario.distributions[args.theta],
            args.scenario.knowledge[args.zeta], args.index, args.a, args.b,
            value, pkdp::Epsilon<double>::FromValue(epsilon), budget));
      },
      py::arg("scenario"), py::arg("i"), py::arg("a"), py::arg("b"),
      py::arg("bhat"), py::arg("epsilon"), py::arg("theta") = 1,
      py::arg("zeta") = 1, py::arg("budget") = pkdp::kDefaultEnumerationBudget,
      "APK term for 1-based index i, hypotheses a, b (labels) and the "
      "knowledge value bhat (labels; None for a hidden record).");

  m.def(
      "ppk_term",
      [](const std::string& scenario, size_t i, const std::string& a,
         const std::string& b, double epsilon, size_t theta, size_t zeta,
         double budget) {
        TermArgs args = ResolveTerm(scenario, theta, zeta, i, a, b);
        return Unwrap(pkdp::PpkTerm<double>(
            args.scenario.mechanism, args.scenario.distributions[args.theta],
            args.scenario.knowledge[args.zeta], args.index, args.a, args.b,
            pkdp::Epsilon<double>::FromValue(epsilon), budget));
      },
      py::arg("scenario"), py::arg("i"), py::arg("a"), py::arg("b"),
      py::arg("epsilon"), py::arg("theta") = 1, py::arg("zeta") = 1,
      py::arg("budget") = pkdp::kDefaultEnumerationBudget);

  m.def(
      "epsilon_for_delta",
      [](const std::string& scenario, const std::string& model, double delta,
         std::optional<std::string> engine, double budget) {
        const pkdp::ScenarioSpec spec = LoadSpec(
            scenario, Overrides{engine, std::nullopt, std::nullopt,
                                std::nullopt, std::nullopt});
        pkdp::AttackerModel attacker;
        if (model == "dp") {
          attacker = pkdp::AttackerModel::kClassicalDp;
        } else if (model == "apk") {
          attacker = pkdp::AttackerModel::kApk;
        } else if (model == "ppk") {
          attacker = pkdp::AttackerModel::kPpk;
        } else {
          throw py::value_error("model must be dp, apk or ppk");
        }
        pkdp::RunOptions options;
        options.budget = budget;
        absl::Status failure;
        const double epsilon = pkdp::EpsilonForDelta(
            [&](double eps) {
              absl::StatusOr<double> value =
                  pkdp::TightDeltaAt(spec, attacker, eps, options);
              if (!value.ok()) {
                if (failure.ok()) failure = value.status();
                return 0.0;
              }
              return *value;
            },
            delta);
        if (!failure.ok()) Raise(failure);
        return epsilon;
      },
      py::arg("scenario"), py::arg("model"), py::arg("delta"),
      py::arg("engine") = py::none(),
      py::arg("budget") = pkdp::kDefaultEnumerationBudget,
      "Smallest epsilon whose tight delta is at most `delta`.");
}
