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

#include "pkdp/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace pkdp {
namespace {

constexpr uint64_t kMaxIndexable = uint64_t{1} << 62;

// radix^count, or nullopt past kMaxIndexable.
std::optional<uint64_t> CheckedPower(uint64_t radix, size_t count) {
  uint64_t result = 1;
  for (size_t j = 0; j < count; ++j) {
    if (radix != 0 && result > kMaxIndexable / radix) return std::nullopt;
    result *= radix;
  }
  return result;
}

template <typename S>
absl::Status CheckDistribution(const std::vector<S>& row,
                               absl::string_view what) {
  S total(0);
  for (const S& v : row) {
    if (!(S(0) <= v)) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " has a negative or NaN probability"));
    }
    total += v;
  }
  if (std::abs(ToDouble(total) - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s sums to %.17g, expected 1", std::string(what), ToDouble(total)));
  }
  return absl::OkStatus();
}

template <typename S>
absl::Status CheckProbability(const S& p, absl::string_view what) {
  if (!(S(0) <= p && p <= S(1))) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s = %.17g is not a probability in [0, 1]", std::string(what),
                        ToDouble(p)));
  }
  return absl::OkStatus();
}

std::string TupleLabel(const RecordAlphabet& alphabet,
                       const std::vector<int>& symbols) {
  return absl::StrCat(
      "(",
      absl::StrJoin(symbols, ",",
                    [&](std::string* out, int s) {
                      out->append(s == kHidden ? "?" : alphabet.label(s));
                    }),
      ")");
}

}  // namespace

// RecordAlphabet

absl::StatusOr<RecordAlphabet> RecordAlphabet::Create(
    std::vector<std::string> labels) {
  if (labels.empty()) {
    return absl::InvalidArgumentError("record alphabet must not be empty");
  }
  std::set<std::string> seen;
  for (const std::string& label : labels) {
    if (!seen.insert(label).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate record label '", label, "'"));
    }
  }
  return RecordAlphabet(std::move(labels));
}

std::optional<int> RecordAlphabet::Find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

RecordAlphabet BinaryAlphabet() {
  return RecordAlphabet::Create({"No", "Yes"}).value();
}

// DatabaseSpace

DatabaseSpace::DatabaseSpace(RecordAlphabet alphabet, size_t n)
    : alphabet_(std::move(alphabet)), n_(n) {
  size_ = CheckedPower(alphabet_.size(), n_);
  if (size_.has_value()) {
    strides_.assign(n_, 1);
    for (size_t j = n_; j-- > 1;) {
      strides_[j - 1] = strides_[j] * alphabet_.size();
    }
  }
}

double DatabaseSpace::ApproxSize() const {
  return std::pow(static_cast<double>(alphabet_.size()),
                  static_cast<double>(n_));
}

bool DatabaseSpace::Enumerable(double budget) const {
  return size_.has_value() && static_cast<double>(*size_) <= budget;
}

absl::Status DatabaseSpace::Validate(const Database& db) const {
  if (db.size() != n_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "database has ", db.size(), " records, expected ", n_));
  }
  for (int r : db.records) {
    if (r < 0 || static_cast<size_t>(r) >= alphabet_.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record index ", r, " outside the alphabet"));
    }
  }
  return absl::OkStatus();
}

uint64_t DatabaseSpace::Index(const Database& db) const {
  uint64_t index = 0;
  for (size_t j = 0; j < n_; ++j) index = index * alphabet_.size() + db[j];
  return index;
}

Database DatabaseSpace::At(uint64_t index) const {
  Database db{std::vector<int>(n_)};
  for (size_t j = n_; j-- > 0;) {
    db.records[j] = static_cast<int>(index % alphabet_.size());
    index /= alphabet_.size();
  }
  return db;
}

std::string DatabaseSpace::Label(const Database& db) const {
  return TupleLabel(alphabet_, db.records);
}

// DatabaseDistribution

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> DatabaseDistribution<S>::Tabulated(
    DatabaseSpace space, std::vector<S> weights) {
  if (!space.Size().has_value() || weights.size() != *space.Size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tabulated distribution has ", weights.size(),
        " weights, expected one per database"));
  }
  PKDP_RETURN_IF_ERROR(CheckDistribution(weights, "database distribution"));
  DatabaseDistribution dist(Form::kTabulated, std::move(space));
  dist.weights_ = std::move(weights);
  return dist;
}

template <typename S>
absl::StatusOr<DatabaseDistribution<S>>
DatabaseDistribution<S>::ProductCategorical(
    RecordAlphabet alphabet, std::vector<std::vector<S>> marginals) {
  for (size_t i = 0; i < marginals.size(); ++i) {
    if (marginals[i].size() != alphabet.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "marginal ", i + 1, " has ", marginals[i].size(),
          " entries for an alphabet of ", alphabet.size()));
    }
    PKDP_RETURN_IF_ERROR(
        CheckDistribution(marginals[i], absl::StrCat("marginal ", i + 1)));
  }
  const size_t n = marginals.size();
  DatabaseDistribution dist(Form::kProductCategorical,
                            DatabaseSpace(std::move(alphabet), n));
  dist.marginals_ = std::move(marginals);
  return dist;
}

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> DatabaseDistribution<S>::IidBernoulli(
    RecordAlphabet alphabet, size_t n, S p) {
  if (alphabet.size() != 2) {
    return absl::InvalidArgumentError(
        "iid_bernoulli requires a 2-letter alphabet");
  }
  PKDP_RETURN_IF_ERROR(CheckProbability(p, "p"));
  DatabaseDistribution dist(Form::kIidBernoulli,
                            DatabaseSpace(std::move(alphabet), n));
  dist.marginals_.assign(n, std::vector<S>{S(1) - p, p});
  dist.p_ = p;
  return dist;
}

template <typename S>
S DatabaseDistribution<S>::Probability(const Database& db) const {
  if (form_ == Form::kTabulated) return weights_[space_.Index(db)];
  S result(1);
  for (size_t j = 0; j < db.size(); ++j) result *= marginals_[j][db[j]];
  return result;
}

template <typename S>
S DatabaseDistribution<S>::ProbabilityAt(uint64_t index) const {
  if (form_ == Form::kTabulated) return weights_[index];
  return Probability(space_.At(index));
}

template <typename S>
S DatabaseDistribution<S>::RecordMarginal(size_t i, int record) const {
  if (record < 0 || static_cast<size_t>(record) >= space_.alphabet().size()) {
    return S(0);
  }
  if (form_ != Form::kTabulated) return marginals_[i][record];
  S total(0);
  for (uint64_t index = 0; index < weights_.size(); ++index) {
    if (space_.RecordAt(index, i) == record) total += weights_[index];
  }
  return total;
}

template <typename S>
std::vector<S> DatabaseDistribution<S>::Expand() const {
  if (form_ == Form::kTabulated) return weights_;
  std::vector<S> weights;
  weights.reserve(space_.Size().value());
  // Prefix products along the odometer keep this O(|D|) multiplications.
  const size_t n = space_.n();
  std::vector<S> prefix(n + 1, S(1));
  std::vector<int> digits(n, 0);
  for (size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * marginals_[j][0];
  const uint64_t total = space_.Size().value();
  const int radix = static_cast<int>(space_.alphabet().size());
  for (uint64_t index = 0; index < total; ++index) {
    weights.push_back(prefix[n]);
    size_t j = n;
    while (j-- > 0) {
      if (++digits[j] < radix) break;
      digits[j] = 0;
    }
    if (j == static_cast<size_t>(-1)) break;
    for (size_t t = j; t < n; ++t) {
      prefix[t + 1] = prefix[t] * marginals_[t][digits[t]];
    }
  }
  return weights;
}

template <typename S>
DatabaseDistribution<S> DatabaseDistribution<S>::ToTabulated() const {
  if (form_ == Form::kTabulated) return *this;
  DatabaseDistribution dist(Form::kTabulated, space_);
  dist.weights_ = Expand();
  return dist;
}

// Mechanism

template <typename S>
absl::StatusOr<Mechanism<S>> Mechanism<S>::Tabulated(
    DatabaseSpace space, std::vector<std::string> outputs,
    std::vector<std::vector<S>> rows) {
  if (outputs.empty()) {
    return absl::InvalidArgumentError("mechanism output space is empty");
  }
  if (!space.Size().has_value() || rows.size() != *space.Size()) {
    return absl::InvalidArgumentError(
        "tabulated mechanism needs one row per database");
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != outputs.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("mechanism row ", r, " has the wrong width"));
    }
    PKDP_RETURN_IF_ERROR(
        CheckDistribution(rows[r], absl::StrCat("mechanism row ", r)));
  }
  Mechanism mech(Kind::kTabulated, std::move(space));
  mech.outputs_ = std::move(outputs);
  mech.rows_ = std::move(rows);
  return mech;
}

template <typename S>
absl::StatusOr<Mechanism<S>> Mechanism<S>::CountBased(
    DatabaseSpace space, int positive, std::vector<std::string> outputs,
    std::vector<std::vector<S>> rows_by_count) {
  if (outputs.empty()) {
    return absl::InvalidArgumentError("mechanism output space is empty");
  }
  if (positive < 0 || static_cast<size_t>(positive) >= space.alphabet().size()) {
    return absl::InvalidArgumentError("counted record outside the alphabet");
  }
  if (rows_by_count.size() != space.n() + 1) {
    return absl::InvalidArgumentError(
        "count-based mechanism needs one row per count 0..n");
  }
  for (size_t c = 0; c < rows_by_count.size(); ++c) {
    if (rows_by_count[c].size() != outputs.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("mechanism row for count ", c, " has the wrong width"));
    }
    PKDP_RETURN_IF_ERROR(CheckDistribution(
        rows_by_count[c], absl::StrCat("mechanism row for count ", c)));
  }
  Mechanism mech(Kind::kCountBased, std::move(space));
  mech.outputs_ = std::move(outputs);
  mech.rows_ = std::move(rows_by_count);
  mech.positive_ = positive;
  return mech;
}

template <typename S>
absl::StatusOr<Mechanism<S>> Mechanism<S>::RandomizedResponse(
    DatabaseSpace space, S q) {
  PKDP_RETURN_IF_ERROR(CheckProbability(q, "q"));
  if (!space.Enumerable()) {
    return InfeasibleError(
        "randomized response output space is too large to index");
  }
  if (space.alphabet().size() == 1 && q != S(0)) {
    return absl::InvalidArgumentError(
        "randomized response over a 1-letter alphabet needs q = 0");
  }
  Mechanism mech(Kind::kRandomizedResponse, std::move(space));
  mech.q_ = q;
  mech.outputs_.reserve(mech.space_.Size().value());
  ForEachDatabase(mech.space_, [&](uint64_t, const Database& db) {
    mech.outputs_.push_back(mech.space_.Label(db));
  });
  return mech;
}

template <typename S>
std::optional<int> Mechanism<S>::FindOutput(std::string_view label) const {
  auto it = std::find(outputs_.begin(), outputs_.end(), label);
  if (it == outputs_.end()) return std::nullopt;
  return static_cast<int>(it - outputs_.begin());
}

template <typename S>
SparseRow<S> Mechanism<S>::Evaluate(const Database& db) const {
  SparseRow<S> row;
  switch (kind_) {
    case Kind::kTabulated: {
      const auto& dense = rows_[space_.Index(db)];
      for (size_t o = 0; o < dense.size(); ++o) {
        if (S(0) < dense[o]) row.emplace_back(static_cast<int>(o), dense[o]);
      }
      break;
    }
    case Kind::kCountBased: {
      const size_t count = static_cast<size_t>(
          std::count(db.records.begin(), db.records.end(), positive_));
      const auto& dense = rows_[count];
      for (size_t o = 0; o < dense.size(); ++o) {
        if (S(0) < dense[o]) row.emplace_back(static_cast<int>(o), dense[o]);
      }
      break;
    }
    case Kind::kRandomizedResponse: {
      const size_t others = space_.alphabet().size() - 1;
      const S keep = S(1) - q_;
      const S flip = others == 0 ? S(0) : q_ / S(static_cast<int>(others));
      ForEachDatabase(space_, [&](uint64_t index, const Database& out) {
        S p(1);
        for (size_t j = 0; j < db.size(); ++j) {
          p *= out[j] == db[j] ? keep : flip;
        }
        if (S(0) < p) row.emplace_back(static_cast<int>(index), p);
      });
      break;
    }
  }
  return row;
}

template <typename S>
SparseRow<S> Mechanism<S>::EvaluateAt(uint64_t index) const {
  if (kind_ == Kind::kTabulated) {
    SparseRow<S> row;
    const auto& dense = rows_[index];
    for (size_t o = 0; o < dense.size(); ++o) {
      if (S(0) < dense[o]) row.emplace_back(static_cast<int>(o), dense[o]);
    }
    return row;
  }
  return Evaluate(space_.At(index));
}

// KnowledgeFunction

template <typename S>
absl::StatusOr<KnowledgeFunction<S>> KnowledgeFunction<S>::Subset(
    DatabaseSpace space, std::vector<size_t> indices, std::string name) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    return absl::InvalidArgumentError("revealed indices must be distinct");
  }
  for (size_t i : indices) {
    if (i >= space.n()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "revealed index ", i + 1, " outside 1..", space.n()));
    }
  }
  KnowledgeFunction zeta(Kind::kSubset, std::move(space));
  zeta.indices_ = std::move(indices);
  zeta.name_ = std::move(name);
  return zeta;
}

template <typename S>
absl::StatusOr<KnowledgeFunction<S>> KnowledgeFunction<S>::IndependentReveal(
    DatabaseSpace space, S q) {
  PKDP_RETURN_IF_ERROR(CheckProbability(q, "q"));
  if (space.n() > 30) {
    return InfeasibleError("independent_reveal supports at most 30 records");
  }
  KnowledgeFunction zeta(Kind::kIndependentReveal, std::move(space));
  zeta.q_ = q;
  zeta.deterministic_ = false;
  zeta.name_ = absl::StrFormat("independent_reveal(%g)", ToDouble(q));
  return zeta;
}

template <typename S>
absl::StatusOr<KnowledgeFunction<S>> KnowledgeFunction<S>::Tabulated(
    DatabaseSpace space, std::vector<std::string> labels,
    std::vector<std::vector<S>> rows) {
  if (labels.empty()) {
    return absl::InvalidArgumentError("knowledge space is empty");
  }
  if (!space.Size().has_value() || rows.size() != *space.Size()) {
    return absl::InvalidArgumentError(
        "tabulated knowledge function needs one row per database");
  }
  bool deterministic = true;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != labels.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("knowledge row ", r, " has the wrong width"));
    }
    PKDP_RETURN_IF_ERROR(
        CheckDistribution(rows[r], absl::StrCat("knowledge row ", r)));
    const auto positive = std::count_if(rows[r].begin(), rows[r].end(),
                                        [](const S& v) { return S(0) < v; });
    if (positive != 1) deterministic = false;
  }
  KnowledgeFunction zeta(Kind::kTabulated, std::move(space));
  zeta.labels_ = std::move(labels);
  zeta.rows_ = std::move(rows);
  zeta.deterministic_ = deterministic;
  zeta.name_ = "tabulated";
  return zeta;
}

template <typename S>
std::optional<size_t> KnowledgeFunction<S>::PrefixLength() const {
  if (kind_ != Kind::kSubset) return std::nullopt;
  for (size_t j = 0; j < indices_.size(); ++j) {
    if (indices_[j] != j) return std::nullopt;
  }
  return indices_.size();
}

template <typename S>
std::vector<std::pair<KnowledgeValue, S>> KnowledgeFunction<S>::Evaluate(
    const Database& db) const {
  std::vector<std::pair<KnowledgeValue, S>> out;
  switch (kind_) {
    case Kind::kSubset: {
      KnowledgeValue value;
      value.symbols.reserve(indices_.size());
      for (size_t i : indices_) value.symbols.push_back(db[i]);
      out.emplace_back(std::move(value), S(1));
      break;
    }
    case Kind::kIndependentReveal: {
      const size_t n = db.size();
      for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        S p(1);
        KnowledgeValue value{std::vector<int>(n, kHidden)};
        for (size_t j = 0; j < n; ++j) {
          if (mask >> j & 1) {
            p *= q_;
            value.symbols[j] = db[j];
          } else {
            p *= S(1) - q_;
          }
        }
        if (S(0) < p) out.emplace_back(std::move(value), p);
      }
      std::sort(out.begin(), out.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      break;
    }
    case Kind::kTabulated: {
      const auto& dense = rows_[space_.Index(db)];
      for (size_t k = 0; k < dense.size(); ++k) {
        if (S(0) < dense[k]) {
          out.emplace_back(KnowledgeValue{{static_cast<int>(k)}}, dense[k]);
        }
      }
      break;
    }
  }
  return out;
}

template <typename S>
std::optional<uint64_t> KnowledgeFunction<S>::SpaceSize() const {
  switch (kind_) {
    case Kind::kSubset:
      return CheckedPower(space_.alphabet().size(), indices_.size());
    case Kind::kIndependentReveal:
      return CheckedPower(space_.alphabet().size() + 1, space_.n());
    case Kind::kTabulated:
      return labels_.size();
  }
  return std::nullopt;
}

template <typename S>
double KnowledgeFunction<S>::ApproxSpaceSize() const {
  const double radix = static_cast<double>(space_.alphabet().size());
  switch (kind_) {
    case Kind::kSubset:
      return std::pow(radix, static_cast<double>(indices_.size()));
    case Kind::kIndependentReveal:
      return std::pow(radix + 1, static_cast<double>(space_.n()));
    case Kind::kTabulated:
      return static_cast<double>(labels_.size());
  }
  return 0;
}

template <typename S>
SparseRow<S, uint64_t> KnowledgeFunction<S>::EvaluateIds(
    const Database& db) const {
  SparseRow<S, uint64_t> row;
  const uint64_t radix = space_.alphabet().size();
  switch (kind_) {
    case Kind::kSubset: {
      uint64_t id = 0;
      for (size_t i : indices_) id = id * radix + db[i];
      row.emplace_back(id, S(1));
      break;
    }
    case Kind::kIndependentReveal: {
      const size_t n = db.size();
      for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        S p(1);
        uint64_t id = 0;
        for (size_t j = 0; j < n; ++j) {
          if (mask >> j & 1) {
            p *= q_;
            id = id * (radix + 1) + db[j];
          } else {
            p *= S(1) - q_;
            id = id * (radix + 1) + radix;
          }
        }
        if (S(0) < p) row.emplace_back(id, p);
      }
      std::sort(row.begin(), row.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      break;
    }
    case Kind::kTabulated: {
      const auto& dense = rows_[space_.Index(db)];
      for (size_t k = 0; k < dense.size(); ++k) {
        if (S(0) < dense[k]) row.emplace_back(k, dense[k]);
      }
      break;
    }
  }
  return row;
}

template <typename S>
bool KnowledgeFunction<S>::IsValid(const KnowledgeValue& value) const {
  const int radix = static_cast<int>(space_.alphabet().size());
  switch (kind_) {
    case Kind::kSubset:
      return value.symbols.size() == indices_.size() &&
             std::all_of(value.symbols.begin(), value.symbols.end(),
                         [&](int s) { return s >= 0 && s < radix; });
    case Kind::kIndependentReveal:
      return value.symbols.size() == space_.n() &&
             std::all_of(value.symbols.begin(), value.symbols.end(),
                         [&](int s) { return s >= kHidden && s < radix; });
    case Kind::kTabulated:
      return value.symbols.size() == 1 && value.symbols[0] >= 0 &&
             static_cast<size_t>(value.symbols[0]) < labels_.size();
  }
  return false;
}

template <typename S>
uint64_t KnowledgeFunction<S>::Encode(const KnowledgeValue& value) const {
  const uint64_t radix = space_.alphabet().size();
  uint64_t id = 0;
  switch (kind_) {
    case Kind::kSubset:
      for (int s : value.symbols) id = id * radix + s;
      break;
    case Kind::kIndependentReveal:
      for (int s : value.symbols) {
        id = id * (radix + 1) + (s == kHidden ? radix : static_cast<uint64_t>(s));
      }
      break;
    case Kind::kTabulated:
      id = static_cast<uint64_t>(value.symbols[0]);
      break;
  }
  return id;
}

template <typename S>
KnowledgeValue KnowledgeFunction<S>::Decode(uint64_t id) const {
  const uint64_t radix = space_.alphabet().size();
  KnowledgeValue value;
  switch (kind_) {
    case Kind::kSubset:
      value.symbols.assign(indices_.size(), 0);
      for (size_t j = indices_.size(); j-- > 0;) {
        value.symbols[j] = static_cast<int>(id % radix);
        id /= radix;
      }
      break;
    case Kind::kIndependentReveal:
      value.symbols.assign(space_.n(), 0);
      for (size_t j = space_.n(); j-- > 0;) {
        const uint64_t s = id % (radix + 1);
        value.symbols[j] = s == radix ? kHidden : static_cast<int>(s);
        id /= radix + 1;
      }
      break;
    case Kind::kTabulated:
      value.symbols = {static_cast<int>(id)};
      break;
  }
  return value;
}

template <typename S>
std::string KnowledgeFunction<S>::Label(const KnowledgeValue& value) const {
  if (kind_ == Kind::kTabulated) return labels_[value.symbols[0]];
  return TupleLabel(space_.alphabet(), value.symbols);
}

// JointState

template <typename S>
std::optional<uint32_t> JointState<S>::FindKnowledge(
    const KnowledgeValue& value) const {
  if (!zeta_.IsValid(value)) return std::nullopt;
  const uint64_t id = zeta_.Encode(value);
  auto it = std::lower_bound(knowledge_ids_.begin(), knowledge_ids_.end(), id);
  if (it == knowledge_ids_.end() || *it != id) return std::nullopt;
  return static_cast<uint32_t>(it - knowledge_ids_.begin());
}

template <typename S>
S JointState<S>::total_mass() const {
  S total(0);
  for (const Entry& e : entries_) total += e.weight;
  return total;
}

template <typename S>
absl::StatusOr<JointState<S>> Joint(const DatabaseDistribution<S>& theta,
                                    const KnowledgeFunction<S>& zeta,
                                    double budget) {
  if (!(theta.space() == zeta.space())) {
    return absl::InvalidArgumentError(
        "distribution and knowledge function disagree on alphabet or n");
  }
  const DatabaseSpace& space = theta.space();
  if (!space.Enumerable(budget) || !zeta.SpaceSize().has_value()) {
    return InfeasibleError(absl::StrFormat(
        "joint over %.3g databases exceeds the enumeration budget %.3g",
        space.ApproxSize(), budget));
  }
  JointState<S> joint(zeta);
  std::vector<uint64_t> raw_ids;
  const std::vector<S> weights = theta.Expand();
  ForEachDatabase(space, [&](uint64_t index, const Database& db) {
    const S& w = weights[index];
    if (!(S(0) < w)) return;
    for (auto& [id, p] : zeta.EvaluateIds(db)) {
      raw_ids.push_back(id);
      joint.entries_.push_back({index, 0, w * p});
    }
  });
  joint.knowledge_ids_ = raw_ids;
  std::sort(joint.knowledge_ids_.begin(), joint.knowledge_ids_.end());
  joint.knowledge_ids_.erase(
      std::unique(joint.knowledge_ids_.begin(), joint.knowledge_ids_.end()),
      joint.knowledge_ids_.end());
  for (size_t e = 0; e < raw_ids.size(); ++e) {
    joint.entries_[e].knowledge = static_cast<uint32_t>(
        std::lower_bound(joint.knowledge_ids_.begin(),
                         joint.knowledge_ids_.end(), raw_ids[e]) -
        joint.knowledge_ids_.begin());
  }
  return joint;
}

template <typename S>
S EventProb(const JointState<S>& joint, size_t i, int a,
            const std::optional<KnowledgeValue>& bhat) {
  const DatabaseSpace& space = joint.space();
  if (i >= space.n() || a < 0 ||
      static_cast<size_t>(a) >= space.alphabet().size()) {
    return S(0);
  }
  std::optional<uint32_t> k;
  if (bhat.has_value()) {
    k = joint.FindKnowledge(*bhat);
    if (!k.has_value()) return S(0);
  }
  S total(0);
  for (const auto& e : joint.entries()) {
    if (space.RecordAt(e.database, i) != a) continue;
    if (k.has_value() && e.knowledge != *k) continue;
    total += e.weight;
  }
  return total;
}

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> Condition(
    const JointState<S>& joint, size_t i, int a,
    const std::optional<KnowledgeValue>& bhat) {
  const S mass = EventProb(joint, i, a, bhat);
  if (!(S(0) < mass)) {
    return ZeroMassEventError(
        absl::StrCat("conditioning event D(", i + 1, ")=",
                     a >= 0 && static_cast<size_t>(a) <
                                   joint.space().alphabet().size()
                         ? joint.space().alphabet().label(a)
                         : "?",
                     bhat.has_value()
                         ? absl::StrCat(", zeta(D)=", joint.zeta().Label(*bhat))
                         : std::string(),
                     " has probability 0"));
  }
  const DatabaseSpace& space = joint.space();
  std::vector<S> weights(space.Size().value(), S(0));
  std::optional<uint32_t> k;
  if (bhat.has_value()) k = joint.FindKnowledge(*bhat);
  for (const auto& e : joint.entries()) {
    if (space.RecordAt(e.database, i) != a) continue;
    if (k.has_value() && e.knowledge != *k) continue;
    weights[e.database] += e.weight;
  }
  for (S& w : weights) w /= mass;
  return DatabaseDistribution<S>::Tabulated(space, std::move(weights));
}

template <typename S>
absl::StatusOr<DatabaseDistribution<S>> Condition(
    const DatabaseDistribution<S>& theta, size_t i, int a) {
  const S mass = theta.RecordMarginal(i, a);
  if (!(S(0) < mass)) {
    return ZeroMassEventError(
        absl::StrCat("conditioning event D(", i + 1, ") has probability 0"));
  }
  const DatabaseSpace& space = theta.space();
  if (theta.is_product()) {
    std::vector<std::vector<S>> marginals = theta.marginals();
    std::fill(marginals[i].begin(), marginals[i].end(), S(0));
    marginals[i][a] = S(1);
    return DatabaseDistribution<S>::ProductCategorical(space.alphabet(),
                                                       std::move(marginals));
  }
  std::vector<S> weights = theta.Expand();
  for (uint64_t index = 0; index < weights.size(); ++index) {
    weights[index] =
        space.RecordAt(index, i) == a ? weights[index] / mass : S(0);
  }
  return DatabaseDistribution<S>::Tabulated(space, std::move(weights));
}

template <typename S>
std::vector<S> CountDistribution(const DatabaseDistribution<S>& theta,
                                 int positive) {
  std::vector<S> dist{S(1)};
  for (size_t j = 0; j < theta.n(); ++j) {
    const S p = theta.marginals()[j][positive];
    const S q = S(1) - p;
    std::vector<S> next(dist.size() + 1, S(0));
    for (size_t c = 0; c < dist.size(); ++c) {
      next[c] += dist[c] * q;
      next[c + 1] += dist[c] * p;
    }
    dist = std::move(next);
  }
  return dist;
}

template <typename S>
absl::StatusOr<std::vector<S>> OutputDist(const DatabaseDistribution<S>& theta,
                                          const Mechanism<S>& mech,
                                          double budget) {
  if (!(theta.space() == mech.space())) {
    return absl::InvalidArgumentError(
        "distribution and mechanism disagree on alphabet or n");
  }
  std::vector<S> out(mech.num_outputs(), S(0));
  if (theta.is_product() && mech.count_kernel() != nullptr) {
    const std::vector<S> counts = CountDistribution(theta, mech.positive());
    const auto& kernel = *mech.count_kernel();
    for (size_t c = 0; c < counts.size(); ++c) {
      for (size_t o = 0; o < out.size(); ++o) out[o] += counts[c] * kernel[c][o];
    }
    return out;
  }
  if (!theta.space().Enumerable(budget)) {
    return InfeasibleError("output distribution needs database enumeration "
                           "beyond the budget");
  }
  const std::vector<S> weights = theta.Expand();
  for (uint64_t index = 0; index < weights.size(); ++index) {
    if (!(S(0) < weights[index])) continue;
    for (const auto& [o, p] : mech.EvaluateAt(index)) {
      out[o] += weights[index] * p;
    }
  }
  return out;
}

template <typename S>
std::vector<size_t> Scenario<S>::TargetIndices() const {
  if (!targets.empty()) return targets;
  std::vector<size_t> all(mechanism.space().n());
  std::iota(all.begin(), all.end(), size_t{0});
  return all;
}

#define PKDP_INSTANTIATE_MODEL(S)                                              \
  template class DatabaseDistribution<S>;                                      \
  template class Mechanism<S>;                                                 \
  template class KnowledgeFunction<S>;                                         \
  template class JointState<S>;                                                \
  template struct Scenario<S>;                                                 \
  template absl::StatusOr<JointState<S>> Joint(                                \
      const DatabaseDistribution<S>&, const KnowledgeFunction<S>&, double);    \
  template S EventProb(const JointState<S>&, size_t, int,                      \
                       const std::optional<KnowledgeValue>&);                  \
  template absl::StatusOr<DatabaseDistribution<S>> Condition(                  \
      const JointState<S>&, size_t, int, const std::optional<KnowledgeValue>&); \
  template absl::StatusOr<DatabaseDistribution<S>> Condition(                  \
      const DatabaseDistribution<S>&, size_t, int);                            \
  template std::vector<S> CountDistribution(const DatabaseDistribution<S>&,    \
                                            int);                              \
  template absl::StatusOr<std::vector<S>> OutputDist(                          \
      const DatabaseDistribution<S>&, const Mechanism<S>&, double);

PKDP_INSTANTIATE_MODEL(double)
PKDP_INSTANTIATE_MODEL(Rational)

#undef PKDP_INSTANTIATE_MODEL

}  // namespace pkdp
