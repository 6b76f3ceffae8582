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

// Finite probabilistic model: databases of fixed size n over a finite record
// alphabet, distributions over them, stochastic mechanisms, and (possibly
// randomized) background-knowledge functions, together with exact
// conditioning on events {D(i) = a, zeta(D) = B}.
//
// Indices into a database are 0-based throughout the C++ API.

#ifndef PKDP_MODEL_H_
#define PKDP_MODEL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pkdp/scalar.h"
#include "pkdp/status.h"

namespace pkdp {

// Marker for a record the knowledge function does not reveal.
inline constexpr int kHidden = -1;

// Mass tolerance for row-stochastic checks and normalization.
inline constexpr double kMassTolerance = 1e-12;

class RecordAlphabet {
 public:
  static absl::StatusOr<RecordAlphabet> Create(std::vector<std::string> labels);

  size_t size() const { return labels_.size(); }
  const std::string& label(int record) const { return labels_[record]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> Find(std::string_view label) const;

  bool operator==(const RecordAlphabet&) const = default;

 private:
  explicit RecordAlphabet(std::vector<std::string> labels)
      : labels_(std::move(labels)) {}
  std::vector<std::string> labels_;
};

// The {No, Yes} alphabet used by Bernoulli scenarios.
RecordAlphabet BinaryAlphabet();

struct Database {
  std::vector<int> records;

  size_t size() const { return records.size(); }
  int operator[](size_t i) const { return records[i]; }
  auto operator<=>(const Database&) const = default;
};

// Background knowledge value. For subset-revealing functions the symbols are
// the revealed records in index order; for randomized reveal it has one
// symbol per index with kHidden where nothing was revealed; tabulated
// functions use a single symbol naming the label.
struct KnowledgeValue {
  std::vector<int> symbols;

  auto operator<=>(const KnowledgeValue&) const = default;
};

// All databases of size n over an alphabet, in canonical mixed-radix order
// (index 0 is the most significant digit).
class DatabaseSpace {
 public:
  DatabaseSpace(RecordAlphabet alphabet, size_t n);

  const RecordAlphabet& alphabet() const { return alphabet_; }
  size_t n() const { return n_; }

  // |alphabet|^n, or nullopt when it does not fit in 62 bits.
  std::optional<uint64_t> Size() const { return size_; }
  // |alphabet|^n as a double, finite for every space.
  double ApproxSize() const;
  bool Enumerable(double budget = kDefaultEnumerationBudget) const;

  absl::Status Validate(const Database& db) const;
  uint64_t Index(const Database& db) const;
  Database At(uint64_t index) const;
  int RecordAt(uint64_t index, size_t i) const {
    return static_cast<int>((index / strides_[i]) % alphabet_.size());
  }
  uint64_t stride(size_t i) const { return strides_[i]; }
  std::string Label(const Database& db) const;

  bool operator==(const DatabaseSpace& other) const {
    return n_ == other.n_ && alphabet_ == other.alphabet_;
  }

 private:
  RecordAlphabet alphabet_;
  size_t n_;
  std::optional<uint64_t> size_;
  std::vector<uint64_t> strides_;
};

// Calls fn(index, db) for every database in canonical order.
template <typename Fn>
void ForEachDatabase(const DatabaseSpace& space, Fn&& fn) {
  const uint64_t total = space.Size().value();
  const int radix = static_cast<int>(space.alphabet().size());
  Database db{std::vector<int>(space.n(), 0)};
  for (uint64_t index = 0; index < total; ++index) {
    fn(index, static_cast<const Database&>(db));
    for (size_t j = space.n(); j-- > 0;) {
      if (++db.records[j] < radix) break;
      db.records[j] = 0;
    }
  }
}

template <typename S>
class DatabaseDistribution {
 public:
  enum class Form { kTabulated, kProductCategorical, kIidBernoulli };

  // `weights` is dense over the canonical database order.
  static absl::StatusOr<DatabaseDistribution> Tabulated(DatabaseSpace space,
                                                        std::vector<S> weights);
  // marginals[i][r] = Pr[D(i) = r], independently across indices.
  static absl::StatusOr<DatabaseDistribution> ProductCategorical(
      RecordAlphabet alphabet, std::vector<std::vector<S>> marginals);
  // n iid records over a 2-letter alphabet, Pr[D(i) = alphabet[1]] = p.
  static absl::StatusOr<DatabaseDistribution> IidBernoulli(
      RecordAlphabet alphabet, size_t n, S p);

  Form form() const { return form_; }
  bool is_product() const { return form_ != Form::kTabulated; }
  const DatabaseSpace& space() const { return space_; }
  size_t n() const { return space_.n(); }

  S Probability(const Database& db) const;
  S ProbabilityAt(uint64_t index) const;
  // Pr[D(i) = record].
  S RecordMarginal(size_t i, int record) const;

  // Product forms only.
  const std::vector<std::vector<S>>& marginals() const { return marginals_; }
  // IidBernoulli only.
  const std::optional<S>& bernoulli_p() const { return p_; }

  // Dense weights over the canonical order. Requires an enumerable space.
  std::vector<S> Expand() const;
  DatabaseDistribution ToTabulated() const;

 private:
  DatabaseDistribution(Form form, DatabaseSpace space)
      : form_(form), space_(std::move(space)) {}

  Form form_;
  DatabaseSpace space_;
  std::vector<S> weights_;
  std::vector<std::vector<S>> marginals_;
  std::optional<S> p_;
};

// Sparse probability row: (position, probability) pairs with probability > 0,
// positions ascending.
template <typename S, typename Position = int>
using SparseRow = std::vector<std::pair<Position, S>>;

template <typename S>
class Mechanism {
 public:
  enum class Kind { kTabulated, kCountBased, kRandomizedResponse };

  // rows[index] is the dense output distribution of the database with that
  // canonical index.
  static absl::StatusOr<Mechanism> Tabulated(DatabaseSpace space,
                                             std::vector<std::string> outputs,
                                             std::vector<std::vector<S>> rows);
  // Depends on the database only through the number of records equal to
  // `positive`; rows_by_count[c] is the output distribution for count c.
  static absl::StatusOr<Mechanism> CountBased(
      DatabaseSpace space, int positive, std::vector<std::string> outputs,
      std::vector<std::vector<S>> rows_by_count);
  // Each record is reported truthfully with probability 1 - q and replaced by
  // a uniformly chosen different label otherwise. Outputs are whole tuples.
  static absl::StatusOr<Mechanism> RandomizedResponse(DatabaseSpace space,
                                                      S q);

  Kind kind() const { return kind_; }
  const DatabaseSpace& space() const { return space_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  size_t num_outputs() const { return outputs_.size(); }
  std::optional<int> FindOutput(std::string_view label) const;

  SparseRow<S> Evaluate(const Database& db) const;
  SparseRow<S> EvaluateAt(uint64_t index) const;

  // Sum-dependent mechanisms only.
  const std::vector<std::vector<S>>* count_kernel() const {
    return kind_ == Kind::kCountBased ? &rows_ : nullptr;
  }
  int positive() const { return positive_; }

 private:
  Mechanism(Kind kind, DatabaseSpace space) : kind_(kind), space_(std::move(space)) {}

  Kind kind_;
  DatabaseSpace space_;
  std::vector<std::string> outputs_;
  std::vector<std::vector<S>> rows_;
  int positive_ = 1;
  S q_ = S(0);
};

template <typename S>
class KnowledgeFunction {
 public:
  enum class Kind { kSubset, kIndependentReveal, kTabulated };

  // Reveals the records at `indices` (deterministic). Covers none (empty),
  // prefix(k), all_but(i) and identity.
  static absl::StatusOr<KnowledgeFunction> Subset(DatabaseSpace space,
                                                  std::vector<size_t> indices,
                                                  std::string name);
  // Reveals each record independently with probability q.
  static absl::StatusOr<KnowledgeFunction> IndependentReveal(DatabaseSpace space,
                                                             S q);
  // rows[index] is a dense distribution over `labels`.
  static absl::StatusOr<KnowledgeFunction> Tabulated(
      DatabaseSpace space, std::vector<std::string> labels,
      std::vector<std::vector<S>> rows);

  Kind kind() const { return kind_; }
  const DatabaseSpace& space() const { return space_; }
  const std::string& name() const { return name_; }
  bool deterministic() const { return deterministic_; }
  // Revealed indices of a subset function.
  const std::vector<size_t>& indices() const { return indices_; }
  // k when this is prefix(k) (including none = prefix(0)).
  std::optional<size_t> PrefixLength() const;

  std::vector<std::pair<KnowledgeValue, S>> Evaluate(const Database& db) const;

  // Dense encoding of knowledge values, available when the knowledge space
  // fits in 62 bits.
  std::optional<uint64_t> SpaceSize() const;
  double ApproxSpaceSize() const;
  SparseRow<S, uint64_t> EvaluateIds(const Database& db) const;
  uint64_t Encode(const KnowledgeValue& value) const;
  KnowledgeValue Decode(uint64_t id) const;
  bool IsValid(const KnowledgeValue& value) const;

  std::string Label(const KnowledgeValue& value) const;

 private:
  KnowledgeFunction(Kind kind, DatabaseSpace space)
      : kind_(kind), space_(std::move(space)) {}

  Kind kind_;
  DatabaseSpace space_;
  std::string name_;
  bool deterministic_ = true;
  std::vector<size_t> indices_;
  S q_ = S(0);
  std::vector<std::string> labels_;
  std::vector<std::vector<S>> rows_;
};

// Joint law of (D, zeta(D)) for D ~ theta, restricted to positive entries.
template <typename S>
class JointState {
 public:
  struct Entry {
    uint64_t database;
    uint32_t knowledge;  // position in knowledge_ids()
    S weight;
  };

  const DatabaseSpace& space() const { return zeta_.space(); }
  const KnowledgeFunction<S>& zeta() const { return zeta_; }
  // Sorted by (database, knowledge).
  const std::vector<Entry>& entries() const { return entries_; }
  // Encoded knowledge values of positive mass, ascending.
  const std::vector<uint64_t>& knowledge_ids() const { return knowledge_ids_; }
  std::optional<uint32_t> FindKnowledge(const KnowledgeValue& value) const;
  KnowledgeValue knowledge_value(uint32_t position) const {
    return zeta_.Decode(knowledge_ids_[position]);
  }
  S total_mass() const;

 private:
  template <typename T>
  friend absl::StatusOr<JointState<T>> Joint(const DatabaseDistribution<T>&,
                                             const KnowledgeFunction<T>&,
                                             double);
  explicit JointState(KnowledgeFunction<S> zeta) : zeta_(std::move(zeta)) {}

  KnowledgeFunction<S> zeta_;
  std::vector<Entry> entries_;
  std::vector<uint64_t> knowledge_ids_;
};

template <typename S>
absl::StatusOr<JointState<S>> Joint(const DatabaseDistribution<S>& theta,
                                    const KnowledgeFunction<S>& zeta,
                                    double budget = kDefaultEnumerationBudget);

// Pr[D(i) = a, zeta(D) = bhat]; bhat = nullopt drops the knowledge event.
template <typename S>
S EventProb(const JointState<S>& joint, size_t i, int a,
            const std::optional<KnowledgeValue>& bhat);

// theta conditioned on {D(i) = a, zeta(D) = bhat}. ZeroMassEvent when the
// event has probability 0.
template <typename S>
absl::StatusOr<DatabaseDistribution<S>> Condition(
    const JointState<S>& joint, size_t i, int a,
    const std::optional<KnowledgeValue>& bhat);

// theta conditioned on {D(i) = a}; stays in product form for product inputs.
template <typename S>
absl::StatusOr<DatabaseDistribution<S>> Condition(
    const DatabaseDistribution<S>& theta, size_t i, int a);

// Push-forward of theta through the mechanism, dense over outputs.
template <typename S>
absl::StatusOr<std::vector<S>> OutputDist(const DatabaseDistribution<S>& theta,
                                          const Mechanism<S>& mech,
                                          double budget = kDefaultEnumerationBudget);

// Distribution of the number of records equal to `positive` under a product
// distribution, computed without enumerating databases.
template <typename S>
std::vector<S> CountDistribution(const DatabaseDistribution<S>& theta,
                                 int positive);

// The tuple (Theta, Z, M) plus the attacked indices.
template <typename S>
struct Scenario {
  Mechanism<S> mechanism;
  std::vector<DatabaseDistribution<S>> distributions;
  std::vector<KnowledgeFunction<S>> knowledge;
  // 0-based attacked indices; empty means every index.
  std::vector<size_t> targets;

  std::vector<size_t> TargetIndices() const;
};

extern template class DatabaseDistribution<double>;
extern template class DatabaseDistribution<Rational>;
extern template class Mechanism<double>;
extern template class Mechanism<Rational>;
extern template class KnowledgeFunction<double>;
extern template class KnowledgeFunction<Rational>;
extern template class JointState<double>;
extern template class JointState<Rational>;

}  // namespace pkdp

#endif  // PKDP_MODEL_H_
