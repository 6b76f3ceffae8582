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

#include "pkdp/fastpath.h"

#include <cmath>
#include <type_traits>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/log1p.hpp>

#include "absl/strings/str_cat.h"
#include "pkdp/plrv.h"

namespace pkdp {
namespace {

template <typename Real>
Real ExpOf(double epsilon) {
  if (epsilon == 0.0) return Real(1);
  using std::exp;
  return exp(Real(epsilon));
}

// Pr[Binomial(trials, p) = m] for m = 0..trials. Double evaluates each entry
// in log space; wider types step the ratio pmf(m + 1) / pmf(m), whose
// accumulated rounding stays far below their precision.
template <typename Real>
std::vector<Real> BinomPmfRow(uint64_t trials, const Real& p) {
  std::vector<Real> pmf(trials + 1);
  if (std::is_same_v<Real, double> || p == Real(0) || p == Real(1)) {
    for (uint64_t m = 0; m <= trials; ++m) pmf[m] = BinomPmf<Real>(m, trials, p);
    return pmf;
  }
  using std::exp;
  const Real odds = p / (Real(1) - p);
  pmf[0] = exp(Real(trials) * boost::math::log1p(-p));
  for (uint64_t m = 0; m < trials; ++m) {
    pmf[m + 1] = pmf[m] * odds * Real(trials - m) / Real(m + 1);
  }
  return pmf;
}

// Pr[rest = r] for the n - k - 1 records outside the prefix and the target.
template <typename Real>
std::vector<Real> RestPmf(const ExchangeableScenario& sc) {
  return BinomPmfRow<Real>(sc.n() - sc.k() - 1, Real(sc.p()));
}

template <typename Real>
std::vector<Real> Outputs(const ExchangeableScenario& sc,
                          const std::vector<Real>& rest, int x, size_t j) {
  std::vector<Real> out(sc.num_outputs(), Real(0));
  for (size_t r = 0; r < rest.size(); ++r) {
    if (!(Real(0) < rest[r])) continue;
    for (const auto& [o, q] : sc.kernel()[j + x + r]) out[o] += rest[r] * Real(q);
  }
  return out;
}

template <typename Real>
std::vector<Real> Integrands(const ExchangeableScenario& sc,
                             const std::vector<Real>& rest, int a, int b,
                             size_t j, const Real& factor) {
  std::vector<Real> m(sc.num_outputs(), Real(0));
  if (!sc.Possible(a, j)) return m;
  const bool both = sc.Possible(b, j);
  const std::vector<Real> pa = Outputs(sc, rest, a, j);
  const std::vector<Real> pb =
      both ? Outputs(sc, rest, b, j) : std::vector<Real>(sc.num_outputs());
  for (size_t o = 0; o < m.size(); ++o) {
    m[o] = Integrand(PartialPlrvOf(pa[o], pb[o], both), factor);
  }
  return m;
}

template <typename Real>
Real Apk(const ExchangeableScenario& sc, const std::vector<Real>& rest, int a,
         int b, size_t j, const Real& factor) {
  if (!sc.Possible(a, j)) return Real(0);
  const bool both = sc.Possible(b, j);
  const std::vector<Real> pa = Outputs(sc, rest, a, j);
  const std::vector<Real> pb =
      both ? Outputs(sc, rest, b, j) : std::vector<Real>(sc.num_outputs());
  CompensatedSum<Real> sum;
  for (size_t o = 0; o < pa.size(); ++o) {
    if (!(Real(0) < pa[o])) continue;
    sum.Add(pa[o] * Integrand(PartialPlrvOf(pa[o], pb[o], both), factor));
  }
  return sum.value();
}

template <typename Real>
Real Ppk(const ExchangeableScenario& sc, const std::vector<Real>& rest, int a,
         int b, const Real& factor) {
  CompensatedSum<Real> sum;
  const std::vector<Real> prefix = BinomPmfRow<Real>(sc.k(), Real(sc.p()));
  for (size_t j = 0; j <= sc.k(); ++j) {
    const Real& w = prefix[j];
    if (!(Real(0) < w) || !sc.Possible(a, j)) continue;
    sum.Add(w * Apk(sc, rest, a, b, j, factor));
  }
  return sum.value();
}

absl::Status CheckBinaryHypothesis(int x) {
  if (x != 0 && x != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("hypothesis ", x, " is not 0 or 1"));
  }
  return absl::OkStatus();
}

// The canonical (smallest) prefix value with j positive records.
KnowledgeValue PrefixValue(size_t k, size_t j, int positive) {
  KnowledgeValue value{std::vector<int>(k, 1 - positive)};
  if (positive > 1 - positive) {
    for (size_t t = k - j; t < k; ++t) value.symbols[t] = positive;
  } else {
    for (size_t t = 0; t < j; ++t) value.symbols[t] = positive;
  }
  return value;
}

}  // namespace

template <typename Real>
Real BinomPmf(uint64_t m, uint64_t trials, const Real& p) {
  if (m > trials) return Real(0);
  if (p == Real(0)) return m == 0 ? Real(1) : Real(0);
  if (p == Real(1)) return m == trials ? Real(1) : Real(0);
  // lgamma near 10^4 carries an absolute error of ~1e-11 in double; the
  // extended type keeps the log-space difference accurate.
  using Work = std::conditional_t<std::is_same_v<Real, double>, long double, Real>;
  using std::exp;
  using std::log;
  const Work q(p);
  const Work log_choose = boost::math::lgamma(Work(trials + 1)) -
                          boost::math::lgamma(Work(m + 1)) -
                          boost::math::lgamma(Work(trials - m + 1));
  const Work log_pmf = log_choose + Work(m) * log(q) +
                       Work(trials - m) * boost::math::log1p(-q);
  return Real(exp(log_pmf));
}

template <typename Real>
Real BinomTailAtLeast(uint64_t m, uint64_t trials, const Real& p) {
  if (m > trials) return Real(0);
  const std::vector<Real> pmf = BinomPmfRow<Real>(trials, p);
  CompensatedSum<Real> sum;
  for (uint64_t t = m; t <= trials; ++t) sum.Add(pmf[t]);
  return sum.value();
}

absl::StatusOr<ExchangeableScenario> ExchangeableScenario::Create(
    size_t n, double p, size_t k, std::vector<SparseRow<double>> kernel,
    size_t num_outputs) {
  if (!(0.0 <= p && p <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("p = ", p, " not in [0, 1]"));
  }
  if (k >= n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "prefix length ", k, " leaves no target index among ", n));
  }
  if (kernel.size() != n + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "count kernel has ", kernel.size(), " rows, expected ", n + 1));
  }
  for (const auto& row : kernel) {
    for (const auto& [o, q] : row) {
      if (o < 0 || static_cast<size_t>(o) >= num_outputs || !(q >= 0.0)) {
        return absl::InvalidArgumentError("malformed count kernel row");
      }
    }
  }
  ExchangeableScenario sc;
  sc.n_ = n;
  sc.p_ = p;
  sc.k_ = k;
  sc.kernel_ = std::move(kernel);
  sc.num_outputs_ = num_outputs;
  return sc;
}

absl::StatusOr<ExchangeableScenario> ExchangeableScenario::FromScenario(
    const Scenario<double>& scenario, size_t theta_index, size_t zeta_index) {
  return FromParts(scenario.mechanism, scenario.distributions.at(theta_index),
                   scenario.knowledge.at(zeta_index));
}

absl::StatusOr<ExchangeableScenario> ExchangeableScenario::FromParts(
    const Mechanism<double>& mech, const DatabaseDistribution<double>& theta,
    const KnowledgeFunction<double>& zeta) {
  auto reject = [](absl::string_view why) {
    return InfeasibleError(absl::StrCat(
        "fastpath needs an exchangeable scenario: ", why,
        "; use the exact or montecarlo engine"));
  };
  if (mech.space().alphabet().size() != 2) {
    return reject("the record alphabet must have two labels");
  }
  if (!theta.is_product()) return reject("records must be iid");
  const int positive = mech.positive();
  const double p = theta.marginals()[0][positive];
  for (const auto& marginal : theta.marginals()) {
    if (marginal[positive] != p) return reject("records must be iid");
  }
  if (mech.count_kernel() == nullptr) {
    return reject("the mechanism must depend only on the count");
  }
  const std::optional<size_t> k = zeta.PrefixLength();
  if (!k) return reject("the knowledge must reveal a prefix");
  std::vector<SparseRow<double>> kernel;
  for (const auto& dense : *mech.count_kernel()) {
    SparseRow<double>& row = kernel.emplace_back();
    for (size_t o = 0; o < dense.size(); ++o) {
      if (dense[o] > 0.0) row.emplace_back(static_cast<int>(o), dense[o]);
    }
  }
  PKDP_ASSIGN_OR_RETURN(
      ExchangeableScenario sc,
      Create(theta.n(), p, *k, std::move(kernel), mech.num_outputs()));
  sc.positive_ = positive;
  return sc;
}

bool ExchangeableScenario::Possible(int x, size_t j) const {
  if (j > k_) return false;
  if (x == 1 ? p_ == 0.0 : p_ == 1.0) return false;
  return (p_ > 0.0 || j == 0) && (p_ < 1.0 || j == k_);
}

template <typename Real>
std::vector<Real> ConditionedOutputsFast(const ExchangeableScenario& sc, int x,
                                         size_t j) {
  if (!sc.Possible(x, j)) return std::vector<Real>(sc.num_outputs(), Real(0));
  return Outputs(sc, RestPmf<Real>(sc), x, j);
}

template <typename Real>
Real ApkTermFast(const ExchangeableScenario& sc, int a, int b, size_t j,
                 double epsilon) {
  if (!CheckBinaryHypothesis(a).ok() || !CheckBinaryHypothesis(b).ok()) {
    return Real(0);
  }
  return Apk(sc, RestPmf<Real>(sc), a, b, j, ExpOf<Real>(epsilon));
}

template <typename Real>
std::vector<Real> IntegrandFast(const ExchangeableScenario& sc, int a, int b,
                                size_t j, double epsilon) {
  return Integrands(sc, RestPmf<Real>(sc), a, b, j, ExpOf<Real>(epsilon));
}

template <typename Real>
std::vector<std::vector<Real>> IntegrandTableFast(
    const ExchangeableScenario& sc, int a, int b, double epsilon) {
  const std::vector<Real> rest = RestPmf<Real>(sc);
  const Real factor = ExpOf<Real>(epsilon);
  std::vector<std::vector<Real>> table;
  for (size_t j = 0; j <= sc.k(); ++j) {
    table.push_back(Integrands(sc, rest, a, b, j, factor));
  }
  return table;
}

template <typename Real>
Real PpkTermFast(const ExchangeableScenario& sc, int a, int b,
                 double epsilon) {
  if (!CheckBinaryHypothesis(a).ok() || !CheckBinaryHypothesis(b).ok()) {
    return Real(0);
  }
  return Ppk(sc, RestPmf<Real>(sc), a, b, ExpOf<Real>(epsilon));
}

absl::StatusOr<std::vector<TightDelta<double>>> FastDeltaCurve(
    AttackerModel model, const Scenario<double>& scenario,
    std::span<const double> epsilons) {
  if (model == AttackerModel::kClassicalDp) {
    return absl::InvalidArgumentError(
        "the fastpath engine covers the apk and ppk models");
  }
  for (double epsilon : epsilons) {
    if (!(epsilon >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon ", epsilon, " is negative"));
    }
  }
  std::vector<TightDelta<double>> curve(epsilons.size());
  for (size_t e = 0; e < epsilons.size(); ++e) curve[e].epsilon = epsilons[e];
  const std::vector<size_t> targets = scenario.TargetIndices();
  if (targets.empty()) return curve;

  for (size_t t = 0; t < scenario.distributions.size(); ++t) {
    for (size_t z = 0; z < scenario.knowledge.size(); ++z) {
      PKDP_ASSIGN_OR_RETURN(ExchangeableScenario sc,
                            ExchangeableScenario::FromScenario(scenario, t, z));
      for (size_t target : targets) {
        if (target < sc.k()) {
          return InfeasibleError(absl::StrCat(
              "fastpath needs every target after the revealed prefix; index ",
              target + 1, " is inside prefix(", sc.k(), ")"));
        }
      }
      const KnowledgeFunction<double>& zeta = scenario.knowledge[z];
      const std::vector<double> rest = RestPmf<double>(sc);
      for (size_t e = 0; e < epsilons.size(); ++e) {
        const double factor = ExpOf<double>(epsilons[e]);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            if (a == b) continue;
            const int xa = a == sc.positive() ? 1 : 0;
            const int xb = b == sc.positive() ? 1 : 0;
            TermReport<double> report;
            report.model = model;
            report.theta = t;
            report.zeta = z;
            report.index = targets.front();
            report.a = a;
            report.b = b;
            report.epsilon = epsilons[e];
            report.engine = Engine::kFastPath;
            auto offer = [&](double delta) {
              report.delta = delta;
              if (!curve[e].argmax || delta > curve[e].delta) {
                curve[e].delta = delta;
                curve[e].argmax = report;
              }
            };
            if (model == AttackerModel::kPpk) {
              offer(Ppk(sc, rest, xa, xb, factor));
              continue;
            }
            for (size_t j = 0; j <= sc.k(); ++j) {
              if (!sc.Possible(xa, j)) continue;
              report.bhat = PrefixValue(sc.k(), j, sc.positive());
              report.bhat_label = zeta.Label(*report.bhat);
              offer(Apk(sc, rest, xa, xb, j, factor));
            }
          }
        }
      }
    }
  }
  return curve;
}

#define PKDP_INSTANTIATE_FASTPATH(Real)                                       \
  template Real BinomPmf<Real>(uint64_t, uint64_t, const Real&);              \
  template Real BinomTailAtLeast<Real>(uint64_t, uint64_t, const Real&);      \
  template std::vector<Real> ConditionedOutputsFast<Real>(                    \
      const ExchangeableScenario&, int, size_t);                              \
  template Real ApkTermFast<Real>(const ExchangeableScenario&, int, int,      \
                                  size_t, double);                            \
  template std::vector<Real> IntegrandFast<Real>(const ExchangeableScenario&, \
                                                 int, int, size_t, double);   \
  template std::vector<std::vector<Real>> IntegrandTableFast<Real>(          \
      const ExchangeableScenario&, int, int, double);                         \
  template Real PpkTermFast<Real>(const ExchangeableScenario&, int, int,      \
                                  double);

PKDP_INSTANTIATE_FASTPATH(double)
PKDP_INSTANTIATE_FASTPATH(HighPrecision)

#undef PKDP_INSTANTIATE_FASTPATH

}  // namespace pkdp
