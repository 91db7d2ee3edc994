// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "submodinfo/marginal.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "submodinfo/error.h"

namespace submodinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Derived>
class StateBase : public MarginalState {
 public:
  StateBase(const Measure& m, const Instance& in) : MarginalState(m, in) {}
  std::unique_ptr<MarginalState> Clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

bool UsesQuery(MeasureMode mode) {
  return mode == MeasureMode::kSmi || mode == MeasureMode::kCsmi;
}
bool UsesConditioning(MeasureMode mode) {
  return mode == MeasureMode::kCg || mode == MeasureMode::kCsmi;
}

std::span<const int> QueryOf(const Measure& m) {
  return UsesQuery(m.mode) ? std::span<const int>(m.query) : std::span<const int>();
}
std::span<const int> ConditioningOf(const Measure& m) {
  return UsesConditioning(m.mode) ? std::span<const int>(m.conditioning)
                                  : std::span<const int>();
}

class ScratchState : public StateBase<ScratchState> {
 public:
  ScratchState(const Measure& m, const Instance& in) : StateBase(m, in) {}

 protected:
  double DoGain(int j) const override {
    ItemSet next = selected();
    next.push_back(j);
    try {
      return Evaluate(measure(), next, instance()) - Value();
    } catch (const NumericError&) {
      if (measure().spec.family == Family::kLogDet) return -kInf;
      throw;
    }
  }
  void DoAdd(int) override {}
};

// Set cover: a concept counts when covered by A, eligible under the mode and
// not yet covered.
class SetCoverState : public StateBase<SetCoverState> {
 public:
  SetCoverState(const Measure& m, const Instance& in) : StateBase(m, in) {
    const std::size_t c = in.concept_weights.size();
    eligible_.assign(c, 1);
    covered_.assign(c, 0);
    if (UsesQuery(m.mode)) {
      std::vector<char> hit(c, 0);
      for (int e : QueryOf(m)) {
        for (const auto& [k, v] : in.concept_counts[e]) hit[k] = hit[k] || v > 0.0;
      }
      for (std::size_t k = 0; k < c; ++k) eligible_[k] = eligible_[k] && hit[k];
    }
    for (int e : ConditioningOf(m)) {
      for (const auto& [k, v] : in.concept_counts[e]) {
        if (v > 0.0) eligible_[k] = 0;
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    double g = 0.0;
    for (const auto& [k, v] : instance().concept_counts[j]) {
      if (v > 0.0 && eligible_[k] && !covered_[k]) g += instance().concept_weights[k];
    }
    return g;
  }
  void DoAdd(int j) override {
    for (const auto& [k, v] : instance().concept_counts[j]) {
      if (v > 0.0) covered_[k] = 1;
    }
  }

 private:
  std::vector<char> eligible_;
  std::vector<char> covered_;
};

// Probabilistic set cover: value = sum_c factor_c w_c (1 - miss_c(A)).
class ProbSetCoverState : public StateBase<ProbSetCoverState> {
 public:
  ProbSetCoverState(const Measure& m, const Instance& in) : StateBase(m, in) {
    const std::size_t c = in.concept_weights.size();
    factor_ = in.concept_weights;
    miss_.assign(c, 1.0);
    if (UsesQuery(m.mode)) {
      std::vector<double> mq(c, 1.0);
      for (int e : QueryOf(m)) {
        for (const auto& [k, p] : in.coverage[e]) mq[k] *= 1.0 - p;
      }
      for (std::size_t k = 0; k < c; ++k) factor_[k] *= 1.0 - mq[k];
    }
    std::vector<double> mp(c, 1.0);
    for (int e : ConditioningOf(m)) {
      for (const auto& [k, p] : in.coverage[e]) mp[k] *= 1.0 - p;
    }
    for (std::size_t k = 0; k < c; ++k) factor_[k] *= mp[k];
  }

 protected:
  double DoGain(int j) const override {
    double g = 0.0;
    for (const auto& [k, p] : instance().coverage[j]) g += factor_[k] * miss_[k] * p;
    return g;
  }
  void DoAdd(int j) override {
    for (const auto& [k, p] : instance().coverage[j]) miss_[k] *= 1.0 - p;
  }

 private:
  std::vector<double> factor_;
  std::vector<double> miss_;
};

// Graph cut: modular part per candidate plus running row sums over A.
class GraphCutState : public StateBase<GraphCutState> {
 public:
  GraphCutState(const Measure& m, const Instance& in)
      : StateBase(m, in), view_(MakeFamilyView(m.spec, in, {}, ConditioningOf(m))) {
    const int g = in.ground_size;
    const double lambda = m.spec.lambda;
    modular_.assign(g, 0.0);
    row_.assign(g, 0.0);
    for (int j = 0; j < g; ++j) {
      if (m.mode == MeasureMode::kSmi) {
        double s = 0.0;
        for (int q : m.query) s += view_(j, q);
        modular_[j] = 2.0 * lambda * s;
        continue;
      }
      double cover = 0.0;
      for (int i = 0; i < g; ++i) cover += view_(i, j);
      modular_[j] = cover - lambda * view_(j, j);
      if (m.mode == MeasureMode::kCg) {
        double s = 0.0;
        for (int p : m.conditioning) s += view_(j, p);
        modular_[j] -= 2.0 * lambda * s;
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    if (measure().mode == MeasureMode::kSmi) return modular_[j];
    return modular_[j] - 2.0 * measure().spec.lambda * row_[j];
  }
  void DoAdd(int j) override {
    for (int i = 0; i < instance().ground_size; ++i) row_[i] += view_(i, j);
  }

 private:
  KernelView view_;
  std::vector<double> modular_;
  std::vector<double> row_;
};

// Facility location (U = V): value = sum_i h_i(a_i) with a_i the running max.
class FacilityLocationState : public StateBase<FacilityLocationState> {
 public:
  FacilityLocationState(const Measure& m, const Instance& in)
      : StateBase(m, in), view_(MakeFamilyView(m.spec, in, QueryOf(m), ConditioningOf(m))) {
    const int g = in.ground_size;
    best_.assign(g, 0.0);
    cap_.assign(g, kInf);
    floor_.assign(g, 0.0);
    for (int i = 0; i < g; ++i) {
      if (UsesQuery(m.mode)) {
        double q = 0.0;
        for (int j : m.query) q = std::max(q, view_(i, j));
        cap_[i] = q;
      }
      if (UsesConditioning(m.mode)) {
        double p = 0.0;
        for (int j : m.conditioning) p = std::max(p, view_(i, j));
        floor_[i] = p;
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    double g = 0.0;
    for (int i = 0; i < instance().ground_size; ++i) {
      const double s = view_(i, j);
      if (s <= best_[i]) continue;
      g += H(i, s) - H(i, best_[i]);
    }
    return g;
  }
  void DoAdd(int j) override {
    for (int i = 0; i < instance().ground_size; ++i) best_[i] = std::max(best_[i], view_(i, j));
  }

 private:
  double H(int i, double a) const { return std::max(std::min(a, cap_[i]) - floor_[i], 0.0); }

  KernelView view_;
  std::vector<double> best_;
  std::vector<double> cap_;
  std::vector<double> floor_;
};

// Facility location over auxiliary rows (FL2 and its base function).
class AuxRowsState : public StateBase<AuxRowsState> {
 public:
  AuxRowsState(const Measure& m, const Instance& in) : StateBase(m, in) {
    const int g = in.ground_size;
    if (m.mode == MeasureMode::kSmi) {
      rows_ = m.query;
    } else {
      for (int i = g; i < in.size(); ++i) rows_.push_back(i);
    }
    best_.assign(rows_.size(), 0.0);
    modular_.assign(g, m.spec.eta);
    if (m.mode == MeasureMode::kSmi) {
      for (int j = 0; j < g; ++j) {
        double mq = 0.0;
        for (int q : m.query) mq = std::max(mq, in.nonnegative(j, q));
        modular_[j] = m.spec.eta * mq;
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    double g = modular_[j];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      g += std::max(instance().nonnegative(rows_[r], j) - best_[r], 0.0);
    }
    return g;
  }
  void DoAdd(int j) override {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      best_[r] = std::max(best_[r], instance().nonnegative(rows_[r], j));
    }
  }

 private:
  ItemSet rows_;
  std::vector<double> best_;
  std::vector<double> modular_;
};

// Concave over modular: value = modular(A) + delta2 sum_r psi(col_r(A)).
class ConcaveState : public StateBase<ConcaveState> {
 public:
  ConcaveState(const Measure& m, const Instance& in) : StateBase(m, in) {
    const int g = in.ground_size;
    const double coef = m.spec.eta * m.spec.com_weights[0];
    if (m.mode == MeasureMode::kSmi) {
      rows_ = m.query;
    } else {
      for (int i = g; i < in.size(); ++i) rows_.push_back(i);
    }
    col_.assign(rows_.size(), 0.0);
    modular_.assign(g, 0.0);
    const double c = std::max({1, in.ground_size, in.aux_size()});
    for (int j = 0; j < g; ++j) {
      if (m.mode == MeasureMode::kSmi) {
        double t = 0.0;
        for (int q : m.query) t += in.nonnegative(j, q);
        modular_[j] = coef * ApplyPsi(m.spec.psi, t);
      } else {
        modular_[j] = coef * ApplyPsi(m.spec.psi, c);
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    const Psi psi = measure().spec.psi;
    double g = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const double s = instance().nonnegative(rows_[r], j);
      g += ApplyPsi(psi, col_[r] + s) - ApplyPsi(psi, col_[r]);
    }
    return modular_[j] + measure().spec.com_weights[1] * g;
  }
  void DoAdd(int j) override {
    for (std::size_t r = 0; r < rows_.size(); ++r) col_[r] += instance().nonnegative(rows_[r], j);
  }

 private:
  ItemSet rows_;
  std::vector<double> col_;
  std::vector<double> modular_;
};

// ROUGE: running concept counts of A, capped by the query counts.
class RougeState : public StateBase<RougeState> {
 public:
  RougeState(const Measure& m, const Instance& in) : StateBase(m, in) {
    const std::size_t c = in.concept_weights.size();
    counts_.assign(c, 0.0);
    cap_.assign(c, m.mode == MeasureMode::kSmi ? 0.0 : kInf);
    if (m.mode == MeasureMode::kSmi) {
      for (int e : m.query) {
        for (const auto& [k, v] : in.concept_counts[e]) cap_[k] += v;
      }
    }
  }

 protected:
  double DoGain(int j) const override {
    double g = 0.0;
    for (const auto& [k, v] : instance().concept_counts[j]) {
      g += instance().concept_weights[k] *
           (std::min(counts_[k] + v, cap_[k]) - std::min(counts_[k], cap_[k]));
    }
    return g;
  }
  void DoAdd(int j) override {
    for (const auto& [k, v] : instance().concept_counts[j]) counts_[k] += v;
  }

 private:
  std::vector<double> counts_;
  std::vector<double> cap_;
};

class DisparitySumState : public StateBase<DisparitySumState> {
 public:
  DisparitySumState(const Measure& m, const Instance& in)
      : StateBase(m, in), distance_(in.ground_size, 0.0) {}

 protected:
  double DoGain(int j) const override { return distance_[j]; }
  void DoAdd(int j) override {
    for (int i = 0; i < instance().ground_size; ++i) {
      distance_[i] += 1.0 - instance().similarity(i, j);
    }
  }

 private:
  std::vector<double> distance_;
};

// Log-det: a measure is a signed sum of chains; chain(B) tracks
// log det L_{B u A}. For each candidate j the chain keeps the partial
// Cholesky row of j and the Schur residual d_j, so the chain's gain is
// log d_j.
class LogDetState : public StateBase<LogDetState> {
 public:
  LogDetState(const Measure& m, const Instance& in)
      : StateBase(m, in), view_(MakeFamilyView(m.spec, in, QueryOf(m), ConditioningOf(m))) {
    const ItemSet empty;
    ItemSet qp = m.query;
    qp.insert(qp.end(), m.conditioning.begin(), m.conditioning.end());
    switch (m.mode) {
      case MeasureMode::kBase:
        AddChain(1.0, empty);
        break;
      case MeasureMode::kSmi:
        AddChain(1.0, empty);
        AddChain(-1.0, m.query);
        break;
      case MeasureMode::kCg:
        AddChain(1.0, m.conditioning);
        break;
      case MeasureMode::kCsmi:
        AddChain(1.0, m.conditioning);
        AddChain(-1.0, qp);
        break;
    }
  }

 protected:
  double DoGain(int j) const override {
    double g = 0.0;
    for (const Chain& chain : chains_) {
      const double d = chain.residual[j];
      if (!(d > 0.0)) return -kInf;
      g += chain.coef * std::log(d);
    }
    return g;
  }
  void DoAdd(int j) override {
    for (Chain& chain : chains_) Extend(chain, j);
  }

 private:
  struct Chain {
    double coef = 1.0;
    ItemSet members;
    // rows[e] holds L^-1 l_e over the current members, for every element.
    std::vector<std::vector<double>> rows;
    std::vector<double> residual;
  };

  void AddChain(double coef, const ItemSet& base) {
    Chain chain;
    chain.coef = coef;
    const int n = instance().size();
    chain.rows.assign(n, {});
    chain.residual.resize(n);
    for (int e = 0; e < n; ++e) chain.residual[e] = view_(e, e) + instance().jitter;
    for (int b : base) {
      if (!(chain.residual[b] > 0.0)) {
        throw NumericError("log-det conditioning block is singular; raise the jitter");
      }
      Extend(chain, b);
    }
    chains_.push_back(std::move(chain));
  }

  void Extend(Chain& chain, int x) const {
    const double dx = chain.residual[x];
    if (!(dx > 0.0)) throw NumericError("log-det extension is not positive definite");
    const double root = std::sqrt(dx);
    const std::vector<double> ex = chain.rows[x];
    const int n = instance().size();
    for (int e = 0; e < n; ++e) {
      if (e == x) continue;
      double dot = 0.0;
      for (std::size_t t = 0; t < ex.size(); ++t) dot += ex[t] * chain.rows[e][t];
      const double v = (view_(x, e) - dot) / root;
      chain.rows[e].push_back(v);
      chain.residual[e] -= v * v;
    }
    chain.rows[x].push_back(root);
    chain.residual[x] = 0.0;
    chain.members.push_back(x);
  }

  KernelView view_;
  std::vector<Chain> chains_;
};

}  // namespace

MarginalState::MarginalState(const Measure& measure, const Instance& instance)
    : measure_(measure),
      instance_(&instance),
      in_set_(instance.size(), 0),
      blocked_(instance.size(), 0) {
  for (int e : ConditioningOf(measure)) {
    if (e >= 0 && e < instance.size()) blocked_[e] = 1;
  }
}

void MarginalState::CheckCandidate(int j) const {
  if (j < 0 || j >= instance_->ground_size) {
    throw ConfigError("candidate is not a ground-set element");
  }
  if (in_set_[j]) throw ConfigError("candidate is already selected");
  if (blocked_[j]) throw ConfigError("candidate belongs to the conditioning set");
}

double MarginalState::Gain(int j) const {
  CheckCandidate(j);
  return DoGain(j);
}

double MarginalState::Add(int j) {
  const double gain = Gain(j);
  if (!std::isfinite(gain)) throw NumericError("selected element has a non-finite gain");
  DoAdd(j);
  selected_.push_back(j);
  in_set_[j] = 1;
  value_ += gain;
  return gain;
}

std::unique_ptr<MarginalState> MakeScratchState(const Measure& measure,
                                                const Instance& instance) {
  Evaluate(measure, {}, instance);
  return std::make_unique<ScratchState>(measure, instance);
}

std::unique_ptr<MarginalState> MakeMarginalState(const Measure& measure,
                                                 const Instance& instance) {
  // Validates sets, parameters and support; every measure is 0 at the empty set.
  Evaluate(measure, {}, instance);
  const MeasureMode mode = measure.mode;
  switch (measure.spec.family) {
    case Family::kSetCover:
      return std::make_unique<SetCoverState>(measure, instance);
    case Family::kProbSetCover:
      return std::make_unique<ProbSetCoverState>(measure, instance);
    case Family::kGraphCut:
      return std::make_unique<GraphCutState>(measure, instance);
    case Family::kFacilityLocation1:
      return std::make_unique<FacilityLocationState>(measure, instance);
    case Family::kFacilityLocation2:
      return std::make_unique<AuxRowsState>(measure, instance);
    case Family::kLogDet:
      return std::make_unique<LogDetState>(measure, instance);
    case Family::kConcaveOverModular:
      return std::make_unique<ConcaveState>(measure, instance);
    case Family::kRouge:
      return std::make_unique<RougeState>(measure, instance);
    case Family::kDisparitySum:
      if (mode == MeasureMode::kBase) return std::make_unique<DisparitySumState>(measure, instance);
      break;
    default:
      break;
  }
  return std::make_unique<ScratchState>(measure, instance);
}

}  // namespace submodinfo
