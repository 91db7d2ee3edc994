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

#include "submodinfo/functions.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "submodinfo/error.h"

namespace submodinfo {

namespace {

bool Contains(std::span<const int> set, int e) {
  return std::find(set.begin(), set.end(), e) != set.end();
}

ItemSet Union(std::span<const int> a, std::span<const int> b) {
  ItemSet out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

ItemSet Union(std::span<const int> a, std::span<const int> b, std::span<const int> c) {
  ItemSet out = Union(a, b);
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

void CheckElements(const Instance& instance, std::span<const int> set, const char* name) {
  std::vector<char> seen(instance.size(), 0);
  for (int e : set) {
    if (e < 0 || e >= instance.size()) {
      throw ConfigError(std::string(name) + " contains an element outside Omega");
    }
    if (seen[e]) throw ConfigError(std::string(name) + " contains a duplicate element");
    seen[e] = 1;
  }
}

void CheckDisjoint(std::span<const int> x, std::span<const int> y, const char* what) {
  for (int e : x) {
    if (Contains(y, e)) throw ConfigError(std::string(what) + " must be disjoint");
  }
}

void CheckMeasureSets(const Instance& instance, std::span<const int> a, std::span<const int> q,
                      std::span<const int> p) {
  CheckElements(instance, a, "A");
  CheckElements(instance, q, "Q");
  CheckElements(instance, p, "P");
  for (int e : a) {
    if (!instance.InGround(e)) throw ConfigError("A must be a subset of the ground set V");
  }
  CheckDisjoint(a, q, "A and Q");
  CheckDisjoint(a, p, "A and P");
  CheckDisjoint(q, p, "Q and P");
}

void RequireConcepts(const Instance& instance, Family family) {
  if (!instance.has_concepts()) {
    throw ConfigError(std::string(FamilyName(family)) + " requires concept data");
  }
}

void RequireAuxiliary(const Instance& instance, std::span<const int> q, Family family) {
  for (int e : q) {
    if (instance.InGround(e)) {
      throw ConfigError(std::string(FamilyName(family)) +
                        " requires query elements from the auxiliary set");
    }
  }
}

// Weighted concept counts summed over a set, per concept.
std::vector<double> Counts(const Instance& instance, std::span<const int> set) {
  std::vector<double> c(instance.concept_weights.size(), 0.0);
  for (int e : set) {
    for (const auto& [k, v] : instance.concept_counts[e]) c[k] += v;
  }
  return c;
}

std::vector<char> Covered(const Instance& instance, std::span<const int> set) {
  std::vector<char> covered(instance.concept_weights.size(), 0);
  for (int e : set) {
    for (const auto& [k, v] : instance.concept_counts[e]) {
      if (v > 0.0) covered[k] = 1;
    }
  }
  return covered;
}

// P_i(X): probability that no element of X covers concept i.
std::vector<double> Miss(const Instance& instance, std::span<const int> set) {
  std::vector<double> miss(instance.concept_weights.size(), 1.0);
  for (int e : set) {
    for (const auto& [k, p] : instance.coverage[e]) miss[k] *= 1.0 - p;
  }
  return miss;
}

// max(0, max_{j in set} view(i, j)).
double MaxSim(const KernelView& view, int i, std::span<const int> set) {
  double m = 0.0;
  for (int j : set) m = std::max(m, view(i, j));
  return m;
}

double PairSum(const KernelView& view, std::span<const int> x, std::span<const int> y) {
  double s = 0.0;
  for (int i : x) {
    for (int j : y) s += view(i, j);
  }
  return s;
}

double LogDetOf(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericError("log-det kernel block is not positive definite; raise the jitter");
  }
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

Eigen::MatrixXd Jittered(const KernelView& view, std::span<const int> x, double jitter) {
  Eigen::MatrixXd m = view.Block(x, x);
  m.diagonal().array() += jitter;
  return m;
}

double LogDetBase(const KernelView& view, std::span<const int> s, double jitter) {
  return LogDetOf(Jittered(view, s, jitter));
}

// tr(L_X^-1 dL_X) where dL_X holds the raw similarities the parameter scales.
double LogDetDerivative(const KernelView& view, std::span<const int> x, double jitter,
                        std::span<const int> scaled) {
  if (x.empty() || scaled.empty()) return 0.0;
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd d(n, n);
  bool any = false;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      d(r, c) = view.CrossDerivative(x[r], x[c], scaled);
      any = any || d(r, c) != 0.0;
    }
  }
  if (!any) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(Jittered(view, x, jitter));
  if (llt.info() != Eigen::Success) {
    throw NumericError("log-det kernel block is not positive definite; raise the jitter");
  }
  return llt.solve(d).trace();
}

void CheckUnitCross(const Instance& instance, Family family) {
  const int g = instance.ground_size;
  const int n = instance.size();
  for (int i = 0; i < g; ++i) {
    for (int j = g; j < n; ++j) {
      const double s = instance.nonnegative(i, j);
      if (s < 0.0 || s > 1.0 + 1e-12) {
        throw ConfigError(std::string(FamilyName(family)) +
                          " requires cross similarities in [0,1]");
      }
    }
  }
}

double ComScale(const Instance& instance) {
  return std::max({1, instance.ground_size, instance.aux_size()});
}

}  // namespace

// KernelView ----------------------------------------------------------------

KernelView::KernelView(const Eigen::MatrixXd& matrix, int ground_size, bool cross_only)
    : matrix_(&matrix),
      ground_size_(ground_size),
      cross_only_(cross_only),
      scale_(matrix.rows(), 1.0) {}

void KernelView::ScaleCross(std::span<const int> elements, double factor) {
  for (int e : elements) {
    if (e >= ground_size_) scale_[e] *= factor;
  }
}

double KernelView::CrossDerivative(int i, int j, std::span<const int> elements) const {
  const bool gi = i < ground_size_;
  const bool gj = j < ground_size_;
  if (gi == gj) return 0.0;
  const int aux = gi ? j : i;
  return Contains(elements, aux) ? (*matrix_)(i, j) : 0.0;
}

Eigen::MatrixXd KernelView::Block(std::span<const int> rows, std::span<const int> cols) const {
  Eigen::MatrixXd m(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = (*this)(rows[r], cols[c]);
  }
  return m;
}

KernelView MakeFamilyView(const FunctionSpec& spec, const Instance& instance,
                          std::span<const int> query, std::span<const int> conditioning) {
  switch (spec.family) {
    case Family::kGraphCut: {
      KernelView view(instance.similarity, instance.ground_size);
      view.ScaleCross(conditioning, spec.nu);
      return view;
    }
    case Family::kFacilityLocation1: {
      KernelView view(instance.nonnegative, instance.ground_size);
      view.ScaleCross(query, spec.eta);
      view.ScaleCross(conditioning, spec.nu);
      return view;
    }
    case Family::kLogDet: {
      KernelView view(instance.similarity, instance.ground_size);
      view.ScaleCross(query, spec.eta);
      view.ScaleCross(conditioning, spec.nu);
      return view;
    }
    case Family::kFacilityLocation2:
    case Family::kConcaveOverModular:
      return KernelView(instance.nonnegative, instance.ground_size, /*cross_only=*/true);
    default:
      return KernelView(instance.similarity, instance.ground_size);
  }
}

// BaseFunction --------------------------------------------------------------

BaseFunction::BaseFunction(const FunctionSpec& spec, const Instance& instance,
                           std::span<const int> query, std::span<const int> conditioning)
    : spec_(spec),
      instance_(&instance),
      view_(MakeFamilyView(spec, instance, query, conditioning)) {
  ValidateSpec(spec);
  switch (spec.family) {
    case Family::kSetCover:
    case Family::kProbSetCover:
    case Family::kRouge:
      RequireConcepts(instance, spec.family);
      break;
    case Family::kFacilityLocation2:
    case Family::kConcaveOverModular:
      CheckUnitCross(instance, spec.family);
      break;
    default:
      break;
  }
}

double BaseFunction::operator()(std::span<const int> s) const {
  const Instance& in = *instance_;
  if (s.empty()) return 0.0;
  const int g = in.ground_size;
  const int n = in.size();
  switch (spec_.family) {
    case Family::kSetCover: {
      const auto covered = Covered(in, s);
      double f = 0.0;
      for (std::size_t k = 0; k < covered.size(); ++k) {
        if (covered[k]) f += in.concept_weights[k];
      }
      return f;
    }
    case Family::kProbSetCover: {
      const auto miss = Miss(in, s);
      double f = 0.0;
      for (std::size_t k = 0; k < miss.size(); ++k) f += in.concept_weights[k] * (1.0 - miss[k]);
      return f;
    }
    case Family::kGraphCut: {
      double cover = 0.0;
      for (int i = 0; i < g; ++i) {
        for (int j : s) cover += view_(i, j);
      }
      return cover - spec_.lambda * PairSum(view_, s, s);
    }
    case Family::kFacilityLocation1: {
      double f = 0.0;
      for (int i = 0; i < g; ++i) f += MaxSim(view_, i, s);
      return f;
    }
    case Family::kFacilityLocation2: {
      double f = 0.0;
      for (int i = 0; i < n; ++i) f += (i < g ? spec_.eta : 1.0) * MaxSim(view_, i, s);
      return f;
    }
    case Family::kLogDet:
      return LogDetBase(view_, s, in.jitter);
    case Family::kConcaveOverModular: {
      const double c = ComScale(in);
      double data_rows = 0.0, aux_rows = 0.0;
      for (int i = 0; i < n; ++i) {
        double same = 0.0, other = 0.0;
        for (int j : s) {
          if ((j < g) == (i < g)) {
            same += view_(i, j);
          } else {
            other += view_(i, j);
          }
        }
        const double v = std::max(ApplyPsi(spec_.psi, other), ApplyPsi(spec_.psi, c * same));
        (i < g ? data_rows : aux_rows) += v;
      }
      return spec_.eta * spec_.com_weights[0] * data_rows + spec_.com_weights[1] * aux_rows;
    }
    case Family::kRouge: {
      std::vector<int> in_v, in_aux;
      for (int e : s) (e < g ? in_v : in_aux).push_back(e);
      const auto cv = Counts(in, in_v);
      const auto ca = Counts(in, in_aux);
      double f = 0.0;
      for (std::size_t k = 0; k < cv.size(); ++k) {
        f += in.concept_weights[k] * std::max(cv[k], ca[k]);
      }
      return f;
    }
    case Family::kDisparitySum: {
      double f = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) f += 1.0 - in.similarity(s[a], s[b]);
      }
      return f;
    }
    case Family::kDisparityMin: {
      if (s.size() < 2) return 0.0;
      double f = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) {
          f = std::min(f, 1.0 - in.similarity(s[a], s[b]));
        }
      }
      return f;
    }
  }
  return 0.0;
}

double EvalBase(const FunctionSpec& spec, std::span<const int> s, const Instance& instance) {
  CheckElements(instance, s, "S");
  return BaseFunction(spec, instance)(s);
}

// Support tables --------------------------------------------------------------

bool IsSupported(Family family, MeasureMode mode) {
  if (mode == MeasureMode::kBase) return true;
  switch (family) {
    case Family::kSetCover:
    case Family::kProbSetCover:
    case Family::kFacilityLocation1:
    case Family::kLogDet:
      return true;
    case Family::kGraphCut:
      return mode != MeasureMode::kCsmi;
    case Family::kFacilityLocation2:
    case Family::kConcaveOverModular:
    case Family::kRouge:
      return mode == MeasureMode::kSmi;
    case Family::kDisparitySum:
    case Family::kDisparityMin:
      return false;
  }
  return false;
}

void CheckSupported(Family family, MeasureMode mode) {
  if (IsSupported(family, mode)) return;
  if (family == Family::kGraphCut && mode == MeasureMode::kCsmi) {
    throw UnsupportedError("graph cut has no meaningful conditional mutual information");
  }
  throw UnsupportedError(std::string(FamilyName(family)) + " does not support mode " +
                         ModeName(mode));
}

bool IsMonotoneSubmodular(Family family, MeasureMode mode) {
  if (!IsSupported(family, mode)) return false;
  switch (mode) {
    case MeasureMode::kSmi:
      return true;
    case MeasureMode::kBase:
      return family == Family::kSetCover || family == Family::kProbSetCover ||
             family == Family::kFacilityLocation1 || family == Family::kFacilityLocation2 ||
             family == Family::kConcaveOverModular || family == Family::kRouge;
    case MeasureMode::kCg:
      return family == Family::kSetCover || family == Family::kProbSetCover ||
             family == Family::kFacilityLocation1;
    case MeasureMode::kCsmi:
      return family == Family::kSetCover || family == Family::kProbSetCover;
  }
  return false;
}

ParameterFlags LearnableParameters(Family family, MeasureMode mode) {
  ParameterFlags flags;
  if (!IsSupported(family, mode)) return flags;
  const bool smi = mode == MeasureMode::kSmi;
  const bool cg = mode == MeasureMode::kCg;
  const bool csmi = mode == MeasureMode::kCsmi;
  switch (family) {
    case Family::kGraphCut:
      flags.lambda = true;
      flags.nu = cg;
      break;
    case Family::kFacilityLocation1:
    case Family::kLogDet:
      flags.eta = smi || csmi;
      flags.nu = cg || csmi;
      break;
    case Family::kFacilityLocation2:
    case Family::kConcaveOverModular:
      flags.eta = smi;
      break;
    default:
      break;
  }
  return flags;
}

// Closed forms ------------------------------------------------------------------

double ConditionalLogDet(const KernelView& view, double jitter, std::span<const int> x,
                         std::span<const int> y) {
  if (x.empty()) return 0.0;
  Eigen::MatrixXd lx = Jittered(view, x, jitter);
  if (y.empty()) return LogDetOf(lx);
  Eigen::LLT<Eigen::MatrixXd> lly(Jittered(view, y, jitter));
  if (lly.info() != Eigen::Success) {
    throw NumericError("conditioning block is singular; raise the jitter");
  }
  const Eigen::MatrixXd lyx = view.Block(y, x);
  Eigen::MatrixXd schur = lx - lyx.transpose() * lly.solve(lyx);
  schur = 0.5 * (schur + schur.transpose());
  return LogDetOf(schur);
}

double Smi(const FunctionSpec& spec, std::span<const int> a, std::span<const int> q,
           const Instance& instance) {
  return Csmi(spec, a, q, {}, instance);
}

double Cg(const FunctionSpec& spec, std::span<const int> a, std::span<const int> p,
          const Instance& instance) {
  CheckMeasureSets(instance, a, {}, p);
  CheckSupported(spec.family, MeasureMode::kCg);
  ValidateSpec(spec);
  const int g = instance.ground_size;
  switch (spec.family) {
    case Family::kSetCover: {
      RequireConcepts(instance, spec.family);
      const auto ca = Covered(instance, a);
      const auto cp = Covered(instance, p);
      double f = 0.0;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        if (ca[k] && !cp[k]) f += instance.concept_weights[k];
      }
      return f;
    }
    case Family::kProbSetCover: {
      RequireConcepts(instance, spec.family);
      const auto ma = Miss(instance, a);
      const auto mp = Miss(instance, p);
      double f = 0.0;
      for (std::size_t k = 0; k < ma.size(); ++k) {
        f += instance.concept_weights[k] * (1.0 - ma[k]) * mp[k];
      }
      return f;
    }
    case Family::kGraphCut: {
      const KernelView view = MakeFamilyView(spec, instance, {}, p);
      double cover = 0.0;
      for (int i = 0; i < g; ++i) {
        for (int j : a) cover += view(i, j);
      }
      return cover - spec.lambda * PairSum(view, a, a) - 2.0 * spec.lambda * PairSum(view, a, p);
    }
    case Family::kFacilityLocation1: {
      const KernelView view = MakeFamilyView(spec, instance, {}, p);
      double f = 0.0;
      for (int i = 0; i < g; ++i) {
        f += std::max(MaxSim(view, i, a) - MaxSim(view, i, p), 0.0);
      }
      return f;
    }
    case Family::kLogDet: {
      const KernelView view = MakeFamilyView(spec, instance, {}, p);
      return ConditionalLogDet(view, instance.jitter, a, p);
    }
    default:
      break;
  }
  throw UnsupportedError("no conditional gain closed form");
}

double Csmi(const FunctionSpec& spec, std::span<const int> a, std::span<const int> q,
            std::span<const int> p, const Instance& instance) {
  CheckMeasureSets(instance, a, q, p);
  const MeasureMode mode = p.empty() ? MeasureMode::kSmi : MeasureMode::kCsmi;
  CheckSupported(spec.family, mode);
  ValidateSpec(spec);
  const int g = instance.ground_size;
  switch (spec.family) {
    case Family::kSetCover: {
      RequireConcepts(instance, spec.family);
      const auto ca = Covered(instance, a);
      const auto cq = Covered(instance, q);
      const auto cp = Covered(instance, p);
      double f = 0.0;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        if (ca[k] && cq[k] && !cp[k]) f += instance.concept_weights[k];
      }
      return f;
    }
    case Family::kProbSetCover: {
      RequireConcepts(instance, spec.family);
      const auto ma = Miss(instance, a);
      const auto mq = Miss(instance, q);
      const auto mp = Miss(instance, p);
      double f = 0.0;
      for (std::size_t k = 0; k < ma.size(); ++k) {
        f += instance.concept_weights[k] * (1.0 - ma[k]) * (1.0 - mq[k]) * mp[k];
      }
      return f;
    }
    case Family::kGraphCut: {
      const KernelView view = MakeFamilyView(spec, instance, q, {});
      return 2.0 * spec.lambda * PairSum(view, a, q);
    }
    case Family::kFacilityLocation1: {
      const KernelView view = MakeFamilyView(spec, instance, q, p);
      double f = 0.0;
      for (int i = 0; i < g; ++i) {
        const double shared = std::min(MaxSim(view, i, a), MaxSim(view, i, q));
        f += std::max(shared - MaxSim(view, i, p), 0.0);
      }
      return f;
    }
    case Family::kFacilityLocation2: {
      RequireAuxiliary(instance, q, spec.family);
      CheckUnitCross(instance, spec.family);
      const Eigen::MatrixXd& s = instance.nonnegative;
      double query_side = 0.0, summary_side = 0.0;
      for (int i : q) {
        double m = 0.0;
        for (int j : a) m = std::max(m, s(i, j));
        query_side += m;
      }
      for (int i : a) {
        double m = 0.0;
        for (int j : q) m = std::max(m, s(i, j));
        summary_side += m;
      }
      return query_side + spec.eta * summary_side;
    }
    case Family::kLogDet: {
      const KernelView view = MakeFamilyView(spec, instance, q, p);
      const double jitter = instance.jitter;
      if (p.empty()) {
        return ConditionalLogDet(view, jitter, a, {}) - ConditionalLogDet(view, jitter, a, q);
      }
      const ItemSet ap = Union(a, p);
      const double with_p = ConditionalLogDet(view, jitter, p, q) - LogDetBase(view, p, jitter);
      const double with_ap =
          ConditionalLogDet(view, jitter, ap, q) - LogDetBase(view, ap, jitter);
      return with_p - with_ap;
    }
    case Family::kConcaveOverModular: {
      RequireAuxiliary(instance, q, spec.family);
      CheckUnitCross(instance, spec.family);
      const Eigen::MatrixXd& s = instance.nonnegative;
      double summary_side = 0.0, query_side = 0.0;
      for (int i : a) {
        double t = 0.0;
        for (int j : q) t += s(i, j);
        summary_side += ApplyPsi(spec.psi, t);
      }
      for (int j : q) {
        double t = 0.0;
        for (int i : a) t += s(i, j);
        query_side += ApplyPsi(spec.psi, t);
      }
      return spec.eta * spec.com_weights[0] * summary_side + spec.com_weights[1] * query_side;
    }
    case Family::kRouge: {
      RequireConcepts(instance, spec.family);
      const auto ca = Counts(instance, a);
      const auto cq = Counts(instance, q);
      double f = 0.0;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        f += instance.concept_weights[k] * std::min(ca[k], cq[k]);
      }
      return f;
    }
    default:
      break;
  }
  throw UnsupportedError("no mutual information closed form");
}

double Evaluate(const Measure& measure, std::span<const int> a, const Instance& instance) {
  switch (measure.mode) {
    case MeasureMode::kBase:
      CheckMeasureSets(instance, a, {}, {});
      return BaseFunction(measure.spec, instance)(a);
    case MeasureMode::kSmi:
      return Smi(measure.spec, a, measure.query, instance);
    case MeasureMode::kCg:
      return Cg(measure.spec, a, measure.conditioning, instance);
    case MeasureMode::kCsmi:
      if (measure.conditioning.empty()) CheckSupported(measure.spec.family, MeasureMode::kCsmi);
      return Csmi(measure.spec, a, measure.query, measure.conditioning, instance);
  }
  return 0.0;
}

double DefinitionalOracle(const FunctionSpec& spec, MeasureMode mode, std::span<const int> a,
                          std::span<const int> q, std::span<const int> p,
                          const Instance& instance) {
  CheckElements(instance, a, "A");
  CheckElements(instance, q, "Q");
  CheckElements(instance, p, "P");
  CheckDisjoint(a, q, "A and Q");
  CheckDisjoint(a, p, "A and P");
  CheckDisjoint(q, p, "Q and P");
  const BaseFunction f(spec, instance, q, p);
  switch (mode) {
    case MeasureMode::kBase:
      return f(a);
    case MeasureMode::kSmi:
      return f(a) + f(q) - f(Union(a, q));
    case MeasureMode::kCg:
      return f(Union(a, p)) - f(p);
    case MeasureMode::kCsmi:
      return f(Union(a, p)) + f(Union(q, p)) - f(Union(a, q, p)) - f(p);
  }
  return 0.0;
}

// Gradients -----------------------------------------------------------------------

namespace {

// Derivative of max_{j in set} view(i, j) with respect to the factor on
// `scaled`, at the first maximizer.
double MaxDerivative(const KernelView& view, int i, std::span<const int> set,
                     std::span<const int> scaled) {
  double best = 0.0, d = 0.0;
  for (int j : set) {
    const double v = view(i, j);
    if (v > best) {
      best = v;
      d = view.CrossDerivative(i, j, scaled);
    }
  }
  return d;
}

}  // namespace

ParameterGradient MeasureGradient(const Measure& measure, std::span<const int> a,
                                  const Instance& instance) {
  ParameterGradient grad;
  const FunctionSpec& spec = measure.spec;
  const MeasureMode mode = measure.mode;
  const ParameterFlags active = LearnableParameters(spec.family, mode);
  if (!active.lambda && !active.eta && !active.nu) return grad;
  const std::span<const int> q = measure.query;
  const std::span<const int> p = measure.conditioning;
  CheckMeasureSets(instance, a, mode == MeasureMode::kSmi || mode == MeasureMode::kCsmi
                                    ? q : std::span<const int>(),
                   mode == MeasureMode::kCg || mode == MeasureMode::kCsmi
                       ? p : std::span<const int>());
  const int g = instance.ground_size;

  switch (spec.family) {
    case Family::kGraphCut: {
      const KernelView view = MakeFamilyView(spec, instance, {}, mode == MeasureMode::kCg
                                                                     ? p : std::span<const int>());
      if (mode == MeasureMode::kBase) {
        grad.lambda = -PairSum(view, a, a);
      } else if (mode == MeasureMode::kSmi) {
        grad.lambda = 2.0 * PairSum(view, a, q);
      } else {
        grad.lambda = -PairSum(view, a, a) - 2.0 * PairSum(view, a, p);
        double raw = 0.0;
        for (int i : a) {
          for (int j : p) raw += view.CrossDerivative(i, j, p);
        }
        grad.nu = -2.0 * spec.lambda * raw;
      }
      break;
    }
    case Family::kFacilityLocation1: {
      const bool uses_q = mode == MeasureMode::kSmi || mode == MeasureMode::kCsmi;
      const bool uses_p = mode == MeasureMode::kCg || mode == MeasureMode::kCsmi;
      const std::span<const int> qq = uses_q ? q : std::span<const int>();
      const std::span<const int> pp = uses_p ? p : std::span<const int>();
      const KernelView view = MakeFamilyView(spec, instance, qq, pp);
      for (int i = 0; i < g; ++i) {
        const double ai = MaxSim(view, i, a);
        const double qi = MaxSim(view, i, qq);
        const double pi = MaxSim(view, i, pp);
        if (mode == MeasureMode::kSmi) {
          if (qi <= ai) grad.eta += MaxDerivative(view, i, qq, qq);
        } else if (mode == MeasureMode::kCg) {
          if (ai - pi >= 0.0) grad.nu -= MaxDerivative(view, i, pp, pp);
        } else {
          if (std::min(ai, qi) - pi >= 0.0) {
            if (qi <= ai) grad.eta += MaxDerivative(view, i, qq, qq);
            grad.nu -= MaxDerivative(view, i, pp, pp);
          }
        }
      }
      break;
    }
    case Family::kFacilityLocation2: {
      const Eigen::MatrixXd& s = instance.nonnegative;
      for (int i : a) {
        double m = 0.0;
        for (int j : q) m = std::max(m, s(i, j));
        grad.eta += m;
      }
      break;
    }
    case Family::kConcaveOverModular: {
      const Eigen::MatrixXd& s = instance.nonnegative;
      for (int i : a) {
        double t = 0.0;
        for (int j : q) t += s(i, j);
        grad.eta += spec.com_weights[0] * ApplyPsi(spec.psi, t);
      }
      break;
    }
    case Family::kLogDet: {
      const bool uses_q = mode == MeasureMode::kSmi || mode == MeasureMode::kCsmi;
      const bool uses_p = mode == MeasureMode::kCg || mode == MeasureMode::kCsmi;
      const std::span<const int> qq = uses_q ? q : std::span<const int>();
      const std::span<const int> pp = uses_p ? p : std::span<const int>();
      const KernelView view = MakeFamilyView(spec, instance, qq, pp);
      const double jitter = instance.jitter;
      // Measure as a signed sum of log-dets of principal blocks.
      std::vector<std::pair<double, ItemSet>> terms;
      if (mode == MeasureMode::kSmi) {
        terms = {{1.0, ItemSet(a.begin(), a.end())},
                 {1.0, ItemSet(q.begin(), q.end())},
                 {-1.0, Union(a, q)}};
      } else if (mode == MeasureMode::kCg) {
        terms = {{1.0, Union(a, p)}, {-1.0, ItemSet(p.begin(), p.end())}};
      } else {
        terms = {{1.0, Union(a, p)},
                 {1.0, Union(q, p)},
                 {-1.0, Union(a, q, p)},
                 {-1.0, ItemSet(p.begin(), p.end())}};
      }
      for (const auto& [coef, x] : terms) {
        if (active.eta) grad.eta += coef * LogDetDerivative(view, x, jitter, qq);
        if (active.nu) grad.nu += coef * LogDetDerivative(view, x, jitter, pp);
      }
      break;
    }
    default:
      break;
  }
  if (!active.lambda) grad.lambda = 0.0;
  if (!active.eta) grad.eta = 0.0;
  if (!active.nu) grad.nu = 0.0;
  return grad;
}

}  // namespace submodinfo
