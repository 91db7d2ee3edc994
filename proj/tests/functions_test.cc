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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "submodinfo/error.h"
#include "submodinfo/functions.h"
#include "submodinfo/marginal.h"
#include "submodinfo/optimizer.h"
#include "submodinfo/oracle_suite.h"
#include "test_util.h"

namespace submodinfo {
namespace {

using testing::Mat;
using testing::WithConcepts;

constexpr Family kFamilies[] = {
    Family::kSetCover,          Family::kProbSetCover,      Family::kGraphCut,
    Family::kFacilityLocation1, Family::kFacilityLocation2, Family::kLogDet,
    Family::kConcaveOverModular, Family::kRouge,            Family::kDisparitySum,
    Family::kDisparityMin};

FunctionSpec Spec(Family f, double lambda = 1.0, double eta = 1.0, double nu = 1.0) {
  FunctionSpec s;
  s.family = f;
  s.lambda = lambda;
  s.eta = eta;
  s.nu = nu;
  return s;
}

ItemSet Range(int b, int e) {
  ItemSet out(e - b);
  std::iota(out.begin(), out.end(), b);
  return out;
}

// Omega = {a, b | q, p}; Gamma(a)={1,2}, Gamma(b)={2,3}, Gamma(q)={2,3},
// Gamma(p)={2} with concepts indexed 0..3.
Instance SetCoverInstance() {
  return WithConcepts(Eigen::MatrixXd::Identity(4, 4), 2, 4, {{1, 2}, {2, 3}, {2, 3}, {2}});
}

TEST(EvalBase, SetCoverUnion) {
  const Instance inst = SetCoverInstance();
  const ItemSet ab{0, 1};
  EXPECT_EQ(EvalBase(Spec(Family::kSetCover), ab, inst), 3.0);
}

TEST(EvalBase, EmptySetIsZeroForEveryFamily) {
  std::mt19937_64 rng(1);
  const Instance inst = RandomInstance(rng);
  for (Family f : kFamilies) {
    EXPECT_EQ(EvalBase(Spec(f), ItemSet{}, inst), 0.0) << FamilyName(f);
  }
}

TEST(EvalBase, LogDetSingletonIncludesJitter) {
  const Instance inst = MakeInstance(Mat({{2.0, 0.5}, {0.5, 1.0}}), 2, 1e-6);
  EXPECT_NEAR(EvalBase(Spec(Family::kLogDet), ItemSet{0}, inst), std::log(2.0 + 1e-6), 1e-12);
}

TEST(EvalBase, MissingConceptDataIsConfigError) {
  const Instance inst = MakeInstance(Eigen::MatrixXd::Identity(3, 3), 2);
  for (Family f : {Family::kSetCover, Family::kProbSetCover, Family::kRouge}) {
    EXPECT_THROW(EvalBase(Spec(f), ItemSet{0}, inst), ConfigError) << FamilyName(f);
  }
}

TEST(EvalBase, SingularLogDetIsNumericError) {
  const Instance inst = MakeInstance(Mat({{1, 1}, {1, 1}}), 2, 0.0);
  EXPECT_THROW(EvalBase(Spec(Family::kLogDet), ItemSet{0, 1}, inst), NumericError);
}

TEST(EvalBase, DisparityFunctions) {
  const Instance inst = MakeInstance(Mat({{1, 0.2, 0.5}, {0.2, 1, 0.9}, {0.5, 0.9, 1}}), 3);
  const ItemSet all{0, 1, 2};
  EXPECT_NEAR(EvalBase(Spec(Family::kDisparitySum), all, inst), 0.8 + 0.5 + 0.1, 1e-12);
  EXPECT_NEAR(EvalBase(Spec(Family::kDisparityMin), all, inst), 0.1, 1e-12);
}

// Two tight clusters and one far outlier; a graph cut with lambda = 2 keeps
// the outlier out of its top picks.
TEST(EvalBase, GraphCutAvoidsOutlier) {
  std::vector<std::array<double, 2>> pts;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int i = 0; i < 10; ++i) pts.push_back({n(rng), n(rng)});
  for (int i = 0; i < 10; ++i) pts.push_back({4 + n(rng), n(rng)});
  pts.push_back({2.0, 8.0});
  const int m = static_cast<int>(pts.size());
  Eigen::MatrixXd s(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d2 = std::pow(pts[i][0] - pts[j][0], 2) + std::pow(pts[i][1] - pts[j][1], 2);
      s(i, j) = std::exp(-d2 / 2.0);
    }
  }
  const Instance inst = MakeInstance(s, m);
  const Selection sel = GreedyMaximize(Objective(Measure{Spec(Family::kGraphCut, 2.0)}, inst), 4);
  for (int e : sel.items) EXPECT_NE(e, m - 1);
}

TEST(Smi, GraphCutExample) {
  const Instance inst = MakeInstance(Mat({{1, 0.5}, {0.5, 1}}), 1);
  EXPECT_DOUBLE_EQ(Smi(Spec(Family::kGraphCut), ItemSet{0}, ItemSet{1}, inst), 1.0);
  EXPECT_DOUBLE_EQ(
      DefinitionalOracle(Spec(Family::kGraphCut), MeasureMode::kSmi, ItemSet{0}, ItemSet{1}, {}, inst),
      1.0);
}

TEST(Smi, EmptyQueryIsZeroForEveryFamily) {
  std::mt19937_64 rng(2);
  const Instance inst = RandomInstance(rng);
  const ItemSet a{0, 1};
  for (Family f : kFamilies) {
    if (!IsSupported(f, MeasureMode::kSmi)) continue;
    EXPECT_EQ(Smi(Spec(f), a, ItemSet{}, inst), 0.0) << FamilyName(f);
  }
}

TEST(Smi, SetCoverIntersection) {
  const Instance inst = SetCoverInstance();
  EXPECT_EQ(Smi(Spec(Family::kSetCover), ItemSet{0}, ItemSet{2}, inst), 1.0);
}

TEST(Smi, LogDetZeroCrossBlock) {
  const Instance inst =
      MakeInstance(Mat({{1, 0.3, 0, 0}, {0.3, 1, 0, 0}, {0, 0, 1, 0.2}, {0, 0, 0.2, 1}}), 2);
  EXPECT_NEAR(Smi(Spec(Family::kLogDet), ItemSet{0, 1}, ItemSet{2, 3}, inst), 0.0, 1e-12);
}

TEST(Smi, FacilityLocation2Example) {
  const Instance inst = MakeInstance(Mat({{1, 0.7}, {0.7, 1}}), 1);
  EXPECT_NEAR(Smi(Spec(Family::kFacilityLocation2), ItemSet{0}, ItemSet{1}, inst), 1.4, 1e-12);
  EXPECT_NEAR(DefinitionalOracle(Spec(Family::kFacilityLocation2), MeasureMode::kSmi, ItemSet{0},
                                 ItemSet{1}, {}, inst),
              1.4, 1e-12);
}

TEST(Smi, CrossEntriesAboveOneRejectedForCrossOnlyFamilies) {
  const Instance inst = MakeInstance(Mat({{1, 1.5}, {1.5, 1}}), 1);
  EXPECT_THROW(Smi(Spec(Family::kFacilityLocation2), ItemSet{0}, ItemSet{1}, inst), ConfigError);
}

TEST(Smi, SetsMustBeDisjointAndInRange) {
  const Instance inst = SetCoverInstance();
  EXPECT_THROW(Smi(Spec(Family::kSetCover), ItemSet{2}, ItemSet{3}, inst), ConfigError);
  EXPECT_THROW(Smi(Spec(Family::kSetCover), ItemSet{0, 0}, ItemSet{2}, inst), ConfigError);
  EXPECT_THROW(Smi(Spec(Family::kSetCover), ItemSet{9}, ItemSet{2}, inst), ConfigError);
  EXPECT_THROW(Csmi(Spec(Family::kSetCover), ItemSet{0}, ItemSet{2}, ItemSet{2}, inst),
               ConfigError);
}

TEST(Smi, SymmetryOfGraphCutAndLogDet) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const Instance inst = RandomInstance(rng);
    const int g = inst.ground_size, n = inst.size();
    // The same kernel with the roles of V and V' exchanged.
    std::vector<int> perm;
    for (int e = g; e < n; ++e) perm.push_back(e);
    for (int e = 0; e < g; ++e) perm.push_back(e);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s(i, j) = inst.similarity(perm[i], perm[j]);
    }
    const Instance swapped = MakeInstance(s, n - g);
    auto to_swapped = [&](const ItemSet& x) {
      ItemSet out;
      for (int e : x) out.push_back(e >= g ? e - g : e + (n - g));
      return out;
    };
    const ItemSet a = RandomSubset(rng, Range(0, g));
    const ItemSet q = RandomSubset(rng, Range(g, n));
    const FunctionSpec spec = Spec(Family::kGraphCut, 0.7, 1.0);
    EXPECT_NEAR(Smi(spec, a, q, inst), Smi(spec, to_swapped(q), to_swapped(a), swapped), 1e-10);
    const BaseFunction base(Spec(Family::kLogDet), inst);
    ItemSet aq = a;
    aq.insert(aq.end(), q.begin(), q.end());
    const double forward = base(a) + base(q) - base(aq);
    const double backward = base(q) + base(a) - base(aq);
    EXPECT_EQ(forward, backward);
  }
}

TEST(Cg, EmptyConditioningEqualsBase) {
  std::mt19937_64 rng(7);
  const Instance inst = RandomInstance(rng);
  const ItemSet a{0, 1};
  for (Family f : kFamilies) {
    if (!IsSupported(f, MeasureMode::kCg)) continue;
    const FunctionSpec s = Spec(f, 0.6, 1.0, 3.0);
    EXPECT_NEAR(Cg(s, a, ItemSet{}, inst), EvalBase(s, a, inst), 1e-12) << FamilyName(f);
    EXPECT_NEAR(DefinitionalOracle(s, MeasureMode::kCg, a, {}, {}, inst), EvalBase(s, a, inst),
                1e-12);
  }
}

TEST(Cg, SetCoverDifference) {
  const Instance inst = SetCoverInstance();
  EXPECT_EQ(Cg(Spec(Family::kSetCover), ItemSet{0}, ItemSet{3}, inst), 1.0);
}

TEST(Cg, GraphCutWithPrivacyScale) {
  const Instance inst = MakeInstance(Mat({{1, 0.4}, {0.4, 1}}), 1);
  const FunctionSpec s = Spec(Family::kGraphCut, 1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(EvalBase(s, ItemSet{0}, inst), 0.0);
  EXPECT_NEAR(Cg(s, ItemSet{0}, ItemSet{1}, inst), -1.6, 1e-12);
  EXPECT_NEAR(DefinitionalOracle(s, MeasureMode::kCg, ItemSet{0}, {}, ItemSet{1}, inst), -1.6,
              1e-12);
}

TEST(Csmi, SetCoverExample) {
  const Instance inst = SetCoverInstance();
  EXPECT_EQ(Csmi(Spec(Family::kSetCover), ItemSet{0}, ItemSet{2}, ItemSet{3}, inst), 0.0);
}

TEST(Csmi, EmptyConditioningEqualsSmi) {
  std::mt19937_64 rng(8);
  const Instance inst = RandomInstance(rng);
  const ItemSet a{0, 1};
  const ItemSet q{inst.ground_size};
  for (Family f : kFamilies) {
    if (!IsSupported(f, MeasureMode::kCsmi)) continue;
    const FunctionSpec s = Spec(f, 1.0, 0.8);
    EXPECT_NEAR(Csmi(s, a, q, ItemSet{}, inst), Smi(s, a, q, inst), 1e-12) << FamilyName(f);
  }
}

TEST(Csmi, FacilityLocationThreeItems) {
  const Instance inst =
      MakeInstance(Mat({{1, 0.6, 0.2}, {0.6, 1, 0.3}, {0.2, 0.3, 1}}), 1);
  const FunctionSpec s = Spec(Family::kFacilityLocation1);
  EXPECT_NEAR(Csmi(s, ItemSet{0}, ItemSet{1}, ItemSet{2}, inst),
              DefinitionalOracle(s, MeasureMode::kCsmi, ItemSet{0}, ItemSet{1}, ItemSet{2}, inst),
              1e-12);
}

TEST(Csmi, GraphCutUnsupported) {
  const Instance inst = MakeInstance(Eigen::MatrixXd::Identity(3, 3), 1);
  EXPECT_THROW(Csmi(Spec(Family::kGraphCut), ItemSet{0}, ItemSet{1}, ItemSet{2}, inst),
               UnsupportedError);
  EXPECT_FALSE(IsSupported(Family::kGraphCut, MeasureMode::kCsmi));
}

TEST(Oracle, ClosedFormsAgree) {
  const SuiteReport r = ClosedFormSuite(11, 40);
  for (const SuiteCheck& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_EQ(r.checks.size(), 17u);
}

TEST(Properties, NonnegativityMonotonicityAndConditionalIdentities) {
  const SuiteReport r = PropertySuite(12, 200, 50);
  for (const SuiteCheck& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Properties, RougeAndComDirectForms) {
  const SuiteReport r = EqualitySuite(13, 50);
  for (const SuiteCheck& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Properties, RestrictedSubmodularityOfRougeAndCom) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 300; ++t) {
    const Instance inst = RandomInstance(rng);
    const int g = inst.ground_size, n = inst.size();
    // A inside V or inside V', B arbitrary.
    const bool in_v = t % 2 == 0;
    const ItemSet a = in_v ? RandomSubset(rng, Range(0, g)) : RandomSubset(rng, Range(g, n));
    const ItemSet b = RandomSubset(rng, Range(0, n));
    ItemSet uni, inter;
    std::vector<char> in_a(n, 0);
    for (int e : a) in_a[e] = 1;
    uni = a;
    for (int e : b) {
      if (in_a[e]) {
        inter.push_back(e);
      } else {
        uni.push_back(e);
      }
    }
    for (Family f : {Family::kRouge, Family::kConcaveOverModular}) {
      FunctionSpec s = Spec(f);
      s.psi = static_cast<Psi>(t % 3);
      const BaseFunction base(s, inst);
      EXPECT_GE(base(a) + base(b), base(uni) + base(inter) - 1e-9) << FamilyName(f);
    }
  }
}

TEST(Kernel, FacilityLocationUsesShiftedKernelForSignedInput) {
  const Instance inst = MakeInstance(Mat({{1, -0.5}, {-0.5, 1}}), 2);
  EXPECT_TRUE(inst.shifted);
  EXPECT_DOUBLE_EQ(inst.nonnegative(0, 1), 0.25);
  const Instance plain = MakeInstance(Mat({{1, 0.5}, {0.5, 1}}), 2);
  EXPECT_FALSE(plain.shifted);
}

TEST(Marginal, FacilityLocationFirstGain) {
  std::mt19937_64 rng(15);
  const Instance inst = RandomInstance(rng);
  const ItemSet q{inst.ground_size, inst.ground_size + 1};
  const FunctionSpec s = Spec(Family::kFacilityLocation1, 1.0, 0.7);
  const auto state = MakeMarginalState(Measure{s, MeasureMode::kSmi, q, {}}, inst);
  for (int j = 0; j < inst.ground_size; ++j) {
    // Sum over V of min(s_ij, eta max_Q s_i.).
    double expect = 0.0;
    for (int i = 0; i < inst.ground_size; ++i) {
      double mq = 0.0;
      for (int e : q) mq = std::max(mq, inst.nonnegative(i, e));
      expect += std::min(inst.nonnegative(i, j), 0.7 * mq);
    }
    EXPECT_NEAR(state->Gain(j), expect, 1e-12);
  }
}

TEST(Marginal, ModularGraphCutGainIndependentOfA) {
  std::mt19937_64 rng(16);
  const Instance inst = RandomInstance(rng);
  const auto state = MakeMarginalState(Measure{Spec(Family::kGraphCut, 0.0)}, inst);
  const int last = inst.ground_size - 1;
  const double before = state->Gain(last);
  double column = 0.0;
  for (int i = 0; i < inst.ground_size; ++i) column += inst.similarity(i, last);
  EXPECT_NEAR(before, column, 1e-12);
  for (int j = 0; j < last; ++j) {
    state->Add(j);
    EXPECT_NEAR(state->Gain(last), before, 1e-12);
  }
}

// Every incremental state matches from-scratch evaluation along a greedy
// path, for every family and mode.
TEST(Marginal, IncrementalMatchesScratch) {
  std::mt19937_64 rng(17);
  for (Family f : kFamilies) {
    for (MeasureMode m :
         {MeasureMode::kBase, MeasureMode::kSmi, MeasureMode::kCg, MeasureMode::kCsmi}) {
      if (!IsSupported(f, m)) continue;
      for (int t = 0; t < 10; ++t) {
        RandomInstanceOptions o;
        o.min_ground = 4;
        const Instance inst = RandomInstance(rng, o);
        Measure measure{Spec(f, 0.5, 0.8, 0.9), m, {}, {}};
        for (int e = inst.ground_size; e < inst.size(); ++e) {
          if (m != MeasureMode::kBase && m != MeasureMode::kCg && e % 2 == 0) {
            measure.query.push_back(e);
          } else if (m == MeasureMode::kCg || m == MeasureMode::kCsmi) {
            measure.conditioning.push_back(e);
          }
        }
        auto inc = MakeMarginalState(measure, inst);
        auto ref = MakeScratchState(measure, inst);
        for (int j = 0; j < inst.ground_size; ++j) {
          for (int c = 0; c < inst.ground_size; ++c) {
            if (inc->Contains(c)) continue;
            const double gi = inc->Gain(c), gr = ref->Gain(c);
            if (std::isinf(gr)) {
              EXPECT_TRUE(std::isinf(gi));
            } else {
              EXPECT_NEAR(gi, gr, 1e-8 * std::max(1.0, std::abs(gr)))
                  << MeasureLabel(f, m) << " candidate " << c;
            }
          }
          if (std::isinf(ref->Gain(j))) break;
          inc->Add(j);
          ref->Add(j);
          EXPECT_NEAR(inc->Value(), Evaluate(measure, inc->selected(), inst),
                      1e-8 * std::max(1.0, std::abs(inc->Value())));
        }
      }
    }
  }
}

TEST(Marginal, RejectsSelectedAndForeignElements) {
  std::mt19937_64 rng(18);
  const Instance inst = RandomInstance(rng);
  auto state = MakeMarginalState(Measure{Spec(Family::kFacilityLocation1)}, inst);
  state->Add(0);
  EXPECT_THROW(state->Gain(0), ConfigError);
  EXPECT_THROW(state->Gain(inst.ground_size), ConfigError);
}

TEST(Support, TablesAreConsistent) {
  EXPECT_TRUE(IsSupported(Family::kFacilityLocation2, MeasureMode::kSmi));
  EXPECT_FALSE(IsSupported(Family::kFacilityLocation2, MeasureMode::kCg));
  EXPECT_FALSE(IsSupported(Family::kDisparitySum, MeasureMode::kSmi));
  EXPECT_THROW(CheckSupported(Family::kRouge, MeasureMode::kCsmi), UnsupportedError);
  for (Family f : kFamilies) {
    EXPECT_TRUE(IsSupported(f, MeasureMode::kBase));
    for (MeasureMode m : {MeasureMode::kSmi, MeasureMode::kCg, MeasureMode::kCsmi}) {
      if (IsMonotoneSubmodular(f, m)) EXPECT_TRUE(IsSupported(f, m));
    }
  }
}

TEST(Gradient, LearnableParametersHaveDerivatives) {
  const ParameterFlags gc_cg = LearnableParameters(Family::kGraphCut, MeasureMode::kCg);
  EXPECT_TRUE(gc_cg.lambda);
  EXPECT_TRUE(gc_cg.nu);
  EXPECT_FALSE(gc_cg.eta);
  const ParameterFlags fl2 = LearnableParameters(Family::kFacilityLocation2, MeasureMode::kSmi);
  EXPECT_TRUE(fl2.eta);
  EXPECT_FALSE(fl2.nu);
  const ParameterFlags sc = LearnableParameters(Family::kSetCover, MeasureMode::kCsmi);
  EXPECT_FALSE(sc.lambda || sc.eta || sc.nu);
}

TEST(Gradient, GraphCutLambdaUnitSimilarities) {
  const Instance inst = MakeInstance(Eigen::MatrixXd::Ones(4, 4), 4);
  const ParameterGradient g =
      MeasureGradient(Measure{Spec(Family::kGraphCut)}, ItemSet{0, 1, 2}, inst);
  EXPECT_DOUBLE_EQ(g.lambda, -9.0);
}

}  // namespace
}  // namespace submodinfo
