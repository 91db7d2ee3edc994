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
#include <cstdlib>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "submodinfo/bench.h"
#include "submodinfo/error.h"
#include "submodinfo/functions.h"
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

// GCMI against a single query with cross similarities w/2 is the modular
// function with weights w.
Instance ModularInstance(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n + 1, n + 1);
  for (int i = 0; i < n; ++i) s(i, n) = s(n, i) = w[i] / 2.0;
  return MakeInstance(s, n);
}

Measure ModularMeasure(int query) { return Measure{Spec(Family::kGraphCut), MeasureMode::kSmi, {query}, {}}; }

TEST(Greedy, ModularTopK) {
  const Instance inst = ModularInstance({3, 1, 2});
  const Objective obj(ModularMeasure(3), inst);
  const Selection sel = GreedyMaximize(obj, 2);
  EXPECT_EQ(sel.items, (ItemSet{0, 2}));
  EXPECT_NEAR(sel.gains[0], 3.0, 1e-12);
  EXPECT_NEAR(sel.gains[1], 2.0, 1e-12);
  EXPECT_NEAR(sel.value, 5.0, 1e-12);
  const Selection opt = BruteForceOpt(obj, 2);
  EXPECT_NEAR(opt.value, sel.value, 1e-12);
}

TEST(Greedy, ZeroBudgetAndBounds) {
  const Instance inst = ModularInstance({3, 1, 2});
  const Objective obj(ModularMeasure(3), inst);
  const Selection sel = GreedyMaximize(obj, 0);
  EXPECT_TRUE(sel.items.empty());
  EXPECT_EQ(sel.value, 0.0);
  EXPECT_THROW(GreedyMaximize(obj, 4), ConfigError);
  EXPECT_THROW(GreedyMaximize(obj, -1), ConfigError);
}

TEST(Greedy, StopOnNonpositive) {
  const Instance inst = ModularInstance({3, 0, 2});
  GreedyOptions o;
  o.stop_on_nonpositive = true;
  EXPECT_EQ(GreedyMaximize(Objective(ModularMeasure(3), inst), 3, o).items, (ItemSet{0, 2}));
  EXPECT_EQ(GreedyMaximize(Objective(ModularMeasure(3), inst), 3).items.size(), 3u);
}

TEST(Greedy, LazyMatchesNaiveOnSyntheticFacilityLocation) {
  const SyntheticData data = SynthGenerate({});
  const Instance inst = SynthInstance(data, 1.0);
  const ItemSet q{inst.ground_size, inst.ground_size + 1};
  const Objective obj(Measure{Spec(Family::kFacilityLocation1), MeasureMode::kSmi, q, {}}, inst);
  GreedyOptions naive;
  naive.lazy = false;
  const Selection a = GreedyMaximize(obj, 10);
  const Selection b = GreedyMaximize(obj, 10, naive);
  EXPECT_EQ(a.items, b.items);
  ASSERT_EQ(a.gains.size(), b.gains.size());
  for (std::size_t t = 0; t < a.gains.size(); ++t) EXPECT_NEAR(a.gains[t], b.gains[t], 1e-12);
}

TEST(Greedy, LazyMatchesNaiveAcrossFamilies) {
  std::mt19937_64 rng(21);
  RandomInstanceOptions o;
  o.min_ground = 6;
  o.max_ground = 12;
  for (Family f : kFamilies) {
    for (MeasureMode m :
         {MeasureMode::kBase, MeasureMode::kSmi, MeasureMode::kCg, MeasureMode::kCsmi}) {
      if (!IsSupported(f, m)) continue;
      for (int t = 0; t < 100; ++t) {
        const Instance inst = RandomInstance(rng, o);
        Measure measure{Spec(f, 0.4, 0.9, 0.8), m, {}, {}};
        for (int e = inst.ground_size; e < inst.size(); ++e) {
          const bool query_side = m == MeasureMode::kSmi || (m == MeasureMode::kCsmi && e % 2);
          if (query_side) {
            measure.query.push_back(e);
          } else if (m == MeasureMode::kCg || m == MeasureMode::kCsmi) {
            measure.conditioning.push_back(e);
          }
        }
        const Objective obj(measure, inst);
        GreedyOptions naive;
        naive.lazy = false;
        const int k = std::min(5, inst.ground_size);
        EXPECT_EQ(GreedyMaximize(obj, k).items, GreedyMaximize(obj, k, naive).items)
            << MeasureLabel(f, m) << " instance " << t;
      }
    }
  }
}

TEST(Greedy, GainsNonincreasingForMonotoneSubmodular) {
  std::mt19937_64 rng(22);
  RandomInstanceOptions o;
  o.min_ground = 8;
  o.max_ground = 12;
  for (Family f : kFamilies) {
    for (MeasureMode m :
         {MeasureMode::kBase, MeasureMode::kSmi, MeasureMode::kCg, MeasureMode::kCsmi}) {
      if (!IsSupported(f, m) || !IsMonotoneSubmodular(f, m) || !IsSubmodular(f, m)) continue;
      for (int t = 0; t < 20; ++t) {
        const Instance inst = RandomInstance(rng, o);
        Measure measure{Spec(f, 0.5, 0.9, 0.7), m, {}, {}};
        for (int e = inst.ground_size; e < inst.size(); ++e) {
          if ((m == MeasureMode::kSmi || m == MeasureMode::kCsmi) && e % 2 == 0) {
            measure.query.push_back(e);
          } else if (m == MeasureMode::kCg || m == MeasureMode::kCsmi) {
            measure.conditioning.push_back(e);
          }
        }
        const Selection sel = GreedyMaximize(Objective(measure, inst), 6);
        for (std::size_t s = 1; s < sel.gains.size(); ++s) {
          EXPECT_LE(sel.gains[s], sel.gains[s - 1] + 1e-9) << MeasureLabel(f, m);
        }
      }
    }
  }
}

TEST(Greedy, InvariantUnderRelabeling) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    RandomInstanceOptions o;
    o.min_ground = 8;
    o.max_ground = 10;
    const Instance inst = RandomInstance(rng, o);
    const int g = inst.ground_size, n = inst.size();
    std::vector<int> perm(g);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // Element e of the new instance is element old[e] of the original.
    std::vector<int> old(n);
    for (int e = 0; e < g; ++e) old[e] = perm[e];
    for (int e = g; e < n; ++e) old[e] = e;
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s(i, j) = inst.similarity(old[i], old[j]);
    }
    const Instance relabeled = MakeInstance(s, g);
    const ItemSet q{g, g + 1};
    const Measure m{Spec(Family::kFacilityLocation1, 1.0, 0.8), MeasureMode::kSmi, q, {}};
    const Selection a = GreedyMaximize(Objective(m, inst), 4);
    const Selection b = GreedyMaximize(Objective(m, relabeled), 4);
    // Ties break by index, so compare gain sequences and the mapped value.
    ASSERT_EQ(a.gains.size(), b.gains.size());
    for (std::size_t s = 0; s < a.gains.size(); ++s) EXPECT_NEAR(a.gains[s], b.gains[s], 1e-10);
    ItemSet mapped;
    for (int e : b.items) mapped.push_back(old[e]);
    EXPECT_NEAR(Evaluate(m, mapped, inst), a.value, 1e-10);
  }
}

TEST(Greedy, ParallelMatchesSerial) {
  const SyntheticData data = SynthGenerate({});
  const Instance inst = SynthInstance(data, 1.0);
  ASSERT_GE(inst.ground_size, 64);
  const ItemSet q{inst.ground_size, inst.ground_size + 1};
  for (Family f : {Family::kFacilityLocation2, Family::kLogDet}) {
    const Objective obj(Measure{Spec(f), MeasureMode::kSmi, q, {}}, inst);
    GreedyOptions serial, parallel;
    serial.threads = 1;
    serial.lazy = parallel.lazy = false;
    parallel.threads = 4;
    EXPECT_EQ(GreedyMaximize(obj, 10, serial).items, GreedyMaximize(obj, 10, parallel).items);
  }
}

TEST(Greedy, ThreadCapFromEnvironment) {
  setenv("SUBMOD_THREADS", "2", 1);
  EXPECT_LE(ResolveThreads(0), 2);
  EXPECT_LE(ResolveThreads(8), 2);
  unsetenv("SUBMOD_THREADS");
  EXPECT_GE(ResolveThreads(0), 1);
  EXPECT_EQ(ResolveThreads(3), 3);
}

TEST(BruteForce, GreedyApproximationOnFacilityLocation) {
  std::mt19937_64 rng(24);
  RandomInstanceOptions o;
  o.min_ground = o.max_ground = 10;
  for (int t = 0; t < 20; ++t) {
    const Instance inst = RandomInstance(rng, o);
    const Objective obj(Measure{Spec(Family::kFacilityLocation1)}, inst);
    const double opt = BruteForceOpt(obj, 3).value;
    EXPECT_GE(GreedyMaximize(obj, 3).value, (1.0 - std::exp(-1.0)) * opt - 1e-12);
  }
}

TEST(BruteForce, FullSetForMonotone) {
  std::mt19937_64 rng(25);
  const Instance inst = RandomInstance(rng);
  const Selection s =
      BruteForceOpt(Objective(Measure{Spec(Family::kFacilityLocation1)}, inst), inst.ground_size);
  EXPECT_EQ(static_cast<int>(s.items.size()), inst.ground_size);
}

TEST(BruteForce, SizeLimit) {
  const Instance inst = MakeInstance(Eigen::MatrixXd::Identity(40, 40), 40);
  EXPECT_THROW(BruteForceOpt(Objective(Measure{Spec(Family::kGraphCut, 0.0)}, inst), 10),
               SizeError);
}

TEST(GreedySuiteCheck, ApproximationOnBruteForceableInstances) {
  const SuiteReport r = GreedySuite(26, 10);
  for (const SuiteCheck& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Flavor, NamesAndModes) {
  EXPECT_EQ(ParseFlavor("query-privacy"), Flavor::kQueryPrivacy);
  EXPECT_EQ(ParseFlavor("query_update"), Flavor::kQueryUpdate);
  EXPECT_EQ(ParseFlavor("joint"), Flavor::kQueryPrivacy);
  EXPECT_THROW(ParseFlavor("nonsense"), ConfigError);
  EXPECT_EQ(FlavorMode(Flavor::kGeneric), MeasureMode::kBase);
  EXPECT_EQ(FlavorMode(Flavor::kQuery), MeasureMode::kSmi);
  EXPECT_EQ(FlavorMode(Flavor::kIrrelevance), MeasureMode::kCg);
  EXPECT_EQ(FlavorMode(Flavor::kUpdate), MeasureMode::kCg);
  EXPECT_EQ(FlavorMode(Flavor::kQueryUpdate), MeasureMode::kCsmi);
  for (Flavor f : {Flavor::kGeneric, Flavor::kQuery, Flavor::kPrivacy, Flavor::kIrrelevance,
                   Flavor::kUpdate, Flavor::kQueryUpdate, Flavor::kQueryPrivacy}) {
    EXPECT_EQ(ParseFlavor(FlavorName(f)), f);
  }
}

TEST(MasterSolve, GenericIsPlainMaximization) {
  std::mt19937_64 rng(27);
  const Instance inst = RandomInstance(rng);
  const FunctionSpec gc = Spec(Family::kGraphCut, 0.3);
  const Selection a = MasterSolve(Flavor::kGeneric, gc, {}, 2, inst);
  const Selection b = GreedyMaximize(Objective(Measure{gc}, inst), 2);
  EXPECT_EQ(a.items, b.items);
}

TEST(MasterSolve, EmptyQueryGivesLowestIndices) {
  std::mt19937_64 rng(28);
  const Instance inst = RandomInstance(rng);
  FlavorSets sets;
  sets.query = ItemSet{};
  const Selection s = MasterSolve(Flavor::kQuery, Spec(Family::kFacilityLocation1), sets, 2, inst);
  EXPECT_EQ(s.items, (ItemSet{0, 1}));
  for (double g : s.gains) EXPECT_EQ(g, 0.0);
}

TEST(MasterSolve, MissingRequiredSet) {
  std::mt19937_64 rng(29);
  const Instance inst = RandomInstance(rng);
  EXPECT_THROW(MasterSolve(Flavor::kQuery, Spec(Family::kFacilityLocation1), {}, 2, inst),
               ConfigError);
  FlavorSets only_query;
  only_query.query = ItemSet{inst.ground_size};
  EXPECT_THROW(
      MasterSolve(Flavor::kQueryPrivacy, Spec(Family::kFacilityLocation1), only_query, 2, inst),
      ConfigError);
}

TEST(MasterSolve, GraphCutQueryPrivacyUnsupported) {
  std::mt19937_64 rng(30);
  const Instance inst = RandomInstance(rng);
  FlavorSets sets;
  sets.query = ItemSet{inst.ground_size};
  sets.privates = ItemSet{inst.ground_size + 1};
  EXPECT_THROW(MasterSolve(Flavor::kQueryPrivacy, Spec(Family::kGraphCut), sets, 1, inst),
               UnsupportedError);
}

// Items: a covers {0,1}, b covers {1}, c covers {2}; query {0,1,2}; private
// {1}. Under query-privacy set cover, b adds nothing the private set does not
// already cover.
TEST(MasterSolve, QueryPrivacySetCoverAvoidsPrivateOnlyOverlap) {
  const Instance inst =
      WithConcepts(Eigen::MatrixXd::Identity(5, 5), 3, 3, {{0, 1}, {1}, {2}, {0, 1, 2}, {1}});
  FlavorSets sets;
  sets.query = ItemSet{3};
  sets.privates = ItemSet{4};
  const Selection greedy = MasterSolve(Flavor::kQueryPrivacy, Spec(Family::kSetCover), sets, 2, inst);
  const Measure m = FlavorMeasure(Flavor::kQueryPrivacy, Spec(Family::kSetCover), sets, inst);
  const Selection opt = BruteForceOpt(Objective(m, inst), 2);
  EXPECT_NEAR(greedy.value, opt.value, 1e-12);
  EXPECT_EQ(opt.value, 2.0);
  for (int e : opt.items) EXPECT_NE(e, 1);
  for (int e : greedy.items) EXPECT_NE(e, 1);
}

TEST(MasterSolve, UpdateExcludesPreviousSummary) {
  std::mt19937_64 rng(31);
  RandomInstanceOptions o;
  o.min_ground = 6;
  const Instance inst = RandomInstance(rng, o);
  FlavorSets sets;
  sets.previous = ItemSet{0, 1};
  const Selection s = MasterSolve(Flavor::kUpdate, Spec(Family::kFacilityLocation1), sets, 3, inst);
  for (int e : s.items) {
    EXPECT_NE(e, 0);
    EXPECT_NE(e, 1);
  }
  FlavorSets outside;
  outside.previous = ItemSet{inst.ground_size};
  EXPECT_THROW(MasterSolve(Flavor::kUpdate, Spec(Family::kFacilityLocation1), outside, 1, inst),
               ConfigError);
}

TEST(Objective, MixtureSumsTerms) {
  std::mt19937_64 rng(32);
  const Instance inst = RandomInstance(rng);
  Objective obj(inst);
  const Measure fl{Spec(Family::kFacilityLocation1)};
  const Measure div{Spec(Family::kDisparitySum)};
  obj.AddTerm(fl, 2.0);
  obj.AddTerm(div, 0.5);
  const ItemSet a{0, 1};
  EXPECT_NEAR(obj.Evaluate(a), 2.0 * Evaluate(fl, a, inst) + 0.5 * Evaluate(div, a, inst), 1e-12);
  EXPECT_FALSE(obj.IsSubmodular());
  Objective cut(inst);
  cut.AddTerm(fl, 1.0);
  cut.AddTerm(Measure{Spec(Family::kGraphCut, 0.4)}, 0.3);
  EXPECT_TRUE(cut.IsSubmodular());
  cut.AddTerm(Measure{Spec(Family::kDisparityMin)});
  EXPECT_FALSE(cut.IsSubmodular());
}

}  // namespace
}  // namespace submodinfo
