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
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "submodinfo/bench.h"
#include "submodinfo/error.h"
#include "submodinfo/metrics.h"
#include "test_util.h"

namespace submodinfo {
namespace {

using testing::WithConcepts;

TEST(RougeQ, Examples) {
  const std::vector<double> a{2, 0, 1}, q{1, 1, 1}, zero{0, 0, 0};
  EXPECT_EQ(RougeQ(a, q), 2.0);
  EXPECT_EQ(RougeQ(zero, q), 0.0);
  EXPECT_EQ(RougeQ(q, q), 3.0);
  const std::vector<double> w{0.5, 1, 2};
  EXPECT_EQ(RougeQ(a, q, w), 2.5);
}

TEST(VRouge, PerfectDisjointAndHalf) {
  const Instance inst = WithConcepts(Eigen::MatrixXd::Identity(4, 4), 4, 4, {{0}, {1}, {2}, {3}});
  const std::vector<ItemSet> refs{{0, 1}};
  EXPECT_EQ(VRouge(ItemSet{0, 1}, refs, inst).value, 1.0);
  EXPECT_EQ(VRouge(ItemSet{2, 3}, refs, inst).value, 0.0);
  EXPECT_EQ(VRouge(ItemSet{0, 2}, refs, inst).value, 0.5);
  const std::vector<ItemSet> two{{0, 1}, {0, 2}};
  EXPECT_EQ(VRouge(ItemSet{0, 1}, two, inst).value, 0.75);
}

TEST(VRouge, EmptyReferencesAreSkipped) {
  const Instance inst = WithConcepts(Eigen::MatrixXd::Identity(3, 3), 3, 2, {{0}, {1}, {}});
  const std::vector<ItemSet> refs{{2}, {0}};
  const VRougeResult r = VRouge(ItemSet{0}, refs, inst);
  EXPECT_EQ(r.skipped, 1);
  EXPECT_EQ(r.value, 1.0);
}

TEST(Synth, DeterministicShape) {
  const SyntheticData a = SynthGenerate({});
  const SyntheticData b = SynthGenerate({});
  ASSERT_EQ(a.ground.items().size(), 102u);
  EXPECT_EQ(a.queries.items.items().size(), 2u);
  EXPECT_EQ(a.privates.items.items().size(), 1u);
  for (std::size_t i = 0; i < a.ground.items().size(); ++i) {
    EXPECT_EQ(a.ground.items()[i].id, b.ground.items()[i].id);
    EXPECT_EQ(a.ground.items()[i].features, b.ground.items()[i].features);
  }
  SyntheticConfig other;
  other.seed = 8;
  EXPECT_NE(SynthGenerate(other).ground.items()[0].features, a.ground.items()[0].features);
}

TEST(Synth, ClusterPointsStayNearCenters) {
  SyntheticConfig cfg;
  cfg.outliers.clear();
  const SyntheticData d = SynthGenerate(cfg);
  ASSERT_EQ(d.ground.items().size(), 100u);
  for (const ItemRecord& item : d.ground.items()) {
    double best = 1e300;
    for (const Point& c : cfg.centers) {
      best = std::min(best, std::hypot(item.features[0] - c[0], item.features[1] - c[1]));
    }
    EXPECT_LE(best, 3.0 * cfg.cluster_sigma * std::sqrt(2.0));
  }
}

TEST(Behavior, Metrics) {
  Selection sel;
  sel.items = {0, 1, 2};
  sel.gains = {1.0, 0.5, 1e-4};
  const std::vector<Point> items{{0, 0}, {5, 5}, {9, 9}};
  const std::vector<Point> queries{{0, 0.5}, {9, 9.5}};
  const std::vector<Point> privates{{5, 5.2}};
  const BehaviorReport r = BehaviorMetrics(sel, items, queries, privates, 1.0);
  EXPECT_EQ(r.query_match_count, (std::vector<int>{1, 1}));
  EXPECT_EQ(r.fairness, 1);
  EXPECT_EQ(r.privacy_violations, 1);
  EXPECT_EQ(r.saturation_step, 3);
  EXPECT_DOUBLE_EQ(r.eps_sat, 1e-3);
  const BehaviorReport none = BehaviorMetrics(sel, items, queries, privates, 1.0, 1e-6);
  EXPECT_FALSE(none.saturation_step.has_value());
  const auto j = ReportToJson(r);
  EXPECT_EQ(j["fairness"], 1);
}

std::map<std::string, BehaviorReport> ByLabel(const StudyResult& r) {
  std::map<std::string, BehaviorReport> out;
  for (const StudyRun& run : r.runs) out[run.label] = run.report;
  return out;
}

// Values frozen from the seeded oracle run of the default instance.
TEST(Study, QueryFrozen) {
  StudyConfig cfg;
  const auto runs = ByLabel(RunStudy(cfg));
  ASSERT_TRUE(runs.count("GCMI"));
  EXPECT_EQ(runs.at("GCMI").query_match_count, (std::vector<int>{10, 0}));
  EXPECT_EQ(runs.at("GCMI").fairness, 0);
  EXPECT_FALSE(runs.at("GCMI").saturation_step.has_value());
  EXPECT_EQ(runs.at("FL1MI").query_match_count, (std::vector<int>{3, 1}));
  EXPECT_EQ(runs.at("FL1MI").saturation_step, 5);
  EXPECT_EQ(runs.at("FL2MI").query_match_count, (std::vector<int>{9, 1}));
}

TEST(Study, EtaSweepFrozen) {
  StudyConfig cfg;
  cfg.families = {Family::kFacilityLocation2};
  cfg.sweep_param = "eta";
  cfg.sweep_values = {0.0, 1.0};
  const auto runs = ByLabel(RunStudy(cfg));
  EXPECT_EQ(runs.at("FL2MI@eta=0").saturation_step, 3);
  EXPECT_EQ(runs.at("FL2MI@eta=0").query_match_count, (std::vector<int>{1, 1}));
  EXPECT_FALSE(runs.at("FL2MI@eta=1").saturation_step.has_value());
}

TEST(Study, PrivacySweepFrozen) {
  StudyConfig cfg;
  cfg.study = Study::kPrivacy;
  cfg.sweep_param = "nu";
  cfg.sweep_values = {0.0, 10.0};
  const auto runs = ByLabel(RunStudy(cfg));
  EXPECT_EQ(runs.at("FLCG@nu=0").privacy_violations, 2);
  EXPECT_EQ(runs.at("FLCG@nu=10").privacy_violations, 0);
  EXPECT_EQ(runs.at("GCCG@nu=0").privacy_violations, 3);
  EXPECT_EQ(runs.at("GCCG@nu=10").privacy_violations, 0);
  EXPECT_EQ(runs.at("LogDetCG@nu=0").privacy_violations, 1);
  EXPECT_EQ(runs.at("LogDetCG@nu=10").privacy_violations, 0);
}

TEST(Study, CsvFormat) {
  StudyConfig cfg;
  cfg.families = {Family::kGraphCut};
  const StudyResult r = RunStudy(cfg);
  const std::string csv = StudyCsv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "run,x,y,role,pick_order");
  int selected = 0, rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",selected,") != std::string::npos) ++selected;
  }
  EXPECT_EQ(selected, 10);
  // Selected points replace their data rows.
  EXPECT_EQ(rows, 102 + 2 + 1);
  EXPECT_EQ(csv, StudyCsv(RunStudy(cfg)));
  EXPECT_EQ(StudyJson(r)["runs"].size(), 1u);
}

TEST(Study, Names) {
  for (Study s : {Study::kQuery, Study::kPrivacy, Study::kJoint, Study::kGeneric}) {
    EXPECT_EQ(ParseStudy(StudyName(s)), s);
  }
  EXPECT_THROW(ParseStudy("bogus"), ConfigError);
}

TEST(ConceptTask, Deterministic) {
  ConceptTaskConfig cfg;
  cfg.collections = 2;
  const auto a = ConceptTaskGenerate(cfg);
  const auto b = ConceptTaskGenerate(cfg);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t n = 0; n < a.size(); ++n) {
    EXPECT_EQ(a[n].references, b[n].references);
    EXPECT_EQ(a[n].instance->ground_size, cfg.items);
    EXPECT_EQ(static_cast<int>(a[n].references.size()), cfg.references);
    for (const ItemSet& r : a[n].references) EXPECT_LE(static_cast<int>(r.size()), cfg.budget);
  }
}

TEST(ConceptTask, CollectionsRoundTripToExamples) {
  ConceptTaskConfig cfg;
  cfg.collections = 1;
  const auto cols = ConceptTaskCollections(cfg);
  const auto direct = ConceptTaskGenerate(cfg);
  ASSERT_EQ(cols.size(), 1u);
  const Collection back = ParseCollection(CollectionToJson(cols[0]));
  KernelOptions ko;
  const auto examples = ExamplesFromCollection(back, Flavor::kQuery, ko);
  ASSERT_EQ(examples.size(), 1u);
  EXPECT_EQ(examples[0].references, direct[0].references);
  EXPECT_EQ(examples[0].budget, cfg.budget);
  EXPECT_THROW(ExamplesFromCollection(back, Flavor::kUpdate, ko), ConfigError);
}

}  // namespace
}  // namespace submodinfo
