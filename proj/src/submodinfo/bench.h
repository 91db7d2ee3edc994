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

// Synthetic instances and behavior metrics for qualitative studies.

#ifndef SUBMODINFO_BENCH_H_
#define SUBMODINFO_BENCH_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "submodinfo/core_data.h"
#include "submodinfo/instance.h"
#include "submodinfo/learning.h"
#include "submodinfo/optimizer.h"

namespace submodinfo {

using Point = std::array<double, 2>;

struct SyntheticConfig {
  std::vector<Point> centers{{0.0, 0.0}, {6.0, 0.0}, {0.0, 6.0}, {6.0, 6.0}};
  double cluster_sigma = 0.6;
  int points_per_cluster = 25;
  std::vector<Point> outliers{{3.0, 10.0}, {10.0, 3.0}};
  // One query at a cluster center, one next to an outlier.
  std::vector<Point> queries{{6.0, 6.0}, {10.8, 3.4}};
  std::vector<Point> privates{{0.0, 6.0}};
  double rbf_sigma = 1.0;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  GroundSet ground;
  AuxiliarySet queries{{}, AuxRole::kQuery};
  AuxiliarySet privates{{}, AuxRole::kPrivate};
};

// Ground items are the clusters in order followed by the outliers.
// Deterministic for a given config.
SyntheticData SynthGenerate(const SyntheticConfig& config);

// Instance over V, the queries and the privates (in that order) under an RBF
// kernel.
Instance SynthInstance(const SyntheticData& data, double rbf_sigma);

struct BehaviorReport {
  std::vector<int> query_match_count;
  int fairness = 0;
  // 1-based step whose gain first falls below eps_sat.
  std::optional<int> saturation_step;
  int privacy_violations = 0;
  double eps_sat = 0.0;
};

// eps_sat <= 0 selects 1e-3 times the first gain. Gains are read from the
// selection.
BehaviorReport BehaviorMetrics(const Selection& selection, std::span<const Point> item_points,
                               std::span<const Point> queries, std::span<const Point> privates,
                               double delta = 1.0, double eps_sat = 0.0);

nlohmann::json ReportToJson(const BehaviorReport& report);

enum class Study { kQuery, kPrivacy, kJoint, kGeneric };

const char* StudyName(Study study);
Study ParseStudy(const std::string& name);

struct StudyConfig {
  Study study = Study::kQuery;
  SyntheticConfig data;
  int budget = 10;
  double delta = 1.0;
  // "eta", "nu" or "lambda"; empty runs each family once at its defaults.
  std::string sweep_param;
  std::vector<double> sweep_values;
  // Families to run; empty picks the study's default set.
  std::vector<Family> families;
};

struct StudyRun {
  std::string label;
  FunctionSpec spec;
  MeasureMode mode = MeasureMode::kBase;
  Selection selection;
  BehaviorReport report;
};

struct StudyResult {
  std::vector<StudyRun> runs;
  std::vector<Point> item_points;
  std::vector<Point> query_points;
  std::vector<Point> private_points;
};

// Default family list of a study.
std::vector<Family> StudyFamilies(Study study);

// Builds the instance once and runs every (family, sweep value) pair.
StudyResult RunStudy(const StudyConfig& config);

// Plot data: run,x,y,role,pick_order with role in {data, query, private,
// selected}.
std::string StudyCsv(const StudyResult& result);
nlohmann::json StudyJson(const StudyResult& result);

// Synthetic concept collections for learning experiments. Each collection
// has topic-structured items, one two-concept query and references drawn
// from a hidden mixture.
struct ConceptTaskConfig {
  int collections = 6;
  int items = 30;
  int concepts = 12;
  int topics = 4;
  int budget = 5;
  int references = 2;
  std::uint64_t seed = 11;
};

// The components used both to generate references and to learn from them.
std::vector<MixtureComponent> ConceptTaskComponents();

std::vector<TrainingExample> ConceptTaskGenerate(const ConceptTaskConfig& config);

// The same data as collection documents, for the file-based pipeline.
std::vector<Collection> ConceptTaskCollections(const ConceptTaskConfig& config);

// Training examples of one collection for a task. References whose task
// matches are grouped by their (query, private) pair; a reference without a
// query or private id uses every query or private of the collection. The
// budget is the collection's, else `default_budget`, raised to fit the
// largest reference.
std::vector<TrainingExample> ExamplesFromCollection(const Collection& collection, Flavor task,
                                                    const KernelOptions& options,
                                                    int default_budget = 5);

}  // namespace submodinfo

#endif  // SUBMODINFO_BENCH_H_
