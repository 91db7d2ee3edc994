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

#include "submodinfo/bench.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <utility>

#include "submodinfo/error.h"

namespace submodinfo {

namespace {

double Distance(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

ItemRecord PointItem(const std::string& id, const Point& p) {
  ItemRecord item;
  item.id = id;
  item.features = {p[0], p[1]};
  return item;
}

Point ItemPoint(const ItemRecord& item) { return {item.features.at(0), item.features.at(1)}; }

std::vector<Point> Points(const GroundSet& set) {
  std::vector<Point> out;
  for (const ItemRecord& item : set.items()) out.push_back(ItemPoint(item));
  return out;
}

Flavor StudyFlavor(Study study) {
  switch (study) {
    case Study::kQuery:
      return Flavor::kQuery;
    case Study::kPrivacy:
      return Flavor::kPrivacy;
    case Study::kJoint:
      return Flavor::kQueryPrivacy;
    case Study::kGeneric:
      return Flavor::kGeneric;
  }
  return Flavor::kGeneric;
}

void SetParam(FunctionSpec& spec, const std::string& name, double value) {
  if (name == "eta") {
    spec.eta = value;
  } else if (name == "nu") {
    spec.nu = value;
  } else if (name == "lambda") {
    spec.lambda = value;
  } else {
    throw ConfigError("cannot sweep '" + name + "' (expected eta, nu or lambda)");
  }
}

std::string FormatValue(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

// Synthetic points ----------------------------------------------------------------

SyntheticData SynthGenerate(const SyntheticConfig& config) {
  if (config.points_per_cluster < 0 || !(config.cluster_sigma >= 0.0)) {
    throw ConfigError("invalid synthetic cluster configuration");
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<ItemRecord> items;
  int next = 0;
  for (const Point& c : config.centers) {
    for (int t = 0; t < config.points_per_cluster; ++t) {
      const double dx = noise(rng) * config.cluster_sigma;
      const double dy = noise(rng) * config.cluster_sigma;
      items.push_back(PointItem("v" + std::to_string(next++), {c[0] + dx, c[1] + dy}));
    }
  }
  for (const Point& p : config.outliers) items.push_back(PointItem("v" + std::to_string(next++), p));

  std::vector<ItemRecord> queries, privates;
  for (std::size_t q = 0; q < config.queries.size(); ++q) {
    queries.push_back(PointItem("q" + std::to_string(q), config.queries[q]));
  }
  for (std::size_t p = 0; p < config.privates.size(); ++p) {
    privates.push_back(PointItem("p" + std::to_string(p), config.privates[p]));
  }
  SyntheticData data;
  data.ground = GroundSet(std::move(items), 2);
  data.queries = AuxiliarySet{GroundSet(std::move(queries), 2), AuxRole::kQuery};
  data.privates = AuxiliarySet{GroundSet(std::move(privates), 2), AuxRole::kPrivate};
  return data;
}

Instance SynthInstance(const SyntheticData& data, double rbf_sigma) {
  KernelOptions options;
  options.metric = Metric::kRbf;
  options.rbf_sigma = rbf_sigma;
  const AuxiliarySet aux[] = {data.queries, data.privates};
  return BuildInstance(data.ground, aux, ConceptUniverse(), options);
}

// Behavior metrics ------------------------------------------------------------------

BehaviorReport BehaviorMetrics(const Selection& selection, std::span<const Point> item_points,
                               std::span<const Point> queries, std::span<const Point> privates,
                               double delta, double eps_sat) {
  if (!(delta > 0.0)) throw ConfigError("radius must be positive");
  BehaviorReport report;
  report.query_match_count.assign(queries.size(), 0);
  for (int item : selection.items) {
    if (item < 0 || static_cast<std::size_t>(item) >= item_points.size()) {
      throw ConfigError("selected item has no coordinates");
    }
    const Point& p = item_points[item];
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (Distance(p, queries[q]) <= delta) ++report.query_match_count[q];
    }
    const bool near_private = std::any_of(privates.begin(), privates.end(),
                                          [&](const Point& r) { return Distance(p, r) <= delta; });
    if (near_private) ++report.privacy_violations;
  }
  if (!report.query_match_count.empty()) {
    report.fairness =
        *std::min_element(report.query_match_count.begin(), report.query_match_count.end());
  }
  if (!selection.gains.empty()) {
    report.eps_sat = eps_sat > 0.0 ? eps_sat : 1e-3 * selection.gains.front();
    for (std::size_t t = 0; t < selection.gains.size(); ++t) {
      if (selection.gains[t] < report.eps_sat) {
        report.saturation_step = static_cast<int>(t) + 1;
        break;
      }
    }
  }
  return report;
}

nlohmann::json ReportToJson(const BehaviorReport& report) {
  nlohmann::json j{{"query_match_count", report.query_match_count},
                   {"fairness", report.fairness},
                   {"privacy_violations", report.privacy_violations},
                   {"eps_sat", report.eps_sat}};
  j["saturation_step"] =
      report.saturation_step ? nlohmann::json(*report.saturation_step) : nlohmann::json();
  return j;
}

// Studies -----------------------------------------------------------------------------

const char* StudyName(Study study) {
  switch (study) {
    case Study::kQuery:
      return "query";
    case Study::kPrivacy:
      return "privacy";
    case Study::kJoint:
      return "joint";
    case Study::kGeneric:
      return "generic";
  }
  return "unknown";
}

Study ParseStudy(const std::string& name) {
  if (name == "query") return Study::kQuery;
  if (name == "privacy") return Study::kPrivacy;
  if (name == "joint") return Study::kJoint;
  if (name == "generic") return Study::kGeneric;
  throw ConfigError("unknown study '" + name + "'");
}

std::vector<Family> StudyFamilies(Study study) {
  switch (study) {
    case Study::kQuery:
      return {Family::kFacilityLocation1, Family::kFacilityLocation2, Family::kGraphCut,
              Family::kLogDet, Family::kConcaveOverModular};
    case Study::kPrivacy:
      return {Family::kFacilityLocation1, Family::kGraphCut, Family::kLogDet};
    case Study::kJoint:
      return {Family::kFacilityLocation1, Family::kLogDet};
    case Study::kGeneric:
      return {Family::kFacilityLocation1, Family::kGraphCut, Family::kLogDet,
              Family::kDisparitySum};
  }
  return {};
}

StudyResult RunStudy(const StudyConfig& config) {
  const SyntheticData data = SynthGenerate(config.data);
  const Instance instance = SynthInstance(data, config.data.rbf_sigma);
  StudyResult result;
  result.item_points = Points(data.ground);
  result.query_points = Points(data.queries.items);
  result.private_points = Points(data.privates.items);

  const int g = instance.ground_size;
  const int nq = static_cast<int>(data.queries.items.size());
  const int np = static_cast<int>(data.privates.items.size());
  FlavorSets sets;
  sets.query = ItemSet();
  sets.privates = ItemSet();
  for (int q = 0; q < nq; ++q) sets.query->push_back(g + q);
  for (int p = 0; p < np; ++p) sets.privates->push_back(g + nq + p);

  const Flavor flavor = StudyFlavor(config.study);
  const std::vector<Family> families =
      config.families.empty() ? StudyFamilies(config.study) : config.families;
  std::vector<std::optional<double>> values;
  if (config.sweep_param.empty() || config.sweep_values.empty()) {
    values.push_back(std::nullopt);
  } else {
    for (double v : config.sweep_values) values.push_back(v);
  }

  for (Family family : families) {
    for (const auto& value : values) {
      StudyRun run;
      run.spec.family = family;
      run.mode = FlavorMode(flavor);
      run.label = MeasureLabel(family, run.mode);
      if (value) {
        SetParam(run.spec, config.sweep_param, *value);
        run.label += "@" + config.sweep_param + "=" + FormatValue(*value);
      }
      run.selection = MasterSolve(flavor, run.spec, sets, config.budget, instance);
      run.report = BehaviorMetrics(run.selection, result.item_points, result.query_points,
                                   result.private_points, config.delta);
      result.runs.push_back(std::move(run));
    }
  }
  return result;
}

std::string StudyCsv(const StudyResult& result) {
  std::ostringstream out;
  out.precision(10);
  out << "run,x,y,role,pick_order\n";
  for (const StudyRun& run : result.runs) {
    std::map<int, int> order;
    for (std::size_t t = 0; t < run.selection.items.size(); ++t) {
      order[run.selection.items[t]] = static_cast<int>(t) + 1;
    }
    for (std::size_t i = 0; i < result.item_points.size(); ++i) {
      const Point& p = result.item_points[i];
      out << run.label << ',' << p[0] << ',' << p[1] << ',';
      auto it = order.find(static_cast<int>(i));
      if (it == order.end()) {
        out << "data,\n";
      } else {
        out << "selected," << it->second << '\n';
      }
    }
    for (const Point& p : result.query_points) {
      out << run.label << ',' << p[0] << ',' << p[1] << ",query,\n";
    }
    for (const Point& p : result.private_points) {
      out << run.label << ',' << p[0] << ',' << p[1] << ",private,\n";
    }
  }
  return out.str();
}

nlohmann::json StudyJson(const StudyResult& result) {
  nlohmann::json runs = nlohmann::json::array();
  for (const StudyRun& run : result.runs) {
    std::vector<std::string> ids;
    for (int e : run.selection.items) ids.push_back("v" + std::to_string(e));
    runs.push_back({{"label", run.label},
                    {"mode", ModeName(run.mode)},
                    {"spec", SpecToJson(run.spec)},
                    {"selection",
                     {{"items", ids}, {"gains", run.selection.gains}, {"value", run.selection.value}}},
                    {"report", ReportToJson(run.report)}});
  }
  return nlohmann::json{{"runs", runs}};
}

// Concept collections for learning ----------------------------------------------------

std::vector<MixtureComponent> ConceptTaskComponents() {
  std::vector<MixtureComponent> out;
  FunctionSpec fl;
  fl.family = Family::kFacilityLocation1;
  out.push_back({fl, std::nullopt});
  FunctionSpec gc;
  gc.family = Family::kGraphCut;
  out.push_back({gc, std::nullopt});
  FunctionSpec com;
  com.family = Family::kConcaveOverModular;
  out.push_back({com, std::nullopt});
  FunctionSpec sc;
  sc.family = Family::kSetCover;
  out.push_back({sc, std::nullopt});
  out.push_back({fl, MeasureMode::kBase});
  FunctionSpec dsum;
  dsum.family = Family::kDisparitySum;
  out.push_back({dsum, MeasureMode::kBase});
  return out;
}

namespace {

// Hidden preference behind the generated references: query relevance plus
// representation plus a little diversity.
constexpr double kHiddenWeights[] = {1.0, 0.0, 0.0, 0.0, 1.0, 0.2};

Collection ConceptCollection(const ConceptTaskConfig& config, int index, std::mt19937_64& rng) {
  const int c = config.concepts;
  const int topics = std::max(1, config.topics);
  std::vector<std::string> names;
  for (int k = 0; k < c; ++k) names.push_back("c" + std::to_string(k));
  Collection col;
  col.name = "synthetic-" + std::to_string(index);
  col.universe = ConceptUniverse(names);
  col.budget = config.budget;

  // Topic t owns concepts {t, t + topics, t + 2 topics, ...}.
  std::uniform_int_distribution<int> topic_dist(0, topics - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> concept_dist(0, c - 1);
  std::vector<ItemRecord> items;
  for (int i = 0; i < config.items; ++i) {
    const int t = topic_dist(rng);
    ItemRecord item;
    item.id = col.name + "-i" + std::to_string(i);
    for (int k = t; k < c; k += topics) {
      if (unit(rng) < 0.6) item.concepts[names[k]] = 1 + static_cast<int>(unit(rng) < 0.3);
    }
    if (unit(rng) < 0.4) item.concepts[names[concept_dist(rng)]] += 1;
    if (item.concepts.empty()) item.concepts[names[t]] = 1;
    int max_count = 0;
    for (const auto& [name, n] : item.concepts) max_count = std::max(max_count, n);
    item.features.assign(c, 0.0);
    for (const auto& [name, n] : item.concepts) {
      item.features[col.universe.IndexOf(name)] = static_cast<double>(n) / max_count;
    }
    items.push_back(std::move(item));
  }
  col.ground = GroundSet(std::move(items), c);

  const int qt = topic_dist(rng);
  std::vector<std::string> owned;
  for (int k = qt; k < c; k += topics) owned.push_back(names[k]);
  std::shuffle(owned.begin(), owned.end(), rng);
  owned.resize(std::min<std::size_t>(2, owned.size()));
  std::vector<ItemRecord> queries{MakeConceptItem(col.name + "-q0", owned, col.universe)};
  col.queries = AuxiliarySet{GroundSet(std::move(queries), c), AuxRole::kQuery};

  // References: greedy summaries under perturbed hidden weights.
  const Instance instance = [&] {
    const AuxiliarySet aux[] = {col.queries, col.privates};
    return BuildInstance(col.ground, aux, col.universe, KernelOptions{});
  }();
  TrainingExample ex;
  ex.instance = std::make_shared<Instance>(instance);
  ex.sets.query = ItemSet{config.items};
  ex.budget = config.budget;
  ex.references.push_back({});
  MixtureModel hidden;
  hidden.task = Flavor::kQuery;
  hidden.components = ConceptTaskComponents();
  std::uniform_real_distribution<double> jitter(0.7, 1.3);
  for (int r = 0; r < config.references; ++r) {
    hidden.weights.clear();
    for (double w : kHiddenWeights) hidden.weights.push_back(w * jitter(rng));
    const ItemSet summary = Summarize(hidden, ex);
    ReferenceSummary ref;
    ref.id = col.name + "-r" + std::to_string(r);
    ref.task = "query";
    ref.query = col.name + "-q0";
    for (int e : summary) ref.items.push_back(col.ground.at(e).id);
    col.references.push_back(std::move(ref));
  }
  return col;
}

}  // namespace

std::vector<Collection> ConceptTaskCollections(const ConceptTaskConfig& config) {
  if (config.collections < 1 || config.items < 1 || config.concepts < 1 || config.budget < 0 ||
      config.budget > config.items) {
    throw ConfigError("invalid concept task configuration");
  }
  std::mt19937_64 rng(config.seed);
  std::vector<Collection> out;
  for (int i = 0; i < config.collections; ++i) out.push_back(ConceptCollection(config, i, rng));
  return out;
}

std::vector<TrainingExample> ExamplesFromCollection(const Collection& collection, Flavor task,
                                                    const KernelOptions& options,
                                                    int default_budget) {
  if (task == Flavor::kUpdate) {
    throw ConfigError("update examples need a previous summary, which collections do not carry");
  }
  const AuxiliarySet aux[] = {collection.queries, collection.privates};
  auto instance = std::make_shared<const Instance>(
      BuildInstance(collection.ground, aux, collection.universe, options));
  const int g = instance->ground_size;
  const int nq = static_cast<int>(collection.queries.items.size());
  const int np = static_cast<int>(collection.privates.items.size());

  auto lookup = [](const GroundSet& set, const std::string& id, int offset) {
    const auto index = set.IndexOf(id);
    if (!index) throw LookupError("unknown auxiliary id '" + id + "'");
    return offset + static_cast<int>(*index);
  };

  std::map<std::pair<std::string, std::string>, std::size_t> groups;
  std::vector<TrainingExample> out;
  for (const ReferenceSummary& ref : collection.references) {
    if (ParseFlavor(ref.task.empty() ? "generic" : ref.task) != task) continue;
    const std::pair<std::string, std::string> key{ref.query.value_or(""),
                                                  ref.private_id.value_or("")};
    auto [it, inserted] = groups.emplace(key, out.size());
    if (inserted) {
      TrainingExample ex;
      ex.name = collection.name;
      if (!key.first.empty()) ex.name += "/" + key.first;
      if (!key.second.empty()) ex.name += "/" + key.second;
      ex.instance = instance;
      ex.budget = collection.budget.value_or(default_budget);
      if (FlavorNeedsQuery(task)) {
        ex.sets.query = ItemSet();
        if (ref.query) {
          ex.sets.query->push_back(lookup(collection.queries.items, *ref.query, g));
        } else {
          for (int q = 0; q < nq; ++q) ex.sets.query->push_back(g + q);
        }
      }
      if (FlavorNeedsPrivate(task)) {
        ex.sets.privates = ItemSet();
        if (ref.private_id) {
          ex.sets.privates->push_back(lookup(collection.privates.items, *ref.private_id, g + nq));
        } else {
          for (int p = 0; p < np; ++p) ex.sets.privates->push_back(g + nq + p);
        }
      }
      out.push_back(std::move(ex));
    }
    TrainingExample& ex = out[it->second];
    ItemSet items;
    for (const std::string& id : ref.items) {
      const auto index = collection.ground.IndexOf(id);
      if (!index) throw ConfigError("reference '" + ref.id + "' names unknown item '" + id + "'");
      items.push_back(static_cast<int>(*index));
    }
    ex.budget = std::max<int>(ex.budget, static_cast<int>(items.size()));
    ex.references.push_back(std::move(items));
  }
  for (const TrainingExample& ex : out) ValidateExample(ex);
  return out;
}

std::vector<TrainingExample> ConceptTaskGenerate(const ConceptTaskConfig& config) {
  std::vector<TrainingExample> out;
  for (const Collection& col : ConceptTaskCollections(config)) {
    for (TrainingExample& ex : ExamplesFromCollection(col, Flavor::kQuery, KernelOptions{})) {
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace submodinfo
