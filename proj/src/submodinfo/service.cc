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

#include "submodinfo/service.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "submodinfo/bench.h"
#include "submodinfo/error.h"
#include "submodinfo/functions.h"
#include "submodinfo/metrics.h"
#include "submodinfo/optimizer.h"
#include "submodinfo/oracle_suite.h"

namespace submodinfo {

using nlohmann::json;

namespace {

std::vector<std::string> StringList(const json& request, const char* key) {
  std::vector<std::string> out;
  if (!request.contains(key) || request.at(key).is_null()) return out;
  const json& v = request.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
  for (const json& e : v) {
    if (!e.is_string()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = Trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

int IntField(const json& request, const char* key, int fallback) {
  if (!request.contains(key) || request.at(key).is_null()) return fallback;
  if (!request.at(key).is_number_integer()) {
    throw ConfigError(std::string("'") + key + "' must be an integer");
  }
  return request.at(key).get<int>();
}

double NumberField(const json& request, const char* key, double fallback) {
  if (!request.contains(key) || request.at(key).is_null()) return fallback;
  if (!request.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return request.at(key).get<double>();
}

bool BoolField(const json& request, const char* key, bool fallback) {
  if (!request.contains(key) || request.at(key).is_null()) return fallback;
  if (!request.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be a bool");
  return request.at(key).get<bool>();
}

std::string StringField(const json& request, const char* key, const std::string& fallback) {
  if (!request.contains(key) || request.at(key).is_null()) return fallback;
  if (!request.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return request.at(key).get<std::string>();
}

// Collection plus the instance built over it and id lookups into Omega.
struct Resolved {
  Collection collection;
  std::shared_ptr<const Instance> instance;

  int Ground(const std::string& id) const {
    const auto i = collection.ground.IndexOf(id);
    if (!i) throw LookupError("unknown item id '" + id + "'");
    return static_cast<int>(*i);
  }
  int Query(const std::string& id) const {
    const auto i = collection.queries.items.IndexOf(id);
    if (!i) throw LookupError("unknown query id '" + id + "'");
    return instance->ground_size + static_cast<int>(*i);
  }
  int Private(const std::string& id) const {
    const auto i = collection.privates.items.IndexOf(id);
    if (!i) throw LookupError("unknown private id '" + id + "'");
    return instance->ground_size + static_cast<int>(collection.queries.items.size() + *i);
  }
};

// Query entries that are not query ids become concept queries appended to
// the collection's query set.
Resolved Resolve(const Collection& collection, const json& request, ItemSet* query_out) {
  Resolved r;
  r.collection = collection;
  std::vector<std::string> query_ids;
  std::vector<ItemRecord> added;
  for (const std::string& entry : StringList(request, "query")) {
    if (collection.queries.items.IndexOf(entry)) {
      query_ids.push_back(entry);
      continue;
    }
    if (collection.universe.empty()) {
      throw LookupError("unknown query id '" + entry + "' and the collection has no concepts");
    }
    const std::vector<std::string> concepts = SplitComma(entry);
    if (concepts.empty()) throw ConfigError("empty query");
    const std::string id = "query:" + entry;
    if (std::none_of(added.begin(), added.end(), [&](const ItemRecord& i) { return i.id == id; })) {
      added.push_back(MakeConceptItem(id, concepts, collection.universe));
    }
    query_ids.push_back(id);
  }
  if (!added.empty()) {
    std::vector<ItemRecord> items = collection.queries.items.items();
    for (ItemRecord& item : added) items.push_back(std::move(item));
    r.collection.queries.items = GroundSet(std::move(items), collection.ground.universe_size());
  }
  const AuxiliarySet aux[] = {r.collection.queries, r.collection.privates};
  r.instance = std::make_shared<const Instance>(BuildInstance(
      r.collection.ground, aux, r.collection.universe, KernelOptionsFromJson(request)));
  if (query_out) {
    query_out->clear();
    for (const std::string& id : query_ids) query_out->push_back(r.Query(id));
  }
  return r;
}

std::vector<std::string> Ids(const Resolved& r, std::span<const int> items) {
  std::vector<std::string> out;
  for (int e : items) out.push_back(r.collection.ground.at(e).id);
  return out;
}

Flavor TaskOf(const json& request, const char* key, const std::string& fallback) {
  return ParseFlavor(StringField(request, key, fallback));
}

}  // namespace

KernelOptions KernelOptionsFromJson(const json& request) {
  KernelOptions options;
  if (!request.contains("kernel") || request.at("kernel").is_null()) return options;
  const json& k = request.at("kernel");
  if (!k.is_object()) throw ConfigError("'kernel' must be an object");
  if (k.contains("metric")) options.metric = ParseMetric(k.at("metric").get<std::string>());
  options.rbf_sigma = NumberField(k, "rbf_sigma", options.rbf_sigma);
  options.jitter = NumberField(k, "jitter", options.jitter);
  options.strict_zero_vectors = BoolField(k, "strict_zero_vectors", options.strict_zero_vectors);
  return options;
}

FunctionSpec SpecFromRequest(const json& value) {
  if (value.is_string()) return ParseSpecText(value.get<std::string>());
  if (value.is_object()) return SpecFromJson(value);
  throw ConfigError("function spec must be a string or an object");
}

// Summarize -----------------------------------------------------------------------------

json HandleSummarize(const Collection& collection, const json& request) {
  const Flavor flavor = TaskOf(request, "flavor", "generic");
  if (!request.contains("fn")) throw ConfigError("summarize needs a function spec");
  const FunctionSpec spec = SpecFromRequest(request.at("fn"));
  const int budget = IntField(request, "budget", collection.budget.value_or(-1));
  if (budget < 0) throw ConfigError("summarize needs a budget");

  ItemSet query;
  const Resolved r = Resolve(collection, request, &query);
  FlavorSets sets;
  if (request.contains("query") && !request.at("query").is_null()) sets.query = query;
  if (request.contains("privates") && !request.at("privates").is_null()) {
    sets.privates = ItemSet();
    for (const std::string& id : StringList(request, "privates")) {
      sets.privates->push_back(r.Private(id));
    }
  }
  if (request.contains("previous") && !request.at("previous").is_null()) {
    sets.previous = ItemSet();
    for (const std::string& id : StringList(request, "previous")) {
      sets.previous->push_back(r.Ground(id));
    }
  }
  GreedyOptions options;
  options.lazy = BoolField(request, "lazy", true);
  options.stop_on_nonpositive = BoolField(request, "stop_on_nonpositive", false);
  options.threads = IntField(request, "threads", 0);
  const Selection sel = MasterSolve(flavor, spec, sets, budget, *r.instance, options);
  const MeasureMode mode = FlavorMode(flavor);
  return json{{"collection", collection.name},
              {"flavor", FlavorName(flavor)},
              {"measure", MeasureLabel(spec.family, mode)},
              {"function", SpecToJson(spec)},
              {"budget", budget},
              {"items", Ids(r, sel.items)},
              {"gains", sel.gains},
              {"value", sel.value}};
}

json HandleMeasure(const Collection& collection, const json& request) {
  if (!request.contains("fn")) throw ConfigError("measure needs a function spec");
  Measure m;
  m.spec = SpecFromRequest(request.at("fn"));
  m.mode = ParseMode(StringField(request, "mode", "base"));
  const Resolved r = Resolve(collection, request, &m.query);
  for (const std::string& id : StringList(request, "privates")) {
    m.conditioning.push_back(r.Private(id));
  }
  for (const std::string& id : StringList(request, "previous")) {
    m.conditioning.push_back(r.Ground(id));
  }
  ItemSet items;
  for (const std::string& id : StringList(request, "items")) items.push_back(r.Ground(id));
  return json{{"measure", MeasureLabel(m.spec.family, m.mode)},
              {"value", Evaluate(m, items, *r.instance)}};
}

// Evaluate -------------------------------------------------------------------------------

json HandleEvaluate(const Collection& collection, const json& request) {
  const Resolved r = Resolve(collection, json::object(), nullptr);
  ItemSet summary;
  for (const std::string& id : StringList(request, "summary")) summary.push_back(r.Ground(id));
  std::vector<ItemSet> refs;
  std::vector<std::string> names;
  if (request.contains("references") && !request.at("references").is_null()) {
    const json& list = request.at("references");
    if (!list.is_array()) throw ConfigError("'references' must be a list of id lists");
    for (std::size_t i = 0; i < list.size(); ++i) {
      ItemSet ref;
      json wrapper{{"items", list[i]}};
      for (const std::string& id : StringList(wrapper, "items")) ref.push_back(r.Ground(id));
      refs.push_back(std::move(ref));
      names.push_back("reference" + std::to_string(i));
    }
  } else {
    for (const ReferenceSummary& ref : collection.references) {
      ItemSet items;
      for (const std::string& id : ref.items) items.push_back(r.Ground(id));
      refs.push_back(std::move(items));
      names.push_back(ref.id);
    }
  }
  const VRougeResult total = VRouge(summary, refs, *r.instance);
  json per = json::array();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::vector<double> cr = ConceptCounts(*r.instance, refs[i]);
    const double self = RougeQ(cr, cr, r.instance->concept_weights);
    json entry{{"reference", names[i]}};
    if (self > 0.0) {
      entry["score"] = RougeQ(ConceptCounts(*r.instance, summary), cr,
                              r.instance->concept_weights) / self;
    } else {
      entry["score"] = nullptr;
      entry["skipped"] = true;
    }
    per.push_back(entry);
  }
  return json{{"collection", collection.name},
              {"summary", Ids(r, summary)},
              {"vrouge", total.value},
              {"skipped_references", total.skipped},
              {"per_reference", per}};
}

// Learn ------------------------------------------------------------------------------------

std::vector<MixtureComponent> DefaultComponents(Flavor task) {
  auto spec = [](Family f) {
    FunctionSpec s;
    s.family = f;
    return s;
  };
  const MixtureComponent diversity{spec(Family::kDisparitySum), MeasureMode::kBase};
  const MixtureComponent representation{spec(Family::kFacilityLocation1), MeasureMode::kBase};
  switch (FlavorMode(task)) {
    case MeasureMode::kSmi:
      return ConceptTaskComponents();
    case MeasureMode::kCg:
      return {{spec(Family::kFacilityLocation1), std::nullopt},
              {spec(Family::kGraphCut), std::nullopt},
              {spec(Family::kSetCover), std::nullopt},
              diversity};
    case MeasureMode::kCsmi:
      return {{spec(Family::kFacilityLocation1), std::nullopt},
              {spec(Family::kSetCover), std::nullopt},
              {spec(Family::kProbSetCover), std::nullopt},
              representation,
              diversity};
    case MeasureMode::kBase:
      break;
  }
  return {{spec(Family::kFacilityLocation1), std::nullopt},
          {spec(Family::kGraphCut), std::nullopt},
          {spec(Family::kSetCover), std::nullopt},
          diversity};
}

std::vector<Collection> LoadCollectionDir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + dir + ": " + ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<Collection> out;
  for (const fs::path& p : paths) {
    if (p.filename().string().ends_with(".manifest.json")) continue;
    out.push_back(LoadCollection(p.string()));
  }
  if (out.empty()) throw ConfigError("no collection documents in " + dir);
  return out;
}

json HandleLearn(const json& request) {
  const Flavor task = TaskOf(request, "task", "generic");
  std::vector<Collection> collections;
  if (request.contains("collections")) {
    for (const json& doc : request.at("collections")) collections.push_back(ParseCollection(doc));
  } else {
    collections = LoadCollectionDir(StringField(request, "train_dir", ""));
  }
  const KernelOptions kernel = KernelOptionsFromJson(request);
  const int budget = IntField(request, "budget", 5);
  std::vector<TrainingExample> dataset;
  for (const Collection& c : collections) {
    for (TrainingExample& ex : ExamplesFromCollection(c, task, kernel, budget)) {
      dataset.push_back(std::move(ex));
    }
  }
  if (dataset.empty()) {
    throw ConfigError(std::string("no references for task '") + FlavorName(task) + "'");
  }

  std::vector<MixtureComponent> components;
  if (request.contains("components") && !request.at("components").is_null()) {
    for (const json& c : request.at("components")) {
      MixtureComponent comp;
      if (c.is_object() && c.contains("spec")) {
        comp.spec = SpecFromRequest(c.at("spec"));
        if (c.contains("mode")) comp.mode = ParseMode(c.at("mode").get<std::string>());
      } else {
        comp.spec = SpecFromRequest(c);
      }
      components.push_back(comp);
    }
  } else {
    components = DefaultComponents(task);
  }

  TrainConfig config;
  config.epochs = IntField(request, "epochs", config.epochs);
  config.learning_rate = NumberField(request, "learning_rate", config.learning_rate);
  config.momentum = NumberField(request, "momentum", config.momentum);
  config.margin = ParseMargin(StringField(request, "margin", MarginName(config.margin)));
  config.exact_inference = BoolField(request, "exact_inference", false);
  config.threads = IntField(request, "threads", 0);
  ValidateConfig(config);
  const std::uint64_t seed = request.value("seed", std::uint64_t{0});
  const MixtureModel initial = InitModel(std::move(components), task, seed,
                                         NumberField(request, "reg_strength", 1e-3));
  const TrainResult result = Train(dataset, initial, config);

  json trace = json::array();
  for (const TrainRecord& rec : result.trace) {
    trace.push_back({{"epoch", rec.epoch},
                     {"objective", rec.objective},
                     {"hinge", rec.hinge},
                     {"vrouge", rec.vrouge}});
  }
  return json{{"model", ModelToJson(result.model)},
              {"trace", trace},
              {"examples", dataset.size()},
              {"initial_objective", result.initial_objective},
              {"best_objective", result.best_objective}};
}

// Synthetic studies -------------------------------------------------------------------------

json HandleSynth(const json& request) {
  StudyConfig config;
  config.study = ParseStudy(StringField(request, "study", "query"));
  config.data.seed = request.value("seed", config.data.seed);
  config.budget = IntField(request, "budget", config.budget);
  config.delta = NumberField(request, "delta", config.delta);
  const std::string sweep = StringField(request, "sweep", "");
  if (!sweep.empty()) {
    const auto eq = sweep.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep must look like PARAM=v1,v2,...");
    config.sweep_param = Trim(sweep.substr(0, eq));
    for (const std::string& v : SplitComma(sweep.substr(eq + 1))) {
      try {
        std::size_t used = 0;
        config.sweep_values.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ConfigError("bad sweep value '" + v + "'");
      }
    }
    if (config.sweep_values.empty()) throw ConfigError("sweep has no values");
  }
  for (const std::string& f : StringList(request, "families")) {
    config.families.push_back(ParseFamily(f));
  }
  const StudyResult result = RunStudy(config);
  json report = StudyJson(result);
  report["study"] = StudyName(config.study);
  report["seed"] = config.data.seed;
  report["budget"] = config.budget;
  report["delta"] = config.delta;
  return json{{"csv", StudyCsv(result)}, {"report", report}};
}

json HandleCheckOracle(const json& request) {
  const SuiteReport report = OracleSuite(request.value("seed", std::uint64_t{20260101}));
  return SuiteToJson(report);
}

}  // namespace submodinfo
