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

#include "submodinfo/core_data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "submodinfo/error.h"

namespace submodinfo {

using nlohmann::json;

GroundSet::GroundSet(std::vector<ItemRecord> items, int universe_size)
    : items_(std::move(items)), universe_size_(universe_size) {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!index_.emplace(items_[i].id, i).second) {
      throw FormatError("duplicate item id '" + items_[i].id + "'");
    }
  }
}

std::optional<std::size_t> GroundSet::IndexOf(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GroundSet::Validate() const {
  for (const ItemRecord& item : items_) {
    if (item.features.empty() && item.concepts.empty()) {
      throw FormatError("item '" + item.id + "' has neither features nor concepts");
    }
    if (!item.features.empty() &&
        static_cast<int>(item.features.size()) != universe_size_) {
      throw FormatError("item '" + item.id + "' has feature dimension " +
                        std::to_string(item.features.size()) + ", expected " +
                        std::to_string(universe_size_));
    }
    for (const auto& [concept_id, count] : item.concepts) {
      if (count < 0) {
        throw FormatError("item '" + item.id + "' has negative count for '" +
                          concept_id + "'");
      }
    }
    for (const auto& [concept_id, p] : item.probabilities) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw FormatError("item '" + item.id + "' has probability outside [0,1] for '" +
                          concept_id + "'");
      }
    }
  }
}

const char* AuxRoleName(AuxRole role) {
  switch (role) {
    case AuxRole::kQuery:
      return "query";
    case AuxRole::kPrivate:
      return "private";
    case AuxRole::kPreviousSummary:
      return "previous_summary";
  }
  return "unknown";
}

ConceptUniverse::ConceptUniverse(std::vector<std::string> concepts,
                                 std::vector<double> weights)
    : concepts_(std::move(concepts)), weights_(std::move(weights)) {
  if (weights_.empty()) weights_.assign(concepts_.size(), 1.0);
  if (weights_.size() != concepts_.size()) {
    throw FormatError("concept weight count does not match concept count");
  }
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) {
      throw FormatError("negative weight for concept '" + concepts_[i] + "'");
    }
    if (!index_.emplace(concepts_[i], static_cast<int>(i)).second) {
      throw FormatError("duplicate concept id '" + concepts_[i] + "'");
    }
  }
}

std::optional<int> ConceptUniverse::Find(const std::string& concept_id) const {
  auto it = index_.find(concept_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ConceptUniverse::IndexOf(const std::string& concept_id) const {
  auto found = Find(concept_id);
  if (!found) throw LookupError("unknown concept '" + concept_id + "'");
  return *found;
}

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ParseJsonText(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(origin + ": " + e.what());
  }
}

int ParseCount(const json& value, const std::string& item_id) {
  if (value.is_number_integer()) {
    long long count = value.get<long long>();
    if (count < 0) {
      throw FormatError("item '" + item_id + "' has a negative concept count");
    }
    return static_cast<int>(count);
  }
  if (value.is_number_float()) {
    double d = value.get<double>();
    if (d >= 0 && std::floor(d) == d) return static_cast<int>(d);
  }
  throw FormatError("item '" + item_id + "' concept counts must be nonnegative integers");
}

ItemRecord ParseItem(const json& record) {
  if (!record.is_object()) throw FormatError("item record must be an object");
  ItemRecord item;
  if (!record.contains("id")) throw FormatError("item record without 'id'");
  const json& id = record.at("id");
  item.id = id.is_string() ? id.get<std::string>() : id.dump();
  if (record.contains("features")) {
    const json& features = record.at("features");
    if (!features.is_array()) {
      throw FormatError("item '" + item.id + "': features must be an array");
    }
    for (const json& x : features) {
      if (!x.is_number()) {
        throw FormatError("item '" + item.id + "': non-numeric feature");
      }
      item.features.push_back(x.get<double>());
    }
  }
  if (record.contains("concepts")) {
    const json& concepts = record.at("concepts");
    if (concepts.is_array()) {
      for (const json& c : concepts) {
        if (!c.is_string()) {
          throw FormatError("item '" + item.id + "': concept ids must be strings");
        }
        item.concepts[c.get<std::string>()] += 1;
      }
    } else if (concepts.is_object()) {
      for (const auto& [name, count] : concepts.items()) {
        item.concepts[name] = ParseCount(count, item.id);
      }
    } else {
      throw FormatError("item '" + item.id + "': concepts must be a list or a map");
    }
  }
  if (record.contains("probabilities")) {
    const json& probs = record.at("probabilities");
    if (!probs.is_object()) {
      throw FormatError("item '" + item.id + "': probabilities must be a map");
    }
    for (const auto& [name, p] : probs.items()) {
      if (!p.is_number()) {
        throw FormatError("item '" + item.id + "': non-numeric probability");
      }
      item.probabilities[name] = p.get<double>();
    }
  }
  if (item.features.empty() && item.concepts.empty()) {
    throw FormatError("item '" + item.id + "' has neither features nor concepts");
  }
  return item;
}

std::vector<ItemRecord> ParseItemArray(const json& array, const char* what) {
  if (!array.is_array()) {
    throw FormatError(std::string("'") + what + "' must be an array");
  }
  std::vector<ItemRecord> items;
  items.reserve(array.size());
  for (const json& record : array) items.push_back(ParseItem(record));
  return items;
}

// Concept ids in first-appearance order across the given record lists.
ConceptUniverse InferUniverse(
    std::initializer_list<const std::vector<ItemRecord>*> lists) {
  std::vector<std::string> order;
  std::unordered_set<std::string> seen;
  for (const auto* list : lists) {
    for (const ItemRecord& item : *list) {
      for (const auto& [name, count] : item.concepts) {
        if (seen.insert(name).second) order.push_back(name);
      }
      for (const auto& [name, p] : item.probabilities) {
        if (seen.insert(name).second) order.push_back(name);
      }
    }
  }
  return ConceptUniverse(std::move(order));
}

int FeatureDimension(std::initializer_list<const std::vector<ItemRecord>*> lists,
                     const ConceptUniverse& universe) {
  std::optional<int> dim;
  for (const auto* list : lists) {
    for (const ItemRecord& item : *list) {
      if (item.features.empty()) continue;
      int d = static_cast<int>(item.features.size());
      if (dim && *dim != d) {
        throw FormatError("feature dimension mismatch at item '" + item.id +
                          "': " + std::to_string(d) + " vs " + std::to_string(*dim));
      }
      dim = d;
    }
  }
  return dim.value_or(static_cast<int>(universe.size()));
}

// Items without features get a count vector over the universe; auxiliary
// concept records get the k-hot embedding instead.
void FillFeatures(std::vector<ItemRecord>& items, const ConceptUniverse& universe,
                  int dim, bool k_hot) {
  for (ItemRecord& item : items) {
    if (!item.features.empty()) continue;
    if (static_cast<int>(universe.size()) != dim) {
      throw FormatError("item '" + item.id +
                        "' has no features and the concept universe size " +
                        std::to_string(universe.size()) +
                        " differs from the feature dimension " + std::to_string(dim));
    }
    item.features.assign(dim, 0.0);
    for (const auto& [name, count] : item.concepts) {
      int c = universe.IndexOf(name);
      item.features[c] = k_hot ? (count > 0 ? 1.0 : 0.0) : static_cast<double>(count);
    }
  }
}

void CheckConceptsKnown(const std::vector<ItemRecord>& items,
                        const ConceptUniverse& universe) {
  for (const ItemRecord& item : items) {
    for (const auto& [name, count] : item.concepts) universe.IndexOf(name);
    for (const auto& [name, p] : item.probabilities) universe.IndexOf(name);
  }
}

}  // namespace

Collection ParseCollection(const json& doc) {
  if (!doc.is_object()) throw FormatError("collection must be a JSON object");
  if (!doc.contains("items")) throw FormatError("collection without 'items'");
  Collection out;
  out.name = doc.value("name", std::string());
  std::vector<ItemRecord> items = ParseItemArray(doc.at("items"), "items");
  std::vector<ItemRecord> queries, privates;
  if (doc.contains("queries")) queries = ParseItemArray(doc.at("queries"), "queries");
  if (doc.contains("privates")) privates = ParseItemArray(doc.at("privates"), "privates");

  if (doc.contains("concepts")) {
    const json& concepts = doc.at("concepts");
    if (!concepts.is_array()) throw FormatError("'concepts' must be an array");
    std::vector<std::string> names;
    std::vector<double> weights;
    bool any_weight = false;
    for (const json& c : concepts) {
      if (c.is_string()) {
        names.push_back(c.get<std::string>());
        weights.push_back(1.0);
      } else if (c.is_object() && c.contains("id")) {
        names.push_back(c.at("id").get<std::string>());
        weights.push_back(c.value("weight", 1.0));
        any_weight = any_weight || c.contains("weight");
      } else {
        throw FormatError("concept entries must be strings or {id, weight}");
      }
    }
    if (doc.contains("concept_weights")) {
      weights = doc.at("concept_weights").get<std::vector<double>>();
    } else if (!any_weight) {
      weights.clear();
    }
    out.universe = ConceptUniverse(std::move(names), std::move(weights));
  } else {
    out.universe = InferUniverse({&items, &queries, &privates});
    if (doc.contains("concept_weights")) {
      out.universe = ConceptUniverse(out.universe.concepts(),
                                     doc.at("concept_weights").get<std::vector<double>>());
    }
  }
  CheckConceptsKnown(items, out.universe);
  CheckConceptsKnown(queries, out.universe);
  CheckConceptsKnown(privates, out.universe);

  int dim = FeatureDimension({&items, &queries, &privates}, out.universe);
  if (dim <= 0) throw FormatError("collection has no features and no concepts");
  FillFeatures(items, out.universe, dim, /*k_hot=*/false);
  FillFeatures(queries, out.universe, dim, /*k_hot=*/true);
  FillFeatures(privates, out.universe, dim, /*k_hot=*/true);

  out.ground = GroundSet(std::move(items), dim);
  out.ground.Validate();
  out.queries = AuxiliarySet{GroundSet(std::move(queries), dim), AuxRole::kQuery};
  out.queries.items.Validate();
  out.privates = AuxiliarySet{GroundSet(std::move(privates), dim), AuxRole::kPrivate};
  out.privates.items.Validate();

  std::unordered_set<std::string> ids;
  for (const GroundSet* set : {&out.ground, &out.queries.items, &out.privates.items}) {
    for (const ItemRecord& item : set->items()) {
      if (!ids.insert(item.id).second) {
        throw FormatError("id '" + item.id + "' is used by more than one record");
      }
    }
  }

  if (doc.contains("references")) {
    const json& refs = doc.at("references");
    if (!refs.is_array()) throw FormatError("'references' must be an array");
    int counter = 0;
    for (const json& r : refs) {
      ReferenceSummary ref;
      if (r.is_array()) {
        ref.items = r.get<std::vector<std::string>>();
      } else if (r.is_object()) {
        ref.id = r.value("id", std::string());
        if (!r.contains("items")) throw FormatError("reference without 'items'");
        ref.items = r.at("items").get<std::vector<std::string>>();
        ref.task = r.value("task", std::string());
        if (r.contains("query")) ref.query = r.at("query").get<std::string>();
        if (r.contains("private")) ref.private_id = r.at("private").get<std::string>();
      } else {
        throw FormatError("reference entries must be arrays or objects");
      }
      if (ref.id.empty()) ref.id = "ref" + std::to_string(counter);
      ++counter;
      for (const std::string& id : ref.items) {
        if (!out.ground.IndexOf(id)) {
          throw FormatError("reference '" + ref.id + "' names unknown item '" + id + "'");
        }
      }
      out.references.push_back(std::move(ref));
    }
  }
  if (doc.contains("budget")) out.budget = doc.at("budget").get<int>();
  return out;
}

namespace {

json ItemToJson(const ItemRecord& item) {
  json j{{"id", item.id}, {"features", item.features}};
  if (!item.concepts.empty()) j["concepts"] = item.concepts;
  if (!item.probabilities.empty()) j["probabilities"] = item.probabilities;
  return j;
}

json ItemsToJson(const GroundSet& set) {
  json out = json::array();
  for (const ItemRecord& item : set.items()) out.push_back(ItemToJson(item));
  return out;
}

}  // namespace

json CollectionToJson(const Collection& collection) {
  json doc;
  doc["name"] = collection.name;
  json concepts = json::array();
  for (std::size_t c = 0; c < collection.universe.size(); ++c) {
    concepts.push_back({{"id", collection.universe.concepts()[c]},
                        {"weight", collection.universe.weights()[c]}});
  }
  doc["concepts"] = concepts;
  doc["items"] = ItemsToJson(collection.ground);
  doc["queries"] = ItemsToJson(collection.queries.items);
  doc["privates"] = ItemsToJson(collection.privates.items);
  json refs = json::array();
  for (const ReferenceSummary& ref : collection.references) {
    json r{{"id", ref.id}, {"items", ref.items}};
    if (!ref.task.empty()) r["task"] = ref.task;
    if (ref.query) r["query"] = *ref.query;
    if (ref.private_id) r["private"] = *ref.private_id;
    refs.push_back(r);
  }
  doc["references"] = refs;
  if (collection.budget) doc["budget"] = *collection.budget;
  return doc;
}

Collection LoadCollection(const std::string& path) {
  return ParseCollection(ParseJsonText(ReadFile(path), path));
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    cells.push_back(start == std::string::npos ? std::string() : cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

GroundSet ParseCsvItems(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(origin + ": empty CSV");
  std::vector<std::string> header = SplitCsvLine(line);
  if (header.empty() || header[0] != "id") {
    throw FormatError(origin + ": CSV header must start with 'id'");
  }
  const int dim = static_cast<int>(header.size()) - 1;
  for (int f = 0; f < dim; ++f) {
    if (header[f + 1] != "f" + std::to_string(f)) {
      throw FormatError(origin + ": expected column 'f" + std::to_string(f) + "'");
    }
  }
  std::vector<ItemRecord> items;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = SplitCsvLine(line);
    if (static_cast<int>(cells.size()) != dim + 1) {
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": dimension mismatch, expected " + std::to_string(dim) +
                        " features");
    }
    ItemRecord item;
    item.id = cells[0];
    for (int f = 0; f < dim; ++f) {
      try {
        std::size_t used = 0;
        item.features.push_back(std::stod(cells[f + 1], &used));
        if (used != cells[f + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw FormatError(origin + ":" + std::to_string(line_no) +
                          ": non-numeric feature '" + cells[f + 1] + "'");
      }
    }
    if (item.features.empty()) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": record without features");
    }
    items.push_back(std::move(item));
  }
  GroundSet ground(std::move(items), dim);
  ground.Validate();
  return ground;
}

}  // namespace

GroundSet LoadItems(const std::string& path, ItemFormat format) {
  std::string text = ReadFile(path);
  if (format == ItemFormat::kCsv) return ParseCsvItems(text, path);
  json doc = ParseJsonText(text, path);
  if (doc.is_array()) doc = json{{"items", doc}};
  return ParseCollection(doc).ground;
}

std::vector<double> EmbedQuery(std::span<const std::string> concepts,
                               const ConceptUniverse& universe) {
  std::vector<double> v(universe.size(), 0.0);
  for (const std::string& c : concepts) v[universe.IndexOf(c)] = 1.0;
  return v;
}

ItemRecord MakeConceptItem(const std::string& id, std::span<const std::string> concepts,
                           const ConceptUniverse& universe) {
  ItemRecord item;
  item.id = id;
  item.features = EmbedQuery(concepts, universe);
  for (const std::string& c : concepts) item.concepts[c] = 1;
  return item;
}

const char* MetricName(Metric metric) {
  switch (metric) {
    case Metric::kCosine:
      return "cosine";
    case Metric::kDot:
      return "dot";
    case Metric::kRbf:
      return "rbf";
  }
  return "unknown";
}

Metric ParseMetric(const std::string& name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "dot") return Metric::kDot;
  if (name == "rbf") return Metric::kRbf;
  throw ConfigError("unknown metric '" + name + "' (expected cosine, dot or rbf)");
}

int SimilarityKernel::Row(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end()) throw LookupError("id '" + id + "' is not in the kernel");
  return it->second;
}

bool SimilarityKernel::IsPositiveDefinite() const {
  Eigen::MatrixXd shifted = matrix;
  shifted.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  return llt.info() == Eigen::Success;
}

SimilarityKernel BuildKernel(const GroundSet& ground, std::span<const AuxiliarySet> aux,
                             const KernelOptions& options) {
  if (options.jitter < 0) throw ConfigError("jitter must be nonnegative");
  if (options.metric == Metric::kRbf && !(options.rbf_sigma > 0)) {
    throw ConfigError("rbf sigma must be positive");
  }
  SimilarityKernel kernel;
  kernel.metric = options.metric;
  kernel.jitter = options.jitter;
  kernel.ground_size = ground.size();

  std::vector<const ItemRecord*> rows;
  for (const ItemRecord& item : ground.items()) rows.push_back(&item);
  for (const AuxiliarySet& set : aux) {
    if (!set.items.empty() && set.items.universe_size() != ground.universe_size()) {
      throw FormatError(std::string("feature dimension of ") + AuxRoleName(set.role) +
                        " set differs from the ground set");
    }
    for (const ItemRecord& item : set.items.items()) rows.push_back(&item);
  }
  const int n = static_cast<int>(rows.size());
  const int dim = ground.universe_size();
  Eigen::MatrixXd x(n, dim);
  for (int r = 0; r < n; ++r) {
    const ItemRecord& item = *rows[r];
    if (static_cast<int>(item.features.size()) != dim) {
      throw FormatError("item '" + item.id + "' has feature dimension " +
                        std::to_string(item.features.size()) + ", expected " +
                        std::to_string(dim));
    }
    for (int c = 0; c < dim; ++c) x(r, c) = item.features[c];
    if (!kernel.index.emplace(item.id, r).second) {
      throw FormatError("id '" + item.id + "' appears in both V and V'");
    }
    kernel.ids.push_back(item.id);
  }

  Eigen::MatrixXd s(n, n);
  switch (options.metric) {
    case Metric::kCosine: {
      Eigen::VectorXd norms = x.rowwise().norm();
      for (int i = 0; i < n; ++i) {
        if (norms(i) == 0.0 && options.strict_zero_vectors) {
          throw DegenerateError("zero feature vector for '" + kernel.ids[i] +
                                "' under cosine similarity");
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double v;
          if (i == j) {
            v = 1.0;
          } else if (norms(i) == 0.0 || norms(j) == 0.0) {
            v = 0.0;
          } else {
            v = std::clamp(x.row(i).dot(x.row(j)) / (norms(i) * norms(j)), -1.0, 1.0);
          }
          s(i, j) = s(j, i) = v;
        }
      }
      break;
    }
    case Metric::kDot:
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) s(i, j) = s(j, i) = x.row(i).dot(x.row(j));
      }
      break;
    case Metric::kRbf: {
      const double denom = 2.0 * options.rbf_sigma * options.rbf_sigma;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          s(i, j) = s(j, i) = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / denom);
        }
      }
      break;
    }
  }
  kernel.matrix = std::move(s);
  return kernel;
}

SimilarityKernel CrossOnlyKernel(const SimilarityKernel& kernel) {
  SimilarityKernel out = kernel;
  const int n = static_cast<int>(kernel.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (kernel.InGround(i) == kernel.InGround(j)) out.matrix(i, j) = i == j ? 1.0 : 0.0;
    }
  }
  return out;
}

std::string KernelToCsv(const SimilarityKernel& kernel) {
  std::ostringstream out;
  out.precision(17);
  out << "id";
  for (const std::string& id : kernel.ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    out << kernel.ids[i];
    for (std::size_t j = 0; j < kernel.size(); ++j) out << ',' << kernel.matrix(i, j);
    out << '\n';
  }
  return out.str();
}

}  // namespace submodinfo
