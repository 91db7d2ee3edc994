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

// Item ingestion and similarity kernels.
//
// A collection consists of the ground set V (items eligible for a summary)
// and auxiliary sets V' (queries, private items, previously seen summaries).
// Kernels are built over Omega = V followed by every auxiliary item, in that
// row order.

#ifndef SUBMODINFO_CORE_DATA_H_
#define SUBMODINFO_CORE_DATA_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace submodinfo {

struct ItemRecord {
  std::string id;
  // Empty when the source record carried no features.
  std::vector<double> features;
  // Concept id -> occurrence count (ROUGE counts, set-cover membership).
  std::map<std::string, int> concepts;
  // Optional explicit coverage probabilities for probabilistic set cover.
  std::map<std::string, double> probabilities;
};

class GroundSet {
 public:
  GroundSet() = default;
  GroundSet(std::vector<ItemRecord> items, int universe_size);

  const std::vector<ItemRecord>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  // Feature dimension L.
  int universe_size() const { return universe_size_; }

  std::optional<std::size_t> IndexOf(const std::string& id) const;
  const ItemRecord& at(std::size_t i) const { return items_.at(i); }

  // Throws FormatError when an invariant is violated.
  void Validate() const;

 private:
  std::vector<ItemRecord> items_;
  int universe_size_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class AuxRole { kQuery, kPrivate, kPreviousSummary };

const char* AuxRoleName(AuxRole role);

struct AuxiliarySet {
  GroundSet items;
  AuxRole role = AuxRole::kQuery;
};

// Concept vocabulary with per-concept weights (default 1).
class ConceptUniverse {
 public:
  ConceptUniverse() = default;
  explicit ConceptUniverse(std::vector<std::string> concepts,
                           std::vector<double> weights = {});

  const std::vector<std::string>& concepts() const { return concepts_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  std::optional<int> Find(const std::string& concept_id) const;
  // Throws LookupError for unknown ids.
  int IndexOf(const std::string& concept_id) const;

 private:
  std::vector<std::string> concepts_;
  std::vector<double> weights_;
  std::unordered_map<std::string, int> index_;
};

struct ReferenceSummary {
  std::string id;
  std::vector<std::string> items;
  // One of generic, query, privacy, joint, update. Empty means generic.
  std::string task;
  std::optional<std::string> query;
  std::optional<std::string> private_id;
};

struct Collection {
  std::string name;
  ConceptUniverse universe;
  GroundSet ground;
  AuxiliarySet queries{{}, AuxRole::kQuery};
  AuxiliarySet privates{{}, AuxRole::kPrivate};
  std::vector<ReferenceSummary> references;
  std::optional<int> budget;
};

enum class ItemFormat { kJson, kCsv };

// Loads a bare item list. JSON: either an array of records or an object
// with an "items" array. CSV: header `id,f0,...,f{L-1}`.
GroundSet LoadItems(const std::string& path, ItemFormat format);

// Loads a full collection document with `items`, `queries`, `privates` and
// `references` arrays.
Collection LoadCollection(const std::string& path);
Collection ParseCollection(const nlohmann::json& doc);
// Inverse of ParseCollection.
nlohmann::json CollectionToJson(const Collection& collection);

// k-hot embedding of a concept query. Duplicate ids collapse.
std::vector<double> EmbedQuery(std::span<const std::string> concepts,
                               const ConceptUniverse& universe);

// Auxiliary record for a concept query: k-hot features plus unit counts.
ItemRecord MakeConceptItem(const std::string& id,
                           std::span<const std::string> concepts,
                           const ConceptUniverse& universe);

enum class Metric { kCosine, kDot, kRbf };

const char* MetricName(Metric metric);
Metric ParseMetric(const std::string& name);

struct KernelOptions {
  Metric metric = Metric::kCosine;
  // Added to the diagonal before any log-det factorization.
  double jitter = 1e-6;
  double rbf_sigma = 1.0;
  // When false a zero vector under cosine gets similarity 0 to everything
  // but itself; when true it raises DegenerateError.
  bool strict_zero_vectors = false;
};

struct SimilarityKernel {
  Eigen::MatrixXd matrix;
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> index;
  Metric metric = Metric::kCosine;
  double jitter = 0.0;
  // Rows [0, ground_size) belong to V, the rest to V'.
  std::size_t ground_size = 0;

  std::size_t size() const { return ids.size(); }
  int Row(const std::string& id) const;
  bool InGround(int row) const {
    return row >= 0 && static_cast<std::size_t>(row) < ground_size;
  }
  // Cholesky of matrix + jitter * I succeeds.
  bool IsPositiveDefinite() const;
};

SimilarityKernel BuildKernel(const GroundSet& ground,
                             std::span<const AuxiliarySet> aux,
                             const KernelOptions& options = {});

// Within-V and within-V' blocks replaced by the identity; the cross block is
// kept as is.
SimilarityKernel CrossOnlyKernel(const SimilarityKernel& kernel);

// Debug export: header row of ids, then one row per item.
std::string KernelToCsv(const SimilarityKernel& kernel);

}  // namespace submodinfo

#endif  // SUBMODINFO_CORE_DATA_H_
