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

#include "submodinfo/instance.h"

#include <algorithm>
#include <cmath>

#include "submodinfo/error.h"

namespace submodinfo {

Instance MakeInstance(Eigen::MatrixXd similarity, int ground_size, double jitter) {
  Instance instance;
  instance.ground_size = ground_size;
  instance.jitter = jitter;
  instance.similarity = std::move(similarity);
  const int n = instance.size();
  instance.ids.reserve(n);
  for (int i = 0; i < n; ++i) {
    instance.ids.push_back(i < ground_size ? "v" + std::to_string(i)
                                           : "q" + std::to_string(i - ground_size));
  }
  if (n > 0 && instance.similarity.minCoeff() < 0.0) {
    instance.nonnegative = (instance.similarity.array() + 1.0) / 2.0;
    instance.shifted = true;
  } else {
    instance.nonnegative = instance.similarity;
  }
  ValidateInstance(instance);
  return instance;
}

void SetConcepts(Instance& instance, std::vector<double> weights,
                 std::vector<SparseRow> counts, std::vector<SparseRow> coverage) {
  instance.concept_weights = std::move(weights);
  instance.concept_counts = std::move(counts);
  instance.coverage = std::move(coverage);
  ValidateInstance(instance);
}

void ValidateInstance(const Instance& instance) {
  const int n = instance.size();
  if (instance.similarity.cols() != n) throw ConfigError("similarity must be square");
  if (instance.ground_size < 0 || instance.ground_size > n) {
    throw ConfigError("ground size outside the kernel");
  }
  if (!(instance.jitter >= 0.0)) throw ConfigError("jitter must be nonnegative");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(instance.similarity(i, j) - instance.similarity(j, i)) > 1e-12) {
        throw ConfigError("similarity kernel is not symmetric");
      }
    }
  }
  if (!instance.has_concepts()) return;
  const int c = static_cast<int>(instance.concept_weights.size());
  for (double w : instance.concept_weights) {
    if (!(w >= 0.0)) throw ConfigError("concept weights must be nonnegative");
  }
  if (static_cast<int>(instance.concept_counts.size()) != n ||
      static_cast<int>(instance.coverage.size()) != n) {
    throw ConfigError("concept data must have one row per element");
  }
  for (int e = 0; e < n; ++e) {
    for (const auto& [k, v] : instance.concept_counts[e]) {
      if (k < 0 || k >= c || !(v >= 0.0)) throw ConfigError("bad concept count entry");
    }
    for (const auto& [k, p] : instance.coverage[e]) {
      if (k < 0 || k >= c || !(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("coverage probabilities must lie in [0,1]");
      }
    }
  }
}

Instance BuildInstance(const GroundSet& ground, std::span<const AuxiliarySet> aux,
                       const ConceptUniverse& universe, const KernelOptions& options) {
  SimilarityKernel kernel = BuildKernel(ground, aux, options);
  Instance instance = MakeInstance(std::move(kernel.matrix),
                                   static_cast<int>(ground.size()), options.jitter);
  instance.ids = kernel.ids;

  std::vector<const ItemRecord*> rows;
  for (const ItemRecord& item : ground.items()) rows.push_back(&item);
  for (const AuxiliarySet& set : aux) {
    for (const ItemRecord& item : set.items.items()) rows.push_back(&item);
  }
  if (universe.empty()) return instance;

  const int c = static_cast<int>(universe.size());
  std::vector<SparseRow> counts(rows.size()), coverage(rows.size());
  for (std::size_t e = 0; e < rows.size(); ++e) {
    const ItemRecord& item = *rows[e];
    for (const auto& [name, count] : item.concepts) {
      if (count > 0) counts[e].emplace_back(universe.IndexOf(name), count);
    }
    std::sort(counts[e].begin(), counts[e].end());
    const bool probabilistic_features =
        static_cast<int>(item.features.size()) == c &&
        std::all_of(item.features.begin(), item.features.end(),
                    [](double x) { return x >= 0.0 && x <= 1.0; });
    if (!item.probabilities.empty()) {
      for (const auto& [name, p] : item.probabilities) {
        if (p > 0.0) coverage[e].emplace_back(universe.IndexOf(name), p);
      }
      std::sort(coverage[e].begin(), coverage[e].end());
    } else if (probabilistic_features) {
      for (int k = 0; k < c; ++k) {
        if (item.features[k] > 0.0) coverage[e].emplace_back(k, item.features[k]);
      }
    } else {
      for (const auto& [k, count] : counts[e]) coverage[e].emplace_back(k, 1.0);
    }
  }
  SetConcepts(instance, universe.weights(), std::move(counts), std::move(coverage));
  return instance;
}

int ElementOf(const Instance& instance, const std::string& id) {
  auto it = std::find(instance.ids.begin(), instance.ids.end(), id);
  if (it == instance.ids.end()) throw LookupError("unknown id '" + id + "'");
  return static_cast<int>(it - instance.ids.begin());
}

}  // namespace submodinfo
