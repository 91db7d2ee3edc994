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

#include "submodinfo/metrics.h"

#include <algorithm>

#include "submodinfo/error.h"

namespace submodinfo {

double RougeQ(std::span<const double> counts_a, std::span<const double> counts_q,
              std::span<const double> weights) {
  if (counts_a.size() != counts_q.size() ||
      (!weights.empty() && weights.size() != counts_a.size())) {
    throw FormatError("concept count vectors differ in length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    s += w * std::min(counts_a[i], counts_q[i]);
  }
  return s;
}

std::vector<double> ConceptCounts(const Instance& instance, std::span<const int> set) {
  std::vector<double> c(instance.concept_weights.size(), 0.0);
  for (int e : set) {
    if (e < 0 || e >= instance.size()) throw ConfigError("element outside Omega");
    if (!instance.has_concepts()) break;
    for (const auto& [k, v] : instance.concept_counts[e]) c[k] += v;
  }
  return c;
}

VRougeResult VRouge(std::span<const int> y, std::span<const ItemSet> references,
                    const Instance& instance) {
  if (references.empty()) throw ConfigError("V-ROUGE needs at least one reference");
  if (!instance.has_concepts()) throw ConfigError("V-ROUGE requires concept data");
  const std::vector<double>& w = instance.concept_weights;
  const std::vector<double> cy = ConceptCounts(instance, y);
  VRougeResult result;
  double total = 0.0;
  int used = 0;
  for (const ItemSet& r : references) {
    const std::vector<double> cr = ConceptCounts(instance, r);
    const double self = RougeQ(cr, cr, w);
    if (self <= 0.0) {
      ++result.skipped;
      continue;
    }
    total += RougeQ(cy, cr, w) / self;
    ++used;
  }
  if (used == 0) throw DegenerateError("every reference has an empty concept profile");
  result.value = total / used;
  return result;
}

}  // namespace submodinfo
