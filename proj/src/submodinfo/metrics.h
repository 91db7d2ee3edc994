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

// Concept-overlap summary metrics.

#ifndef SUBMODINFO_METRICS_H_
#define SUBMODINFO_METRICS_H_

#include <span>
#include <vector>

#include "submodinfo/instance.h"

namespace submodinfo {

// sum_i w_i min(a_i, q_i). An empty weight vector means unit weights.
// Throws FormatError on a length mismatch.
double RougeQ(std::span<const double> counts_a, std::span<const double> counts_q,
              std::span<const double> weights = {});

// Dense concept counts of a set of elements.
std::vector<double> ConceptCounts(const Instance& instance, std::span<const int> set);

struct VRougeResult {
  double value = 0.0;
  // References whose weighted self-score is zero.
  int skipped = 0;
};

// Mean over references R of RougeQ(c(Y), c(R)) / RougeQ(c(R), c(R)).
// Throws ConfigError when there are no references, and DegenerateError when
// every reference was skipped.
VRougeResult VRouge(std::span<const int> y, std::span<const ItemSet> references,
                    const Instance& instance);

}  // namespace submodinfo

#endif  // SUBMODINFO_METRICS_H_
