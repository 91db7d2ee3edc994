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

#ifndef SUBMODINFO_INSTANCE_H_
#define SUBMODINFO_INSTANCE_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "submodinfo/core_data.h"

namespace submodinfo {

// Element indices into Omega: [0, ground_size) is V, the rest V'.
using ItemSet = std::vector<int>;
using SparseRow = std::vector<std::pair<int, double>>;

// Evaluation context shared by every function family: the similarity kernel
// over Omega plus concept data. Immutable once built.
struct Instance {
  int ground_size = 0;
  // Raw kernel (graph cut, log-det, disparity).
  Eigen::MatrixXd similarity;
  // Nonnegative kernel used by the max-based families (facility location,
  // concave over modular). Equal to `similarity` unless it had negative
  // entries, in which case it is (s + 1) / 2.
  Eigen::MatrixXd nonnegative;
  bool shifted = false;
  double jitter = 1e-6;

  // Concept data, indexed by Omega element. Counts drive set cover and ROUGE;
  // probabilities drive probabilistic set cover.
  std::vector<double> concept_weights;
  std::vector<SparseRow> concept_counts;
  std::vector<SparseRow> coverage;

  std::vector<std::string> ids;

  int size() const { return static_cast<int>(similarity.rows()); }
  int aux_size() const { return size() - ground_size; }
  bool InGround(int e) const { return e < ground_size; }
  bool has_concepts() const { return !concept_weights.empty(); }
};

// Instance from a bare similarity matrix. Concept fields stay empty.
Instance MakeInstance(Eigen::MatrixXd similarity, int ground_size, double jitter = 1e-6);

// Attaches concept data and checks shapes, ranges and symmetry.
void SetConcepts(Instance& instance, std::vector<double> weights,
                 std::vector<SparseRow> counts, std::vector<SparseRow> coverage);

// Throws ConfigError / FormatError when the instance is inconsistent.
void ValidateInstance(const Instance& instance);

// Full pipeline: kernel over V followed by the auxiliary sets, concepts from
// the universe. Coverage probabilities come from explicit `probabilities`,
// else from features in [0,1] when their dimension equals the universe size,
// else from concept membership.
Instance BuildInstance(const GroundSet& ground, std::span<const AuxiliarySet> aux,
                       const ConceptUniverse& universe, const KernelOptions& options);

// Element index of an id, or LookupError.
int ElementOf(const Instance& instance, const std::string& id);

}  // namespace submodinfo

#endif  // SUBMODINFO_INSTANCE_H_
