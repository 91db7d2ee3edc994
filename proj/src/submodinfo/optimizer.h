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

// Cardinality-constrained maximization of measure mixtures.

#ifndef SUBMODINFO_OPTIMIZER_H_
#define SUBMODINFO_OPTIMIZER_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "submodinfo/functions.h"
#include "submodinfo/instance.h"

namespace submodinfo {

// sum_t weight_t * measure_t(A) + extra(A), maximized over A within the
// candidate set.
class Objective {
 public:
  explicit Objective(const Instance& instance);
  Objective(const Measure& measure, const Instance& instance);

  void AddTerm(const Measure& measure, double weight = 1.0);
  // Arbitrary set function added to the objective, evaluated from scratch.
  void SetExtra(std::function<double(std::span<const int>)> extra);

  // Ground elements not in any term's conditioning set.
  ItemSet Candidates() const;
  double Evaluate(std::span<const int> a) const;

  // Every term is submodular in A with a nonnegative weight and there is no
  // extra function; lazy greedy is exact only then.
  bool IsSubmodular() const;
  bool IsMonotoneSubmodular() const;

  struct Term {
    Measure measure;
    double weight;
  };
  const std::vector<Term>& terms() const { return terms_; }
  const Instance& instance() const { return *instance_; }
  bool has_extra() const { return static_cast<bool>(extra_); }
  const std::function<double(std::span<const int>)>& extra() const { return extra_; }

 private:
  const Instance* instance_;
  std::vector<Term> terms_;
  std::function<double(std::span<const int>)> extra_;
};

// Ordered picks with their marginal gains.
struct Selection {
  ItemSet items;
  std::vector<double> gains;
  double value = 0.0;
  int budget = 0;
};

struct GreedyOptions {
  bool lazy = true;
  bool stop_on_nonpositive = false;
  // 0 picks the hardware concurrency, capped by SUBMOD_THREADS when set.
  int threads = 0;
};

// Number of worker threads for candidate evaluation.
int ResolveThreads(int requested);

// Greedy with lowest-index tie-breaking. Lazy evaluation is used only for
// submodular objectives; otherwise every candidate is re-evaluated each step.
// Stops early when no candidate has a finite gain.
Selection GreedyMaximize(const Objective& objective, int k, const GreedyOptions& options = {});

// Exhaustive search over all candidate subsets of size <= k. Subsets whose
// evaluation fails numerically are skipped. Throws SizeError beyond 10^6
// subsets.
Selection BruteForceOpt(const Objective& objective, int k);

bool IsSubmodular(Family family, MeasureMode mode);

enum class Flavor {
  kGeneric,
  kQuery,
  kPrivacy,
  kIrrelevance,
  kUpdate,
  kQueryUpdate,
  kQueryPrivacy,
};

const char* FlavorName(Flavor flavor);
Flavor ParseFlavor(const std::string& name);

// The measure mode a flavor optimizes.
MeasureMode FlavorMode(Flavor flavor);
bool FlavorNeedsQuery(Flavor flavor);
bool FlavorNeedsPrivate(Flavor flavor);
bool FlavorNeedsPrevious(Flavor flavor);

// Sets are absent (nullopt) or given, possibly empty. A flavor whose
// required set is absent is a ConfigError.
struct FlavorSets {
  std::optional<ItemSet> query;
  std::optional<ItemSet> privates;
  std::optional<ItemSet> previous;
};

Measure FlavorMeasure(Flavor flavor, const FunctionSpec& spec, const FlavorSets& sets,
                      const Instance& instance);

Selection MasterSolve(Flavor flavor, const FunctionSpec& spec, const FlavorSets& sets, int k,
                      const Instance& instance, const GreedyOptions& options = {});

}  // namespace submodinfo

#endif  // SUBMODINFO_OPTIMIZER_H_
