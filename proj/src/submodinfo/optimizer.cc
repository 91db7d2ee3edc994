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

#include "submodinfo/optimizer.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <queue>
#include <thread>

#include "submodinfo/error.h"
#include "submodinfo/marginal.h"

namespace submodinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxSubsets = 1e6;
// Below this many candidates a step is evaluated on the calling thread.
constexpr std::size_t kParallelThreshold = 64;

// Marginal states for every weighted term plus the running extra value.
class GreedyRun {
 public:
  explicit GreedyRun(const Objective& objective) : objective_(&objective) {
    for (const Objective::Term& term : objective.terms()) {
      if (term.weight == 0.0) {
        states_.push_back(nullptr);
        continue;
      }
      states_.push_back(MakeMarginalState(term.measure, objective.instance()));
    }
    if (objective.has_extra()) extra_value_ = objective.extra()(selected_);
  }

  double Gain(int j) const {
    double g = 0.0;
    const auto& terms = objective_->terms();
    for (std::size_t t = 0; t < states_.size(); ++t) {
      if (!states_[t]) continue;
      const double s = states_[t]->Gain(j);
      if (!std::isfinite(s)) return -kInf;
      g += terms[t].weight * s;
    }
    if (objective_->has_extra()) {
      ItemSet next = selected_;
      next.push_back(j);
      g += objective_->extra()(next) - extra_value_;
    }
    return g;
  }

  void Add(int j) {
    for (auto& state : states_) {
      if (state) state->Add(j);
    }
    selected_.push_back(j);
    if (objective_->has_extra()) extra_value_ = objective_->extra()(selected_);
  }

  double Value() const {
    double v = extra_value_;
    const auto& terms = objective_->terms();
    for (std::size_t t = 0; t < states_.size(); ++t) {
      if (states_[t]) v += terms[t].weight * states_[t]->Value();
    }
    return v;
  }

 private:
  const Objective* objective_;
  std::vector<std::unique_ptr<MarginalState>> states_;
  ItemSet selected_;
  double extra_value_ = 0.0;
};

// Gains for `candidates`, evaluated across threads into a fixed slot each.
std::vector<double> EvaluateAll(const GreedyRun& run, const ItemSet& candidates, int threads) {
  std::vector<double> gains(candidates.size());
  const std::size_t n = candidates.size();
  if (threads <= 1 || n < kParallelThreshold) {
    for (std::size_t c = 0; c < n; ++c) gains[c] = run.Gain(candidates[c]);
    return gains;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < n; c += workers) gains[c] = run.Gain(candidates[c]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return gains;
}

void CheckBudget(int k, std::size_t candidates) {
  if (k < 0) throw ConfigError("budget must be nonnegative");
  if (static_cast<std::size_t>(k) > candidates) {
    throw ConfigError("budget exceeds the number of candidate items");
  }
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '-' || c == '_'; }),
          s.end());
  return s;
}

}  // namespace

// Objective ---------------------------------------------------------------------

Objective::Objective(const Instance& instance) : instance_(&instance) {}

Objective::Objective(const Measure& measure, const Instance& instance) : instance_(&instance) {
  AddTerm(measure);
}

void Objective::AddTerm(const Measure& measure, double weight) {
  if (!std::isfinite(weight)) throw ConfigError("objective weight must be finite");
  terms_.push_back({measure, weight});
}

void Objective::SetExtra(std::function<double(std::span<const int>)> extra) {
  extra_ = std::move(extra);
}

ItemSet Objective::Candidates() const {
  std::vector<char> blocked(instance_->ground_size, 0);
  for (const Term& term : terms_) {
    if (term.measure.mode != MeasureMode::kCg && term.measure.mode != MeasureMode::kCsmi) {
      continue;
    }
    for (int e : term.measure.conditioning) {
      if (e >= 0 && e < instance_->ground_size) blocked[e] = 1;
    }
  }
  ItemSet out;
  for (int j = 0; j < instance_->ground_size; ++j) {
    if (!blocked[j]) out.push_back(j);
  }
  return out;
}

double Objective::Evaluate(std::span<const int> a) const {
  double v = 0.0;
  for (const Term& term : terms_) {
    if (term.weight != 0.0) v += term.weight * submodinfo::Evaluate(term.measure, a, *instance_);
  }
  if (extra_) v += extra_(a);
  return v;
}

bool Objective::IsSubmodular() const {
  if (extra_) return false;
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
    return t.weight >= 0.0 && submodinfo::IsSubmodular(t.measure.spec.family, t.measure.mode);
  });
}

bool Objective::IsMonotoneSubmodular() const {
  if (extra_) return false;
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
    return t.weight >= 0.0 &&
           submodinfo::IsMonotoneSubmodular(t.measure.spec.family, t.measure.mode);
  });
}

bool IsSubmodular(Family family, MeasureMode mode) {
  if (!IsSupported(family, mode)) return false;
  if (family == Family::kDisparitySum || family == Family::kDisparityMin) return false;
  switch (mode) {
    case MeasureMode::kBase:
    case MeasureMode::kCg:
      return true;
    case MeasureMode::kSmi:
      return family != Family::kLogDet;
    case MeasureMode::kCsmi:
      return family == Family::kSetCover || family == Family::kProbSetCover;
  }
  return false;
}

// Greedy ------------------------------------------------------------------------

int ResolveThreads(int requested) {
  int threads = requested > 0 ? requested
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SUBMOD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) threads = std::min<int>(threads, static_cast<int>(cap));
  }
  return std::max(1, threads);
}

Selection GreedyMaximize(const Objective& objective, int k, const GreedyOptions& options) {
  ItemSet remaining = objective.Candidates();
  CheckBudget(k, remaining.size());
  const int threads = ResolveThreads(options.threads);
  GreedyRun run(objective);
  Selection sel;
  sel.budget = k;

  auto accept = [&](int j, double gain) {
    run.Add(j);
    sel.items.push_back(j);
    sel.gains.push_back(gain);
  };

  if (!options.lazy || !objective.IsSubmodular()) {
    for (int step = 0; step < k; ++step) {
      const std::vector<double> gains = EvaluateAll(run, remaining, threads);
      std::size_t best = remaining.size();
      for (std::size_t c = 0; c < remaining.size(); ++c) {
        if (!std::isfinite(gains[c])) continue;
        if (best == remaining.size() || gains[c] > gains[best]) best = c;
      }
      if (best == remaining.size()) break;
      if (options.stop_on_nonpositive && gains[best] <= 0.0) break;
      accept(remaining[best], gains[best]);
      remaining.erase(remaining.begin() + static_cast<long>(best));
    }
    sel.value = run.Value();
    return sel;
  }

  struct Entry {
    double bound;
    int item;
    int stamp;
  };
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.item > b.item;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);
  const std::vector<double> initial = EvaluateAll(run, remaining, threads);
  for (std::size_t c = 0; c < remaining.size(); ++c) heap.push({initial[c], remaining[c], 0});

  int step = 0;
  while (step < k && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (top.stamp == step) {
      if (!std::isfinite(top.bound)) break;
      if (options.stop_on_nonpositive && top.bound <= 0.0) break;
      accept(top.item, top.bound);
      ++step;
      continue;
    }
    top.bound = run.Gain(top.item);
    top.stamp = step;
    heap.push(top);
  }
  sel.value = run.Value();
  return sel;
}

Selection BruteForceOpt(const Objective& objective, int k) {
  const ItemSet candidates = objective.Candidates();
  CheckBudget(k, candidates.size());
  const int m = static_cast<int>(candidates.size());
  double total = 0.0, binom = 1.0;
  for (int s = 0; s <= k; ++s) {
    if (s > 0) binom = binom * (m - s + 1) / s;
    total += binom;
  }
  if (total > kMaxSubsets) throw SizeError("too many subsets for exhaustive search");

  ItemSet best_set;
  double best = objective.Evaluate(best_set);
  std::vector<int> idx;
  for (int size = 1; size <= k; ++size) {
    idx.resize(size);
    for (int t = 0; t < size; ++t) idx[t] = t;
    while (true) {
      ItemSet subset(size);
      for (int t = 0; t < size; ++t) subset[t] = candidates[idx[t]];
      try {
        const double v = objective.Evaluate(subset);
        if (v > best) {
          best = v;
          best_set = subset;
        }
      } catch (const NumericError&) {
      }
      int t = size - 1;
      while (t >= 0 && idx[t] == m - size + t) --t;
      if (t < 0) break;
      ++idx[t];
      for (int u = t + 1; u < size; ++u) idx[u] = idx[u - 1] + 1;
    }
  }

  Selection sel;
  sel.budget = k;
  sel.items = best_set;
  double prev = objective.Evaluate(ItemSet{});
  for (std::size_t t = 1; t <= best_set.size(); ++t) {
    const double v =
        objective.Evaluate(std::span<const int>(best_set.data(), t));
    sel.gains.push_back(v - prev);
    prev = v;
  }
  sel.value = best;
  return sel;
}

// Flavors -----------------------------------------------------------------------

const char* FlavorName(Flavor flavor) {
  switch (flavor) {
    case Flavor::kGeneric:
      return "generic";
    case Flavor::kQuery:
      return "query";
    case Flavor::kPrivacy:
      return "privacy";
    case Flavor::kIrrelevance:
      return "irrelevance";
    case Flavor::kUpdate:
      return "update";
    case Flavor::kQueryUpdate:
      return "query-update";
    case Flavor::kQueryPrivacy:
      return "query-privacy";
  }
  return "unknown";
}

Flavor ParseFlavor(const std::string& name) {
  const std::string key = Lower(name);
  if (key == "generic") return Flavor::kGeneric;
  if (key == "query") return Flavor::kQuery;
  if (key == "privacy") return Flavor::kPrivacy;
  if (key == "irrelevance") return Flavor::kIrrelevance;
  if (key == "update") return Flavor::kUpdate;
  if (key == "queryupdate") return Flavor::kQueryUpdate;
  if (key == "queryprivacy" || key == "joint") return Flavor::kQueryPrivacy;
  throw ConfigError("unknown flavor '" + name + "'");
}

MeasureMode FlavorMode(Flavor flavor) {
  switch (flavor) {
    case Flavor::kGeneric:
      return MeasureMode::kBase;
    case Flavor::kQuery:
      return MeasureMode::kSmi;
    case Flavor::kPrivacy:
    case Flavor::kIrrelevance:
    case Flavor::kUpdate:
      return MeasureMode::kCg;
    case Flavor::kQueryUpdate:
    case Flavor::kQueryPrivacy:
      return MeasureMode::kCsmi;
  }
  return MeasureMode::kBase;
}

bool FlavorNeedsQuery(Flavor flavor) {
  return flavor == Flavor::kQuery || flavor == Flavor::kQueryUpdate ||
         flavor == Flavor::kQueryPrivacy;
}

bool FlavorNeedsPrivate(Flavor flavor) {
  return flavor == Flavor::kPrivacy || flavor == Flavor::kIrrelevance ||
         flavor == Flavor::kQueryPrivacy;
}

bool FlavorNeedsPrevious(Flavor flavor) {
  return flavor == Flavor::kUpdate || flavor == Flavor::kQueryUpdate;
}

Measure FlavorMeasure(Flavor flavor, const FunctionSpec& spec, const FlavorSets& sets,
                      const Instance& instance) {
  Measure m;
  m.spec = spec;
  m.mode = FlavorMode(flavor);
  const std::string name = FlavorName(flavor);
  if (FlavorNeedsQuery(flavor)) {
    if (!sets.query) throw ConfigError(name + " summarization requires a query set");
    m.query = *sets.query;
  }
  if (FlavorNeedsPrivate(flavor)) {
    if (!sets.privates) throw ConfigError(name + " summarization requires a private set");
    m.conditioning = *sets.privates;
  }
  if (FlavorNeedsPrevious(flavor)) {
    if (!sets.previous) throw ConfigError(name + " summarization requires a previous summary");
    for (int e : *sets.previous) {
      if (e < 0 || !instance.InGround(e)) {
        throw ConfigError("previous summary must be drawn from the ground set");
      }
    }
    m.conditioning = *sets.previous;
  }
  submodinfo::Evaluate(m, {}, instance);
  return m;
}

Selection MasterSolve(Flavor flavor, const FunctionSpec& spec, const FlavorSets& sets, int k,
                      const Instance& instance, const GreedyOptions& options) {
  const Measure m = FlavorMeasure(flavor, spec, sets, instance);
  return GreedyMaximize(Objective(m, instance), k, options);
}

}  // namespace submodinfo
