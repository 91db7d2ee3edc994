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

#ifndef SUBMODINFO_MARGINAL_H_
#define SUBMODINFO_MARGINAL_H_

#include <memory>
#include <vector>

#include "submodinfo/functions.h"
#include "submodinfo/instance.h"

namespace submodinfo {

// Incremental evaluation of measure(A u {j}) - measure(A) for a growing A.
//
// Gain() is const and touches no mutable state, so one state can serve
// concurrent readers. Add() is single-owner.
class MarginalState {
 public:
  virtual ~MarginalState() = default;

  // Throws ConfigError if j is not an unselected ground element or belongs to
  // the measure's conditioning set. A log-det extension that is not positive
  // definite has gain -infinity.
  double Gain(int j) const;

  // Appends j to A and returns its gain. Throws NumericError on an infinite
  // gain.
  double Add(int j);

  double Value() const { return value_; }
  const ItemSet& selected() const { return selected_; }
  const Measure& measure() const { return measure_; }
  bool Contains(int j) const { return in_set_[j] != 0; }

  virtual std::unique_ptr<MarginalState> Clone() const = 0;

 protected:
  MarginalState(const Measure& measure, const Instance& instance);

  virtual double DoGain(int j) const = 0;
  virtual void DoAdd(int j) = 0;

  const Instance& instance() const { return *instance_; }

 private:
  void CheckCandidate(int j) const;

  Measure measure_;
  const Instance* instance_;
  ItemSet selected_;
  std::vector<char> in_set_;
  std::vector<char> blocked_;
  double value_ = 0.0;
};

// Picks the incremental implementation for the measure's family and mode.
// Validates the measure (support, set disjointness, concept data) eagerly.
std::unique_ptr<MarginalState> MakeMarginalState(const Measure& measure,
                                                 const Instance& instance);

// Always recomputes from scratch; the reference every incremental state is
// tested against.
std::unique_ptr<MarginalState> MakeScratchState(const Measure& measure,
                                                const Instance& instance);

}  // namespace submodinfo

#endif  // SUBMODINFO_MARGINAL_H_
