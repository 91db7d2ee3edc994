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

// JSON request handlers behind the C API. Each takes a request object and
// returns a result object; errors are thrown as submodinfo::Error.
//
// Common request keys:
//   kernel: {"metric": "cosine"|"dot"|"rbf", "rbf_sigma": 1.0, "jitter": 1e-6}
//   threads: worker cap for candidate evaluation (0 = automatic)

#ifndef SUBMODINFO_SERVICE_H_
#define SUBMODINFO_SERVICE_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "submodinfo/core_data.h"
#include "submodinfo/learning.h"

namespace submodinfo {

KernelOptions KernelOptionsFromJson(const nlohmann::json& request);

// A spec given as text ("FL2MI:eta=0.2") or as a JSON object.
FunctionSpec SpecFromRequest(const nlohmann::json& value);

// Request: flavor, budget, fn, query / privates / previous (lists of ids),
// lazy, stop_on_nonpositive. A query entry that is not a query id is read as
// a comma-separated concept list and added as a new query item.
nlohmann::json HandleSummarize(const Collection& collection, const nlohmann::json& request);

// Request: fn, mode, items, query, privates. Result: {"value": ...}.
nlohmann::json HandleMeasure(const Collection& collection, const nlohmann::json& request);

// Request: summary (item ids), references (list of id lists; defaults to
// the collection's references). Result: V-ROUGE report.
nlohmann::json HandleEvaluate(const Collection& collection, const nlohmann::json& request);

// Default mixture components of a task.
std::vector<MixtureComponent> DefaultComponents(Flavor task);

// Request: train_dir (or collections: list of collection documents), task,
// epochs, learning_rate, momentum, margin, seed, reg_strength, budget,
// components (optional list of {spec, mode?}), exact_inference.
// Result: {"model": ..., "trace": [...], ...}.
nlohmann::json HandleLearn(const nlohmann::json& request);

// Request: seed, study, budget, delta, sweep ("nu=0,1,10"), families
// (optional list). Result: {"csv": ..., "report": ...}.
nlohmann::json HandleSynth(const nlohmann::json& request);

// Request: seed. Result: suite report with a "passed" flag.
nlohmann::json HandleCheckOracle(const nlohmann::json& request);

// Collection documents (*.json) in a directory, sorted by file name.
std::vector<Collection> LoadCollectionDir(const std::string& dir);

}  // namespace submodinfo

#endif  // SUBMODINFO_SERVICE_H_
