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

#ifndef SUBMODINFO_TESTS_TEST_UTIL_H_
#define SUBMODINFO_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "submodinfo/instance.h"

namespace submodinfo::testing {

inline Eigen::MatrixXd Mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Instance with a given kernel; every element gets the listed concepts with
// count 1 and coverage probability 1.
inline Instance WithConcepts(Eigen::MatrixXd s, int ground, int concepts,
                             const std::vector<std::vector<int>>& gamma,
                             std::vector<double> weights = {}) {
  Instance inst = MakeInstance(std::move(s), ground);
  if (weights.empty()) weights.assign(concepts, 1.0);
  std::vector<SparseRow> counts(inst.size()), coverage(inst.size());
  for (int e = 0; e < inst.size(); ++e) {
    std::vector<int> g = e < static_cast<int>(gamma.size()) ? gamma[e] : std::vector<int>{};
    std::sort(g.begin(), g.end());
    for (int k : g) {
      counts[e].emplace_back(k, 1.0);
      coverage[e].emplace_back(k, 1.0);
    }
  }
  SetConcepts(inst, std::move(weights), std::move(counts), std::move(coverage));
  return inst;
}

inline std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("submodinfo_test_" + name)).string();
}

inline std::string WriteTemp(const std::string& name, const std::string& content) {
  const std::string path = TempPath(name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace submodinfo::testing

#endif  // SUBMODINFO_TESTS_TEST_UTIL_H_
