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

// Randomized self-checks: closed forms against base-function definitions,
// structural properties of the measures, greedy against exhaustive search
// and analytic gradients against finite differences.

#ifndef SUBMODINFO_ORACLE_SUITE_H_
#define SUBMODINFO_ORACLE_SUITE_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "submodinfo/function_spec.h"
#include "submodinfo/instance.h"

namespace submodinfo {

struct RandomInstanceOptions {
  int min_ground = 2;
  int max_ground = 8;
  int min_aux = 2;
  int max_aux = 4;
  int concepts = 5;
  // Probability of a signed cosine kernel instead of a positive RBF one.
  double signed_fraction = 0.0;
};

// RBF (or cosine) kernel over random 3-D points plus random concept counts,
// coverage probabilities and weights. The RBF kernel is positive definite.
Instance RandomInstance(std::mt19937_64& rng, const RandomInstanceOptions& options = {});

// Uniform random subset of `pool` (each element kept with probability p).
ItemSet RandomSubset(std::mt19937_64& rng, std::span<const int> pool, double p = 0.5);

// |a - b| / max(1, |a|, |b|).
double RelativeError(double a, double b);

struct SuiteCheck {
  std::string name;
  bool passed = true;
  int samples = 0;
  double worst = 0.0;  // largest error (or smallest ratio for greedy checks)
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteCheck> checks;
  bool passed() const;
};

nlohmann::json SuiteToJson(const SuiteReport& report);

struct MeasureCase {
  std::string label;
  Family family;
  MeasureMode mode;
};

// Every (family, mode) pair with a closed form, labelled like "FL1MI".
std::vector<MeasureCase> ClosedFormCases();

// Closed form against DefinitionalOracle on `instances` random instances per
// case, relative tolerance `tol`.
SuiteReport ClosedFormSuite(std::uint64_t seed, int instances = 200, double tol = 1e-8);

// Nonnegativity and monotonicity of SMI per family on sampled (A, j, Q), and
// the two conditional identities of CSMI on sampled (A, Q, P).
SuiteReport PropertySuite(std::uint64_t seed, int triples = 1000, int identity_samples = 200,
                          double slack = 1e-9, double identity_tol = 1e-8);

// ROUGE and concave-over-modular SMI against their direct formulas.
SuiteReport EqualitySuite(std::uint64_t seed, int instances = 100, double tol = 1e-10);

// Greedy value >= (1 - 1/e) OPT for monotone submodular measures, and equal
// to OPT for modular ones.
SuiteReport GreedySuite(std::uint64_t seed, int instances = 50, int max_ground = 12,
                        int max_budget = 4);

// Analytic hinge gradients against central differences for a mixture that
// contains every (family, mode) pair.
SuiteReport GradientSuite(std::uint64_t seed, int samples = 100, double tol = 1e-4);

// Closed-form and gradient suites, as run by `check --oracle`.
SuiteReport OracleSuite(std::uint64_t seed);

}  // namespace submodinfo

#endif  // SUBMODINFO_ORACLE_SUITE_H_
