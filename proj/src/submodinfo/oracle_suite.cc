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

#include "submodinfo/oracle_suite.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "submodinfo/error.h"
#include "submodinfo/functions.h"
#include "submodinfo/learning.h"
#include "submodinfo/metrics.h"
#include "submodinfo/optimizer.h"

namespace submodinfo {

namespace {

constexpr Family kAllFamilies[] = {
    Family::kSetCover,      Family::kProbSetCover,       Family::kGraphCut,
    Family::kFacilityLocation1, Family::kFacilityLocation2, Family::kLogDet,
    Family::kConcaveOverModular, Family::kRouge,         Family::kDisparitySum,
    Family::kDisparityMin,
};

constexpr MeasureMode kAllModes[] = {MeasureMode::kBase, MeasureMode::kSmi, MeasureMode::kCg,
                                     MeasureMode::kCsmi};

// Attempts per sample before giving up on drawing a numerically valid one.
constexpr int kMaxRetries = 50;

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

ItemSet Range(int begin, int end) {
  ItemSet out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

ItemSet Union(std::span<const int> a, std::span<const int> b) {
  ItemSet out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Random parameters. LogDet keeps the cross scales in [0,1], where the
// scaled kernel stays positive definite.
FunctionSpec RandomSpec(std::mt19937_64& rng, Family family) {
  FunctionSpec spec;
  spec.family = family;
  const double top = family == Family::kLogDet ? 1.0 : 2.0;
  spec.lambda = Uniform(rng, 0.0, 1.0);
  spec.eta = Uniform(rng, 0.0, top);
  spec.nu = Uniform(rng, 0.0, top);
  spec.psi = static_cast<Psi>(UniformInt(rng, 0, 2));
  spec.com_weights = {Uniform(rng, 0.0, 2.0), Uniform(rng, 0.0, 2.0)};
  return spec;
}

// Splits V' into a query part and a conditioning part (either may be empty).
void SplitAux(std::mt19937_64& rng, const Instance& inst, ItemSet& q, ItemSet& p) {
  q.clear();
  p.clear();
  for (int e = inst.ground_size; e < inst.size(); ++e) {
    const int r = UniformInt(rng, 0, 2);
    if (r == 0) q.push_back(e);
    if (r == 1) p.push_back(e);
  }
}

void Record(SuiteCheck& check, double error) {
  ++check.samples;
  check.worst = std::max(check.worst, error);
}

void Finish(SuiteCheck& check) {
  check.passed = check.passed && check.samples > 0 && check.worst <= check.tolerance;
  std::ostringstream out;
  out << check.samples << " samples, worst " << check.worst << " (tolerance " << check.tolerance
      << ")";
  if (!check.detail.empty()) out << "; " << check.detail;
  check.detail = out.str();
}

}  // namespace

// Random instances ------------------------------------------------------------------

Instance RandomInstance(std::mt19937_64& rng, const RandomInstanceOptions& options) {
  const int g = UniformInt(rng, options.min_ground, options.max_ground);
  const int a = UniformInt(rng, options.min_aux, options.max_aux);
  const int n = g + a;
  const bool cosine = Uniform(rng, 0.0, 1.0) < options.signed_fraction;
  Eigen::MatrixXd points(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) points(i, d) = cosine ? Uniform(rng, -1.0, 1.0) : Uniform(rng, 0.0, 2.0);
  }
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (cosine) {
        const double den = points.row(i).norm() * points.row(j).norm();
        s(i, j) = den > 0.0 ? points.row(i).dot(points.row(j)) / den : 0.0;
      } else {
        s(i, j) = std::exp(-(points.row(i) - points.row(j)).squaredNorm() / 2.0);
      }
    }
  }
  Instance inst = MakeInstance(std::move(s), g);
  const int c = options.concepts;
  std::vector<double> weights(c);
  for (double& w : weights) w = Uniform(rng, 0.2, 2.0);
  std::vector<SparseRow> counts(n), coverage(n);
  for (int e = 0; e < n; ++e) {
    for (int k = 0; k < c; ++k) {
      const int count = UniformInt(rng, -2, 3);
      if (count > 0) counts[e].emplace_back(k, count);
      if (Uniform(rng, 0.0, 1.0) < 0.5) coverage[e].emplace_back(k, Uniform(rng, 0.0, 1.0));
    }
  }
  SetConcepts(inst, std::move(weights), std::move(counts), std::move(coverage));
  return inst;
}

ItemSet RandomSubset(std::mt19937_64& rng, std::span<const int> pool, double p) {
  ItemSet out;
  for (int e : pool) {
    if (Uniform(rng, 0.0, 1.0) < p) out.push_back(e);
  }
  return out;
}

double RelativeError(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

nlohmann::json SuiteToJson(const SuiteReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const SuiteCheck& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"samples", c.samples},
                      {"worst", c.worst},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  return nlohmann::json{{"passed", report.passed()}, {"checks", checks}};
}

std::vector<MeasureCase> ClosedFormCases() {
  std::vector<MeasureCase> out;
  for (Family f : kAllFamilies) {
    for (MeasureMode m : kAllModes) {
      if (m == MeasureMode::kBase || !IsSupported(f, m)) continue;
      out.push_back({MeasureLabel(f, m), f, m});
    }
  }
  return out;
}

// Closed forms ----------------------------------------------------------------------

SuiteReport ClosedFormSuite(std::uint64_t seed, int instances, double tol) {
  SuiteReport report;
  std::mt19937_64 rng(seed);
  RandomInstanceOptions options;
  for (const MeasureCase& c : ClosedFormCases()) {
    SuiteCheck check;
    check.name = "closed-form " + c.label;
    check.tolerance = tol;
    const bool max_based = c.family == Family::kFacilityLocation2 ||
                           c.family == Family::kConcaveOverModular;
    options.signed_fraction = c.family == Family::kLogDet || max_based ? 0.0 : 0.3;
    int retries = 0;
    while (check.samples < instances && retries < kMaxRetries * instances) {
      const Instance inst = RandomInstance(rng, options);
      const FunctionSpec spec = RandomSpec(rng, c.family);
      ItemSet q, p;
      SplitAux(rng, inst, q, p);
      if (c.mode == MeasureMode::kSmi) p.clear();
      if (c.mode == MeasureMode::kCg) q.clear();
      const ItemSet a = RandomSubset(rng, Range(0, inst.ground_size));
      try {
        const double closed = Evaluate(Measure{spec, c.mode, q, p}, a, inst);
        const double oracle = DefinitionalOracle(spec, c.mode, a, q, p, inst);
        Record(check, RelativeError(closed, oracle));
      } catch (const NumericError&) {
        ++retries;
      }
    }
    Finish(check);
    report.checks.push_back(std::move(check));
  }
  return report;
}

// Structural properties ---------------------------------------------------------------

SuiteReport PropertySuite(std::uint64_t seed, int triples, int identity_samples, double slack,
                          double identity_tol) {
  SuiteReport report;
  std::mt19937_64 rng(seed);
  for (Family family : kAllFamilies) {
    if (!IsSupported(family, MeasureMode::kSmi)) continue;
    SuiteCheck nonneg, mono;
    const std::string label = MeasureLabel(family, MeasureMode::kSmi);
    nonneg.name = "nonnegativity " + label;
    mono.name = "monotonicity " + label;
    nonneg.tolerance = mono.tolerance = slack;
    int retries = 0;
    while (nonneg.samples < triples && retries < kMaxRetries * triples) {
      const Instance inst = RandomInstance(rng);
      FunctionSpec spec = RandomSpec(rng, family);
      spec.eta = Uniform(rng, 0.0, 1.0);
      const ItemSet q = RandomSubset(rng, Range(inst.ground_size, inst.size()));
      const int j = UniformInt(rng, 0, inst.ground_size - 1);
      ItemSet pool = Range(0, inst.ground_size);
      pool.erase(pool.begin() + j);
      const ItemSet a = RandomSubset(rng, pool);
      ItemSet aj = a;
      aj.push_back(j);
      try {
        const Measure m{spec, MeasureMode::kSmi, q, {}};
        const double v = Evaluate(m, a, inst);
        const double vj = Evaluate(m, aj, inst);
        // Violations are recorded as positive errors.
        Record(nonneg, std::max(0.0, -v));
        Record(mono, std::max(0.0, v - vj));
      } catch (const NumericError&) {
        ++retries;
      }
    }
    Finish(nonneg);
    Finish(mono);
    report.checks.push_back(std::move(nonneg));
    report.checks.push_back(std::move(mono));
  }

  for (Family family : kAllFamilies) {
    if (!IsSupported(family, MeasureMode::kCsmi)) continue;
    SuiteCheck check;
    check.name = "conditional identities " + MeasureLabel(family, MeasureMode::kCsmi);
    check.tolerance = identity_tol;
    int retries = 0;
    while (check.samples < identity_samples && retries < kMaxRetries * identity_samples) {
      const Instance inst = RandomInstance(rng);
      const FunctionSpec spec = RandomSpec(rng, family);
      ItemSet q, p;
      SplitAux(rng, inst, q, p);
      const ItemSet a = RandomSubset(rng, Range(0, inst.ground_size));
      try {
        const double csmi = Csmi(spec, a, q, p, inst);
        const BaseFunction f(spec, inst, q, p);
        const double fp = f(p);
        // Mutual information of the conditional gain g_P(X) = f(X u P) - f(P).
        auto g = [&](std::span<const int> x) { return f(Union(x, p)) - fp; };
        const double via_gain = g(a) + g(q) - g(Union(a, q));
        // Conditional gain of the mutual information h_Q(X) = I_f(X; Q).
        const double fq = f(q);
        auto h = [&](std::span<const int> x) { return f(x) + fq - f(Union(x, q)); };
        const double via_mi = h(Union(a, p)) - h(p);
        Record(check, std::max(RelativeError(csmi, via_gain), RelativeError(csmi, via_mi)));
      } catch (const NumericError&) {
        ++retries;
      }
    }
    Finish(check);
    report.checks.push_back(std::move(check));
  }
  return report;
}

// Direct formulas ------------------------------------------------------------------------

SuiteReport EqualitySuite(std::uint64_t seed, int instances, double tol) {
  SuiteReport report;
  std::mt19937_64 rng(seed);
  SuiteCheck rouge, com;
  rouge.name = "ROUGE mutual information equals ROUGE_Q";
  com.name = "COM mutual information equals its two-sided form";
  rouge.tolerance = com.tolerance = tol;
  for (int t = 0; t < instances; ++t) {
    const Instance inst = RandomInstance(rng);
    const ItemSet q = RandomSubset(rng, Range(inst.ground_size, inst.size()));
    const ItemSet a = RandomSubset(rng, Range(0, inst.ground_size));

    FunctionSpec rs;
    rs.family = Family::kRouge;
    const double direct = RougeQ(ConceptCounts(inst, a), ConceptCounts(inst, q),
                                 inst.concept_weights);
    Record(rouge, std::max(RelativeError(Smi(rs, a, q, inst), direct),
                           RelativeError(DefinitionalOracle(rs, MeasureMode::kSmi, a, q, {}, inst),
                                         direct)));

    const FunctionSpec cs = RandomSpec(rng, Family::kConcaveOverModular);
    const auto& [d1, d2] = cs.com_weights;
    double two_sided = 0.0;
    for (int i : a) {
      double sum = 0.0;
      for (int j : q) sum += inst.nonnegative(i, j);
      two_sided += cs.eta * d1 * ApplyPsi(cs.psi, sum);
    }
    for (int j : q) {
      double sum = 0.0;
      for (int i : a) sum += inst.nonnegative(i, j);
      two_sided += d2 * ApplyPsi(cs.psi, sum);
    }
    Record(com, std::max(RelativeError(Smi(cs, a, q, inst), two_sided),
                         RelativeError(DefinitionalOracle(cs, MeasureMode::kSmi, a, q, {}, inst),
                                       two_sided)));
  }
  Finish(rouge);
  Finish(com);
  report.checks.push_back(std::move(rouge));
  report.checks.push_back(std::move(com));
  return report;
}

// Greedy guarantee ---------------------------------------------------------------------

SuiteReport GreedySuite(std::uint64_t seed, int instances, int max_ground, int max_budget) {
  SuiteReport report;
  std::mt19937_64 rng(seed);
  RandomInstanceOptions options;
  options.min_ground = std::min(5, max_ground);
  options.max_ground = max_ground;
  const double bound = 1.0 - std::exp(-1.0);

  auto run = [&](const std::string& name, Family family, MeasureMode mode, bool modular) {
    SuiteCheck check;
    check.name = name;
    check.tolerance = 0.0;
    double worst_ratio = 1.0;
    int retries = 0;
    while (check.samples < instances && retries < kMaxRetries * instances) {
      const Instance inst = RandomInstance(rng, options);
      FunctionSpec spec = RandomSpec(rng, family);
      if (modular) spec.psi = Psi::kIdentity;
      ItemSet q, p;
      SplitAux(rng, inst, q, p);
      if (mode == MeasureMode::kBase || mode == MeasureMode::kCg) q.clear();
      if (mode == MeasureMode::kBase || mode == MeasureMode::kSmi) p.clear();
      const int k = UniformInt(rng, 1, std::min(max_budget, inst.ground_size));
      try {
        const Objective objective(Measure{spec, mode, q, p}, inst);
        const double greedy = GreedyMaximize(objective, k).value;
        const double opt = BruteForceOpt(objective, k).value;
        const double shortfall =
            modular ? std::max(0.0, RelativeError(greedy, opt) - 1e-9)
                    : std::max(0.0, bound * opt - greedy - 1e-12 * std::max(1.0, std::abs(opt)));
        if (opt > 0.0) worst_ratio = std::min(worst_ratio, greedy / opt);
        Record(check, shortfall);
      } catch (const NumericError&) {
        ++retries;
      }
    }
    std::ostringstream out;
    out << "min greedy/OPT " << worst_ratio;
    check.detail = out.str();
    Finish(check);
    report.checks.push_back(std::move(check));
  };

  for (Family family : kAllFamilies) {
    for (MeasureMode mode : kAllModes) {
      if (!IsSupported(family, mode) || !IsMonotoneSubmodular(family, mode) ||
          !IsSubmodular(family, mode)) {
        continue;
      }
      run("greedy bound " + MeasureLabel(family, mode), family, mode, false);
    }
  }
  if (!IsSubmodular(Family::kLogDet, MeasureMode::kSmi)) {
    run("greedy bound " + MeasureLabel(Family::kLogDet, MeasureMode::kSmi), Family::kLogDet,
        MeasureMode::kSmi, false);
  }
  run("greedy exact on modular GCMI", Family::kGraphCut, MeasureMode::kSmi, true);
  run("greedy exact on modular COM MI (identity psi)", Family::kConcaveOverModular,
      MeasureMode::kSmi, true);
  return report;
}

// Gradients -------------------------------------------------------------------------------

SuiteReport GradientSuite(std::uint64_t seed, int samples, double tol) {
  SuiteReport report;
  std::mt19937_64 rng(seed);
  std::vector<MixtureComponent> components;
  for (Family f : kAllFamilies) {
    for (MeasureMode m : kAllModes) {
      if (!IsSupported(f, m)) continue;
      FunctionSpec spec;
      spec.family = f;
      components.push_back({spec, m});
    }
  }
  RandomInstanceOptions options;
  options.min_ground = 4;

  SuiteCheck check;
  check.name = "hinge gradient vs central differences";
  check.tolerance = tol;
  int kinks = 0, entries = 0, retries = 0;
  std::string worst_name;
  while (check.samples < samples && retries < kMaxRetries * samples) {
    auto inst = std::make_shared<const Instance>(RandomInstance(rng, options));
    TrainingExample ex;
    ex.name = "sample" + std::to_string(check.samples);
    ex.instance = inst;
    ItemSet q, p;
    for (int e = inst->ground_size; e < inst->size(); ++e) {
      (e % 2 == 0 ? q : p).push_back(e);
    }
    ex.sets.query = q;
    ex.sets.privates = p;
    ex.budget = inst->ground_size;
    ex.references.push_back(RandomSubset(rng, Range(0, inst->ground_size)));
    const ItemSet y_hat = RandomSubset(rng, Range(0, inst->ground_size));

    MixtureModel model;
    model.task = Flavor::kQueryPrivacy;
    model.components = components;
    for (MixtureComponent& c : model.components) {
      c.spec.lambda = Uniform(rng, 0.2, 1.0);
      c.spec.eta = Uniform(rng, 0.2, 1.0);
      c.spec.nu = Uniform(rng, 0.2, 1.0);
      c.spec.psi = static_cast<Psi>(UniformInt(rng, 0, 2));
      c.spec.com_weights = {Uniform(rng, 0.2, 2.0), Uniform(rng, 0.2, 2.0)};
      model.weights.push_back(Uniform(rng, 0.0, 1.0));
    }
    try {
      const GradientCheck result = FiniteDiffCheck(model, ex, 0, y_hat);
      const std::vector<char> mask = ActiveMask(model);
      double worst = 0.0;
      for (const GradientCheckEntry& e : result.entries) {
        if (!mask[e.index]) continue;
        if (e.kink) {
          ++kinks;
          continue;
        }
        ++entries;
        if (e.relative_error > worst) {
          worst = e.relative_error;
          if (worst > check.worst) worst_name = e.name;
        }
      }
      Record(check, worst);
    } catch (const NumericError&) {
      ++retries;
    }
  }
  std::ostringstream out;
  out << entries << " smooth entries, " << kinks << " kink entries excluded";
  if (!worst_name.empty()) out << ", worst at " << worst_name;
  check.detail = out.str();
  Finish(check);
  report.checks.push_back(std::move(check));
  return report;
}

SuiteReport OracleSuite(std::uint64_t seed) {
  SuiteReport report = ClosedFormSuite(seed);
  for (SuiteCheck& c : GradientSuite(seed + 1).checks) report.checks.push_back(std::move(c));
  return report;
}

}  // namespace submodinfo
