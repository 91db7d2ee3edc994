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

#include "submodinfo/learning.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "submodinfo/error.h"
#include "submodinfo/metrics.h"

namespace submodinfo {

namespace {

enum Block { kWeight = 0, kLambda = 1, kEta = 2, kNu = 3 };

MeasureMode ComponentMode(const MixtureModel& model, std::size_t c) {
  return model.components[c].mode.value_or(FlavorMode(model.task));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers, rethrowing the
// first failure by index.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Objective ModelObjective(const MixtureModel& model, const TrainingExample& example) {
  Objective objective(*example.instance);
  for (std::size_t c = 0; c < model.size(); ++c) {
    objective.AddTerm(ComponentMeasure(model, c, example), model.weights[c]);
  }
  return objective;
}

std::string ThetaJson(std::span<const double> theta) {
  return nlohmann::json(std::vector<double>(theta.begin(), theta.end())).dump();
}

}  // namespace

// Model -------------------------------------------------------------------------

void ValidateModel(const MixtureModel& model) {
  if (model.components.empty()) throw ConfigError("a mixture needs at least one component");
  if (model.weights.size() != model.components.size()) {
    throw ConfigError("one weight per mixture component is required");
  }
  for (double w : model.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("mixture weights must be >= 0");
  }
  if (!(model.reg_strength >= 0.0)) throw ConfigError("reg_strength must be >= 0");
  for (const MixtureComponent& c : model.components) ValidateSpec(c.spec);
}

nlohmann::json ModelToJson(const MixtureModel& model) {
  nlohmann::json components = nlohmann::json::array();
  for (std::size_t c = 0; c < model.size(); ++c) {
    nlohmann::json entry{{"spec", SpecToJson(model.components[c].spec)},
                         {"weight", model.weights[c]}};
    if (model.components[c].mode) entry["mode"] = ModeName(*model.components[c].mode);
    components.push_back(entry);
  }
  return nlohmann::json{{"task", FlavorName(model.task)},
                        {"reg_strength", model.reg_strength},
                        {"components", components},
                        {"metadata",
                         {{"epochs_run", model.epochs_run}, {"loss_trace", model.loss_trace}}}};
}

MixtureModel ModelFromJson(const nlohmann::json& j) {
  MixtureModel model;
  try {
    model.task = ParseFlavor(j.value("task", std::string("generic")));
    model.reg_strength = j.value("reg_strength", model.reg_strength);
    for (const auto& entry : j.at("components")) {
      MixtureComponent c;
      c.spec = SpecFromJson(entry.contains("spec") ? entry.at("spec") : entry);
      if (entry.contains("mode")) c.mode = ParseMode(entry.at("mode").get<std::string>());
      model.components.push_back(c);
      model.weights.push_back(entry.value("weight", 1.0));
    }
    if (j.contains("metadata")) {
      const auto& meta = j.at("metadata");
      model.epochs_run = meta.value("epochs_run", 0);
      model.loss_trace = meta.value("loss_trace", std::vector<double>{});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed mixture model: ") + e.what());
  }
  ValidateModel(model);
  return model;
}

MixtureModel InitModel(std::vector<MixtureComponent> components, Flavor task,
                       std::uint64_t seed, double reg_strength) {
  MixtureModel model;
  model.task = task;
  model.reg_strength = reg_strength;
  model.components = std::move(components);
  if (model.components.empty()) throw ConfigError("a mixture needs at least one component");
  std::mt19937_64 rng(seed);
  const double hi = 2.0 / std::sqrt(static_cast<double>(model.components.size()));
  std::uniform_real_distribution<double> dist(0.0, hi);
  for (std::size_t c = 0; c < model.components.size(); ++c) model.weights.push_back(dist(rng));
  ValidateModel(model);
  return model;
}

std::vector<double> PackTheta(const MixtureModel& model) {
  const std::size_t m = model.size();
  std::vector<double> theta(4 * m);
  for (std::size_t c = 0; c < m; ++c) {
    theta[kWeight * m + c] = model.weights[c];
    theta[kLambda * m + c] = model.components[c].spec.lambda;
    theta[kEta * m + c] = model.components[c].spec.eta;
    theta[kNu * m + c] = model.components[c].spec.nu;
  }
  return theta;
}

void UnpackTheta(std::span<const double> theta, MixtureModel& model) {
  const std::size_t m = model.size();
  if (theta.size() != 4 * m) throw ConfigError("Theta has the wrong length");
  for (std::size_t c = 0; c < m; ++c) {
    model.weights[c] = theta[kWeight * m + c];
    model.components[c].spec.lambda = theta[kLambda * m + c];
    model.components[c].spec.eta = theta[kEta * m + c];
    model.components[c].spec.nu = theta[kNu * m + c];
  }
}

std::vector<char> ActiveMask(const MixtureModel& model) {
  const std::size_t m = model.size();
  std::vector<char> mask(4 * m, 0);
  for (std::size_t c = 0; c < m; ++c) {
    const ParameterFlags f = LearnableParameters(model.components[c].spec.family,
                                                 ComponentMode(model, c));
    mask[kWeight * m + c] = 1;
    mask[kLambda * m + c] = f.lambda;
    mask[kEta * m + c] = f.eta;
    mask[kNu * m + c] = f.nu;
  }
  return mask;
}

std::string ThetaName(const MixtureModel& model, std::size_t index) {
  static const char* kNames[] = {"w", "lambda", "eta", "nu"};
  const std::size_t m = model.size();
  return std::string(kNames[index / m]) + "[" + std::to_string(index % m) + "]";
}

// Examples ------------------------------------------------------------------------

void ValidateExample(const TrainingExample& example) {
  if (!example.instance) throw ConfigError("training example has no instance");
  if (example.references.empty()) throw ConfigError("training example has no references");
  if (example.budget < 0) throw ConfigError("budget must be nonnegative");
  for (const ItemSet& r : example.references) {
    if (static_cast<int>(r.size()) > example.budget) {
      throw ConfigError("reference summary exceeds the budget");
    }
    for (int e : r) {
      if (e < 0 || !example.instance->InGround(e)) {
        throw ConfigError("reference summary item outside the ground set");
      }
    }
  }
}

const char* MarginName(MarginLoss margin) {
  return margin == MarginLoss::kZeroOne ? "zero_one" : "one_minus_vrouge";
}

MarginLoss ParseMargin(const std::string& name) {
  if (name == "zero_one" || name == "zero-one") return MarginLoss::kZeroOne;
  if (name == "one_minus_vrouge" || name == "1-vrouge" || name == "vrouge") {
    return MarginLoss::kOneMinusVRouge;
  }
  throw ConfigError("unknown margin loss '" + name + "'");
}

void ValidateConfig(const TrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(config.learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

Measure ComponentMeasure(const MixtureModel& model, std::size_t c,
                         const TrainingExample& example) {
  Measure m;
  m.spec = model.components[c].spec;
  m.mode = ComponentMode(model, c);
  const bool query = m.mode == MeasureMode::kSmi || m.mode == MeasureMode::kCsmi;
  const bool cond = m.mode == MeasureMode::kCg || m.mode == MeasureMode::kCsmi;
  if (query) {
    if (!example.sets.query) {
      throw ConfigError(std::string(ModeName(m.mode)) + " component needs a query set in '" +
                        example.name + "'");
    }
    m.query = *example.sets.query;
  }
  if (cond) {
    const auto& source =
        FlavorNeedsPrevious(model.task) ? example.sets.previous : example.sets.privates;
    if (!source) {
      throw ConfigError(std::string(ModeName(m.mode)) +
                        " component needs a conditioning set in '" + example.name + "'");
    }
    m.conditioning = *source;
  }
  return m;
}

double MixtureEval(const MixtureModel& model, std::span<const int> y,
                   const TrainingExample& example) {
  double v = 0.0;
  for (std::size_t c = 0; c < model.size(); ++c) {
    const Measure m = ComponentMeasure(model, c, example);
    if (model.weights[c] != 0.0) v += model.weights[c] * Evaluate(m, y, *example.instance);
  }
  return v;
}

double MarginValue(MarginLoss margin, std::span<const int> y, const TrainingExample& example,
                   std::size_t ref) {
  const ItemSet& r = example.references.at(ref);
  if (margin == MarginLoss::kZeroOne) {
    ItemSet a(y.begin(), y.end()), b = r;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b ? 0.0 : 1.0;
  }
  return 1.0 - VRouge(y, std::span<const ItemSet>(&r, 1), *example.instance).value;
}

Inference LossAugmentedInference(const MixtureModel& model, const TrainingExample& example,
                                 std::size_t ref, MarginLoss margin, bool exact, int threads) {
  Objective objective = ModelObjective(model, example);
  objective.SetExtra(
      [&](std::span<const int> y) { return MarginValue(margin, y, example, ref); });
  Selection sel;
  if (exact) {
    sel = BruteForceOpt(objective, example.budget);
  } else {
    GreedyOptions options;
    options.lazy = false;
    options.threads = threads;
    sel = GreedyMaximize(objective, example.budget, options);
  }
  return Inference{sel.items, sel.value};
}

double HingeLoss(const MixtureModel& model, const TrainingExample& example, std::size_t ref,
                 const Inference& inference) {
  return inference.value - MixtureEval(model, example.references.at(ref), example);
}

std::vector<double> HingeGradient(const MixtureModel& model, const TrainingExample& example,
                                  std::size_t ref, std::span<const int> y_hat) {
  const std::size_t m = model.size();
  const ItemSet& r = example.references.at(ref);
  const Instance& instance = *example.instance;
  const std::vector<char> mask = ActiveMask(model);
  std::vector<double> grad(4 * m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    const Measure measure = ComponentMeasure(model, c, example);
    grad[kWeight * m + c] = Evaluate(measure, y_hat, instance) - Evaluate(measure, r, instance);
    const ParameterGradient gy = MeasureGradient(measure, y_hat, instance);
    const ParameterGradient gr = MeasureGradient(measure, r, instance);
    const double w = model.weights[c];
    grad[kLambda * m + c] = w * (gy.lambda - gr.lambda);
    grad[kEta * m + c] = w * (gy.eta - gr.eta);
    grad[kNu * m + c] = w * (gy.nu - gr.nu);
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!mask[i]) grad[i] = 0.0;
  }
  return grad;
}

LossAndGradient BatchLossAndGradient(const MixtureModel& model,
                                     std::span<const TrainingExample> dataset,
                                     const TrainConfig& config) {
  if (dataset.empty()) throw ConfigError("training set is empty");
  const std::size_t dim = 4 * model.size();
  std::vector<double> hinge(dataset.size(), 0.0);
  std::vector<std::vector<double>> grads(dataset.size(), std::vector<double>(dim, 0.0));
  ParallelFor(dataset.size(), ResolveThreads(config.threads), [&](std::size_t n) {
    const TrainingExample& ex = dataset[n];
    const std::size_t refs = ex.references.size();
    for (std::size_t r = 0; r < refs; ++r) {
      const Inference inf =
          LossAugmentedInference(model, ex, r, config.margin, config.exact_inference, 1);
      hinge[n] += HingeLoss(model, ex, r, inf) / refs;
      const std::vector<double> g = HingeGradient(model, ex, r, inf.summary);
      for (std::size_t i = 0; i < dim; ++i) grads[n][i] += g[i] / refs;
    }
  });

  LossAndGradient out;
  out.gradient.assign(dim, 0.0);
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    out.hinge += hinge[n];
    for (std::size_t i = 0; i < dim; ++i) out.gradient[i] += grads[n][i];
  }
  const double scale = 1.0 / static_cast<double>(dataset.size());
  out.hinge *= scale;
  for (double& g : out.gradient) g *= scale;

  const std::vector<double> theta = PackTheta(model);
  const std::vector<char> mask = ActiveMask(model);
  double norm = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (!mask[i]) continue;
    norm += theta[i] * theta[i];
    out.gradient[i] += model.reg_strength * theta[i];
  }
  out.objective = out.hinge + 0.5 * model.reg_strength * norm;
  return out;
}

ItemSet Summarize(const MixtureModel& model, const TrainingExample& example, int threads) {
  GreedyOptions options;
  options.threads = threads;
  return GreedyMaximize(ModelObjective(model, example), example.budget, options).items;
}

double ExampleVRouge(std::span<const int> summary, const TrainingExample& example) {
  return VRouge(summary, example.references, *example.instance).value;
}

// Training --------------------------------------------------------------------------

TrainResult Train(std::span<const TrainingExample> dataset, const MixtureModel& initial,
                  const TrainConfig& config) {
  ValidateModel(initial);
  ValidateConfig(config);
  if (dataset.empty()) throw ConfigError("training set is empty");
  for (const TrainingExample& ex : dataset) ValidateExample(ex);

  const std::vector<char> mask = ActiveMask(initial);
  const std::size_t dim = mask.size();
  std::vector<double> theta = PackTheta(initial);
  std::vector<double> velocity(dim, 0.0);
  MixtureModel work = initial;

  auto mean_vrouge = [&](const MixtureModel& model) {
    std::vector<double> scores(dataset.size());
    ParallelFor(dataset.size(), ResolveThreads(config.threads), [&](std::size_t n) {
      scores[n] = ExampleVRouge(Summarize(model, dataset[n]), dataset[n]);
    });
    double s = 0.0;
    for (double v : scores) s += v;
    return s / static_cast<double>(scores.size());
  };
  std::vector<double> last_finite = theta;
  auto evaluate = [&](const std::vector<double>& at) {
    UnpackTheta(at, work);
    LossAndGradient lg = BatchLossAndGradient(work, dataset, config);
    bool finite = std::isfinite(lg.objective);
    for (double g : lg.gradient) finite = finite && std::isfinite(g);
    if (!finite) {
      throw NumericError("training diverged; last finite Theta " + ThetaJson(last_finite));
    }
    last_finite = at;
    return lg;
  };

  TrainResult result;
  const LossAndGradient start = evaluate(theta);
  result.initial_objective = start.objective;
  result.trace.push_back({0, start.objective, start.hinge, mean_vrouge(work)});
  std::vector<double> best = theta;
  double best_objective = start.objective;

  const double mu = config.momentum;
  const double lr = config.learning_rate;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<double> look(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      look[i] = mask[i] ? std::max(theta[i] + mu * velocity[i], 0.0) : theta[i];
    }
    const LossAndGradient lg = evaluate(look);
    result.trace.push_back({epoch, lg.objective, lg.hinge, mean_vrouge(work)});
    if (lg.objective < best_objective) {
      best_objective = lg.objective;
      best = look;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (!mask[i]) continue;
      velocity[i] = mu * velocity[i] - lr * lg.gradient[i];
      theta[i] = std::max(theta[i] + velocity[i], 0.0);
    }
  }
  const LossAndGradient final_lg = evaluate(theta);
  if (final_lg.objective < best_objective) {
    best_objective = final_lg.objective;
    best = theta;
  }

  result.model = initial;
  UnpackTheta(best, result.model);
  result.model.epochs_run = config.epochs;
  result.model.loss_trace.clear();
  for (const TrainRecord& rec : result.trace) result.model.loss_trace.push_back(rec.objective);
  result.best_objective = best_objective;
  return result;
}

// Gradient check ----------------------------------------------------------------------

GradientCheck FiniteDiffCheck(const MixtureModel& model, const TrainingExample& example,
                              std::size_t ref, std::span<const int> y_hat, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const std::vector<double> analytic = HingeGradient(model, example, ref, y_hat);
  const std::vector<char> mask = ActiveMask(model);
  const std::vector<double> theta = PackTheta(model);
  const ItemSet& r = example.references.at(ref);
  MixtureModel work = model;
  auto loss = [&](const std::vector<double>& at) {
    UnpackTheta(at, work);
    return MixtureEval(work, y_hat, example) - MixtureEval(work, r, example);
  };
  const double f0 = loss(theta);
  const std::size_t m = model.size();

  GradientCheck check;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    GradientCheckEntry e;
    e.index = i;
    e.name = ThetaName(model, i);
    e.analytic = analytic[i];
    if (mask[i]) {
      std::vector<double> at = theta;
      double fwd, bwd;
      // Parameters other than weights must stay nonnegative.
      if (i >= m && theta[i] < h) {
        at[i] = theta[i] + h;
        const double f1 = loss(at);
        at[i] = theta[i] + 2.0 * h;
        const double f2 = loss(at);
        e.numeric = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
        fwd = (f1 - f0) / h;
        bwd = (f2 - f1) / h;
      } else {
        at[i] = theta[i] + h;
        const double fp = loss(at);
        at[i] = theta[i] - h;
        const double fm = loss(at);
        e.numeric = (fp - fm) / (2.0 * h);
        fwd = (fp - f0) / h;
        bwd = (f0 - fm) / h;
      }
      e.kink = std::abs(fwd - bwd) > 1e-3 * std::max({1.0, std::abs(fwd), std::abs(bwd)});
    }
    const double diff = std::abs(e.analytic - e.numeric);
    e.relative_error = diff <= 1e-8 ? 0.0 : diff / (std::abs(e.analytic) + 1e-12);
    if (mask[i] && !e.kink) {
      check.max_relative_error = std::max(check.max_relative_error, e.relative_error);
    }
    check.entries.push_back(e);
  }
  return check;
}

// Leave-one-out -------------------------------------------------------------------------

LeaveOneOutResult LeaveOneOut(std::span<const TrainingExample> dataset,
                              const MixtureModel& initial, const TrainConfig& config) {
  if (dataset.size() < 2) throw ConfigError("leave-one-out needs at least two examples");
  LeaveOneOutResult out;
  const std::size_t m = initial.size();
  out.baseline_means.assign(m, 0.0);
  for (std::size_t held = 0; held < dataset.size(); ++held) {
    std::vector<TrainingExample> train;
    for (std::size_t n = 0; n < dataset.size(); ++n) {
      if (n != held) train.push_back(dataset[n]);
    }
    const TrainResult trained = Train(train, initial, config);
    const TrainingExample& test = dataset[held];
    FoldResult fold;
    fold.held_out = test.name;
    fold.mixture = ExampleVRouge(Summarize(trained.model, test), test);
    for (std::size_t c = 0; c < m; ++c) {
      MixtureModel single = initial;
      std::fill(single.weights.begin(), single.weights.end(), 0.0);
      single.weights[c] = 1.0;
      fold.baselines.push_back(ExampleVRouge(Summarize(single, test), test));
    }
    out.mixture_mean += fold.mixture;
    for (std::size_t c = 0; c < m; ++c) out.baseline_means[c] += fold.baselines[c];
    out.folds.push_back(std::move(fold));
  }
  const double n = static_cast<double>(dataset.size());
  out.mixture_mean /= n;
  for (double& b : out.baseline_means) b /= n;
  return out;
}

}  // namespace submodinfo
