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

// Max-margin learning of measure mixtures.
//
// The parameter vector Theta is laid out in blocks of M entries:
// [w_1..w_M, lambda_1..lambda_M, eta_1..eta_M, nu_1..nu_M]. Entries that do
// not influence their component are frozen and never updated.

#ifndef SUBMODINFO_LEARNING_H_
#define SUBMODINFO_LEARNING_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "submodinfo/functions.h"
#include "submodinfo/instance.h"
#include "submodinfo/optimizer.h"

namespace submodinfo {

struct MixtureComponent {
  FunctionSpec spec;
  // Overrides the task's mode, e.g. a plain diversity term in a query task.
  std::optional<MeasureMode> mode;
};

struct MixtureModel {
  std::vector<MixtureComponent> components;
  std::vector<double> weights;
  double reg_strength = 1e-3;
  Flavor task = Flavor::kGeneric;

  // Metadata filled by Train.
  int epochs_run = 0;
  std::vector<double> loss_trace;

  std::size_t size() const { return components.size(); }
};

// Throws ConfigError when shapes or values are invalid.
void ValidateModel(const MixtureModel& model);

nlohmann::json ModelToJson(const MixtureModel& model);
MixtureModel ModelFromJson(const nlohmann::json& j);

// Weights uniform in [0, 2/sqrt(M)] from the seed; lambda, eta and nu keep
// the values in each component spec.
MixtureModel InitModel(std::vector<MixtureComponent> components, Flavor task,
                       std::uint64_t seed, double reg_strength = 1e-3);

std::vector<double> PackTheta(const MixtureModel& model);
void UnpackTheta(std::span<const double> theta, MixtureModel& model);
// 1 for entries that are learned, 0 for frozen ones.
std::vector<char> ActiveMask(const MixtureModel& model);
// Human-readable name of a Theta entry, e.g. "eta[2]".
std::string ThetaName(const MixtureModel& model, std::size_t index);

struct TrainingExample {
  std::string name;
  std::shared_ptr<const Instance> instance;
  FlavorSets sets;
  std::vector<ItemSet> references;
  int budget = 5;
};

// Throws ConfigError when a reference leaves V or exceeds the budget.
void ValidateExample(const TrainingExample& example);

enum class MarginLoss { kOneMinusVRouge, kZeroOne };

const char* MarginName(MarginLoss margin);
MarginLoss ParseMargin(const std::string& name);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.05;
  double momentum = 0.9;
  MarginLoss margin = MarginLoss::kOneMinusVRouge;
  // Brute-force loss-augmented inference instead of greedy (small tests).
  bool exact_inference = false;
  int threads = 0;
};

void ValidateConfig(const TrainConfig& config);

// The measure component `c` evaluates on an example.
Measure ComponentMeasure(const MixtureModel& model, std::size_t c,
                         const TrainingExample& example);

// sum_i w_i component_i(Y).
double MixtureEval(const MixtureModel& model, std::span<const int> y,
                   const TrainingExample& example);

// l_n(Y) for the reference `ref` of the example.
double MarginValue(MarginLoss margin, std::span<const int> y, const TrainingExample& example,
                   std::size_t ref);

struct Inference {
  ItemSet summary;
  double value = 0.0;  // F(Y) + l(Y)
};

Inference LossAugmentedInference(const MixtureModel& model, const TrainingExample& example,
                                 std::size_t ref, MarginLoss margin, bool exact = false,
                                 int threads = 1);

// [F(Y_hat) + l(Y_hat)] - F(reference), not clamped.
double HingeLoss(const MixtureModel& model, const TrainingExample& example, std::size_t ref,
                 const Inference& inference);

// Subgradient of the hinge loss over Theta with Y_hat held fixed. No
// regularizer term.
std::vector<double> HingeGradient(const MixtureModel& model, const TrainingExample& example,
                                  std::size_t ref, std::span<const int> y_hat);

struct LossAndGradient {
  double hinge = 0.0;      // mean over examples and their references
  double objective = 0.0;  // hinge + reg/2 ||Theta_active||^2
  std::vector<double> gradient;
};

// Full-batch objective and gradient at the model's Theta. Examples run in
// parallel and are reduced in index order.
LossAndGradient BatchLossAndGradient(const MixtureModel& model,
                                     std::span<const TrainingExample> dataset,
                                     const TrainConfig& config);

struct TrainRecord {
  int epoch = 0;
  double objective = 0.0;
  double hinge = 0.0;
  double vrouge = 0.0;  // mean V-ROUGE of plain greedy summaries
};

struct TrainResult {
  MixtureModel model;
  std::vector<TrainRecord> trace;
  double initial_objective = 0.0;
  double best_objective = 0.0;
};

// Nesterov accelerated subgradient descent with projection onto Theta >= 0,
// one full-batch step per epoch. Returns the evaluated Theta with the lowest
// objective. Throws NumericError (carrying the last finite Theta) when the
// objective stops being finite.
TrainResult Train(std::span<const TrainingExample> dataset, const MixtureModel& initial,
                  const TrainConfig& config);

// Greedy summary under the model (no margin).
ItemSet Summarize(const MixtureModel& model, const TrainingExample& example, int threads = 1);

// Mean V-ROUGE of a summary against all references of the example.
double ExampleVRouge(std::span<const int> summary, const TrainingExample& example);

struct GradientCheckEntry {
  std::size_t index = 0;
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
  bool kink = false;
};

struct GradientCheck {
  double max_relative_error = 0.0;  // over active, non-kink entries
  std::vector<GradientCheckEntry> entries;
};

// Central differences of the hinge loss with Y_hat frozen. An entry is a kink
// when the one-sided differences disagree.
GradientCheck FiniteDiffCheck(const MixtureModel& model, const TrainingExample& example,
                              std::size_t ref, std::span<const int> y_hat, double h = 1e-5);

struct FoldResult {
  std::string held_out;
  double mixture = 0.0;
  std::vector<double> baselines;  // one per component
};

struct LeaveOneOutResult {
  std::vector<FoldResult> folds;
  double mixture_mean = 0.0;
  std::vector<double> baseline_means;
};

// Trains on N-1 examples and scores the held-out one, for every split. The
// baseline for component i is that component alone with unit weight.
LeaveOneOutResult LeaveOneOut(std::span<const TrainingExample> dataset,
                              const MixtureModel& initial, const TrainConfig& config);

}  // namespace submodinfo

#endif  // SUBMODINFO_LEARNING_H_
