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

// Submodular base functions and their information measures.
//
// Every family defines a (possibly only restricted-submodular) base function
// f on subsets of Omega. The information measures are
//
//   SMI   I_f(A; Q)     = f(A) + f(Q) - f(A u Q)
//   CG    f(A | P)      = f(A u P) - f(P)
//   CSMI  I_f(A; Q | P) = f(A u P) + f(Q u P) - f(A u Q u P) - f(P)
//
// Evaluate() uses per-family closed forms; DefinitionalOracle() uses only the
// three identities above on top of BaseFunction, so the two routes can be
// checked against each other.
//
// Trade-off parameters act on the kernel seen by the base function: eta
// scales similarities between V and the query elements, nu scales
// similarities between V and the conditioning elements. Within-V and
// within-V' similarities are never scaled. The exceptions are FL2 and COM,
// where eta is a coefficient on the V-row block of a cross-only kernel.

#ifndef SUBMODINFO_FUNCTIONS_H_
#define SUBMODINFO_FUNCTIONS_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "submodinfo/function_spec.h"
#include "submodinfo/instance.h"

namespace submodinfo {

// A family, a mode and the fixed sets the mode conditions on.
struct Measure {
  FunctionSpec spec;
  MeasureMode mode = MeasureMode::kBase;
  ItemSet query;         // Q (SMI, CSMI)
  ItemSet conditioning;  // P or a previous summary A0 (CG, CSMI)
};

// Similarity lookup with role scaling and an optional cross-only mask.
class KernelView {
 public:
  KernelView(const Eigen::MatrixXd& matrix, int ground_size, bool cross_only = false);

  // Multiplies similarities between V and `elements` (those in V') by `factor`.
  void ScaleCross(std::span<const int> elements, double factor);

  double operator()(int i, int j) const {
    const bool gi = i < ground_size_;
    const bool gj = j < ground_size_;
    if (gi == gj) {
      if (cross_only_) return i == j ? 1.0 : 0.0;
      return (*matrix_)(i, j);
    }
    return (*matrix_)(i, j) * scale_[gi ? j : i];
  }

  // Derivative of operator() with respect to the factor applied to
  // `elements`, i.e. the raw cross similarity where that factor applies.
  double CrossDerivative(int i, int j, std::span<const int> elements) const;

  int size() const { return static_cast<int>(matrix_->rows()); }
  int ground_size() const { return ground_size_; }

  Eigen::MatrixXd Block(std::span<const int> rows, std::span<const int> cols) const;

 private:
  const Eigen::MatrixXd* matrix_;
  int ground_size_;
  bool cross_only_;
  std::vector<double> scale_;
};

// The (restricted) base function of a family, with the role scaling implied
// by the fixed sets of a measure.
class BaseFunction {
 public:
  BaseFunction(const FunctionSpec& spec, const Instance& instance,
               std::span<const int> query = {}, std::span<const int> conditioning = {});

  // f(S) for any S subset of Omega with distinct elements; f(empty) = 0.
  double operator()(std::span<const int> s) const;

  const KernelView& kernel() const { return view_; }
  const FunctionSpec& spec() const { return spec_; }

 private:
  FunctionSpec spec_;
  const Instance* instance_;
  KernelView view_;
};

// The kernel view a family uses for the given fixed sets.
KernelView MakeFamilyView(const FunctionSpec& spec, const Instance& instance,
                          std::span<const int> query, std::span<const int> conditioning);

// f(S), S subset of Omega.
double EvalBase(const FunctionSpec& spec, std::span<const int> s, const Instance& instance);

// Closed forms. A must lie in V; A, Q and P must be pairwise disjoint.
double Smi(const FunctionSpec& spec, std::span<const int> a, std::span<const int> q,
           const Instance& instance);
double Cg(const FunctionSpec& spec, std::span<const int> a, std::span<const int> p,
          const Instance& instance);
double Csmi(const FunctionSpec& spec, std::span<const int> a, std::span<const int> q,
            std::span<const int> p, const Instance& instance);

// Dispatches to the closed form for the measure's mode.
double Evaluate(const Measure& measure, std::span<const int> a, const Instance& instance);

// Measure value from base-function evaluations only.
double DefinitionalOracle(const FunctionSpec& spec, MeasureMode mode, std::span<const int> a,
                          std::span<const int> q, std::span<const int> p,
                          const Instance& instance);

// Throws UnsupportedError when no closed form exists for (family, mode).
void CheckSupported(Family family, MeasureMode mode);
bool IsSupported(Family family, MeasureMode mode);

// True when greedy guarantees apply (monotone submodular on V) for the
// measure under nonnegative kernels.
bool IsMonotoneSubmodular(Family family, MeasureMode mode);

struct ParameterFlags {
  bool lambda = false;
  bool eta = false;
  bool nu = false;
};

// Parameters that influence the measure and have analytic derivatives.
ParameterFlags LearnableParameters(Family family, MeasureMode mode);

struct ParameterGradient {
  double lambda = 0.0;
  double eta = 0.0;
  double nu = 0.0;
};

// d measure(A) / d(lambda, eta, nu). Entries outside LearnableParameters are 0.
ParameterGradient MeasureGradient(const Measure& measure, std::span<const int> a,
                                  const Instance& instance);

// log det of the Schur complement L_X - L_XY L_Y^-1 L_YX, L = view + jitter I.
// Throws NumericError when a factorization fails.
double ConditionalLogDet(const KernelView& view, double jitter, std::span<const int> x,
                         std::span<const int> y);

}  // namespace submodinfo

#endif  // SUBMODINFO_FUNCTIONS_H_
