// Copyright 2026 The FFPDG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Utility, fairness and distinguishability metrics for synthetic data.

#ifndef FFPDG_METRICS_H_
#define FFPDG_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffpdg/dataset.h"
#include "ffpdg/models.h"

namespace ffpdg {

// Probability threshold turning model scores into hard predictions (p > 0.5).
inline constexpr double kPredictionThreshold = 0.5;

// Mann-Whitney statistic with average ranks for ties. Labels are 0/1 and both
// classes must be present.
double AucRoc(std::span<const double> scores, std::span<const double> labels);

// |TPR(C=0) - TPR(C=1)| for 0/1 predictions. Throws when a group has no
// positive labels.
double Deo(std::span<const double> predictions, std::span<const double> labels,
           std::span<const double> protected_values);

// |P(pred=1 | C=0) - P(pred=1 | C=1)|. Throws when a group is empty.
double Dsp(std::span<const double> predictions,
           std::span<const double> protected_values);

struct DisparateImpactResult {
  double ratio = 0.0;
  // ratio <= 0.8
  bool flagged = false;
};

// P(Y=1 | C=0) / P(Y=1 | C=1). Throws when the C=1 positive rate is zero or
// a group is empty.
DisparateImpactResult DisparateImpact(std::span<const double> labels,
                                      std::span<const double> protected_values);

struct ModelScore {
  ModelKind kind;
  double auc = 0.0;
  double deo = 0.0;
  double dsp = 0.0;
};

struct TstrResult {
  double best_auc = 0.0;
  std::vector<ModelScore> per_model;
  // "<model>: <reason>" for models that failed to fit.
  std::vector<std::string> skipped;
};

// Fits every zoo model on `synthetic` and scores it on `real_test`. DEO and
// DSP use real_test labels and protected values. The protected column is a
// model input only when `include_protected` is set. Throws only when every
// model fails.
TstrResult Tstr(const Dataset& synthetic, const Dataset& real_test,
                std::span<const ModelKind> zoo, bool include_protected = false,
                const ClassifierOptions& options = {});

// 1 - mean AUC of a stratified k-fold logistic-regression discriminator
// separating real rows (origin 1) from synthetic rows (origin 0). The larger
// set is subsampled to the size of the smaller one.
double Lrd(const Dataset& real, const Dataset& synthetic, int folds,
           uint64_t seed);

struct EvalOptions {
  int folds = 5;
  uint64_t seed = 0;
  std::vector<ModelKind> zoo = AllModelKinds();
  // Feed the protected column to the zoo models. Off by default: the
  // protected attribute is used for the fairness metrics only.
  bool include_protected = false;
};

struct EvalReport {
  double aucroc_best = 0.0;
  std::vector<ModelScore> per_model;
  std::vector<std::string> skipped;
  // Averages over the fitted models.
  double deo = 0.0;
  double dsp = 0.0;
  // Disparate impact of the synthetic labels; unset when undefined.
  std::optional<DisparateImpactResult> disparate_impact;
  std::string disparate_impact_error;
  double lrd = 0.0;
  int folds = 5;
  uint64_t seed = 0;
  bool include_protected = false;
};

// DEO/DSP come from zoo predictions on real_test, LRD compares real_train
// with synthetic. All three datasets must share a schema with a label.
EvalReport Evaluate(const Dataset& real_train, const Dataset& real_test,
                    const Dataset& synthetic, const EvalOptions& options = {});

// Exactly five "key=value" lines: aucroc_best, deo, dsp, di_ratio, lrd.
std::string FormatKeyValues(const EvalReport& report);
// Aligned table with per-model rows and the summary metrics.
std::string FormatTable(const EvalReport& report);

}  // namespace ffpdg

#endif  // FFPDG_METRICS_H_
