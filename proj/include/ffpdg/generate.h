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

// End-to-end fair and private generation: binarize, solve the fair max-ent
// distribution, sample and invert it to a fair dataset, then fit RON-Gauss on
// the fair dataset and sample from it.

#ifndef FFPDG_GENERATE_H_
#define FFPDG_GENERATE_H_

#include <optional>
#include <string>
#include <vector>

#include "ffpdg/binarize.h"
#include "ffpdg/dataset.h"
#include "ffpdg/fairmaxent.h"
#include "ffpdg/rongauss.h"

namespace ffpdg {

struct PipelineConfig {
  int bins = 1;
  // Additive smoothing of the empirical prior.
  double smooth = 0.1;
  // Statistical-rate target; 1 is exact parity.
  double tau = 1.0;
  MaxEntOptions maxent;
  GenerationConfig generation;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  Dataset synthetic;
  // Intermediate fair sample, inverse-mapped to the original format.
  Dataset fair;
  CodeBook codebook;
  ConstraintSet constraints;
  MaxEntSolution solution;
  GroupRates rates_before;
  GroupRates rates_after;
  RonGaussModel model;
  std::vector<StageTiming> timings;

  double total_seconds() const;
};

// Runs the full pipeline. Errors are rethrown with the failing step, e.g.
// "step 2 (fair max-ent): ...", keeping the original exception type.
PipelineResult Generate(const Dataset& dataset, const PipelineConfig& config);

// Audit text: codebook layout, max-ent multipliers and residual, group rates
// before and after the fairness stage, and privacy accounting.
std::string FormatAudit(const PipelineResult& result);

// "dp_reported=eps_mu+eps_sigma=<eps>" plus the caveat that the max-ent stage
// is not covered.
std::string BudgetLine(const PrivacyBudget& budget);

}  // namespace ffpdg

#endif  // FFPDG_GENERATE_H_
