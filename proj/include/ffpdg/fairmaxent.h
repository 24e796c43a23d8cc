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

// Fair maximum-entropy re-distribution over binary codes.
//
// The fitted distribution is the I-projection of a smoothed empirical prior q
// onto the set of distributions whose expected sufficient statistics hit a
// target vector:
//
//   p(x) = q(x) exp(<lambda, phi(x)>) / Z(lambda)
//
// where phi(x) holds every bit of x plus the product x_protected * x_label.
// Fixing E[x_protected * x_label] = P(C=1) P(Y=1) while preserving the bit
// marginals forces P(Y=1 | C=0) = P(Y=1 | C=1).

#ifndef FFPDG_FAIRMAXENT_H_
#define FFPDG_FAIRMAXENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffpdg/binarize.h"

namespace ffpdg {

struct DiscreteDistribution {
  std::vector<BinaryCode> support;
  std::vector<double> probs;
};

// Throws InvalidArgument unless probs are nonnegative, sum to 1 within 1e-12
// and support codes are unique with equal length.
void ValidateDistribution(const DiscreteDistribution& dist);

// q(x) = (count(x) + smooth) / (n + smooth * |support|) over observed codes,
// support in ascending code order.
DiscreteDistribution EmpiricalPrior(const BinaryTable& table, double smooth);

// Expected sufficient statistics of the max-entropy model.
struct ConstraintSet {
  // Target E[bit_j] for every bit.
  std::vector<double> marginals;
  // Target E[x_protected * x_label]; absent means no joint statistic.
  std::optional<double> joint;
  size_t protected_bit = 0;
  size_t label_bit = 0;

  size_t dimension() const { return marginals.size() + (joint ? 1 : 0); }
  // (marginals..., joint) flattened.
  std::vector<double> Flatten() const;
};

// phi(x) for a code under `constraints`.
std::vector<double> SufficientStatistics(const BinaryCode& code,
                                         const ConstraintSet& constraints);

// Empirical bit means plus a joint target giving statistical rate `tau`
// (ratio of the smaller to the larger group positive rate). tau = 1 is exact
// parity. When the data already satisfies `tau` the empirical joint is kept.
ConstraintSet FairMarginals(const BinaryTable& table, size_t protected_bit,
                            size_t label_bit, double tau = 1.0);

struct MaxEntOptions {
  double tolerance = 1e-6;
  int max_iterations = 10000;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  // Armijo sufficient-decrease constant.
  double armijo = 1e-4;
  // Throw NotConverged when the tolerance is not reached.
  bool require_convergence = true;
  // Record the dual objective after every accepted step.
  bool record_objective = false;
};

struct MaxEntSolution {
  std::vector<double> lambda;
  std::vector<double> target;
  DiscreteDistribution distribution;
  // max_j |E_p[phi_j] - target_j| at termination.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;
};

// Dual objective log sum_x q(x) exp(<lambda, phi(x)>) - <lambda, target>.
double DualObjective(const DiscreteDistribution& prior,
                     const ConstraintSet& constraints,
                     std::span<const double> lambda);

// Minimizes the dual by gradient descent with backtracking line search.
// Throws InvalidArgument when a target lies outside the range of its
// statistic over the support, NotConverged when the tolerance is missed and
// options.require_convergence is set.
MaxEntSolution SolveMaxEnt(const DiscreteDistribution& prior,
                           const ConstraintSet& constraints,
                           const MaxEntOptions& options = {});

// k i.i.d. draws by inverse CDF over support order.
std::vector<BinaryCode> SampleCodes(const DiscreteDistribution& dist, size_t k,
                                    uint64_t seed);

struct GroupRates {
  double positive_rate_unprivileged = 0.0;  // P(Y=1 | C=0)
  double positive_rate_privileged = 0.0;    // P(Y=1 | C=1)
  double protected_rate = 0.0;              // P(C=1)

  double gap() const;
};

GroupRates ComputeGroupRates(std::span<const BinaryCode> codes,
                             size_t protected_bit, size_t label_bit);
GroupRates ComputeGroupRates(const DiscreteDistribution& dist,
                             size_t protected_bit, size_t label_bit);

}  // namespace ffpdg

#endif  // FFPDG_FAIRMAXENT_H_
