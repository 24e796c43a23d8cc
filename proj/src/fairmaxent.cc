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

#include "ffpdg/fairmaxent.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "ffpdg/error.h"
#include "ffpdg/random.h"

namespace ffpdg {
namespace {

// Row-major |support| x dimension matrix of sufficient statistics.
std::vector<double> StatisticsMatrix(const DiscreteDistribution& dist,
                                     const ConstraintSet& constraints) {
  const size_t k = constraints.dimension();
  std::vector<double> phi;
  phi.reserve(dist.support.size() * k);
  for (const BinaryCode& code : dist.support) {
    const auto row = SufficientStatistics(code, constraints);
    phi.insert(phi.end(), row.begin(), row.end());
  }
  return phi;
}

struct DualState {
  double objective = 0.0;
  std::vector<double> probs;
  std::vector<double> gradient;
};

// Evaluates the dual, the tilted distribution and the gradient in one pass.
// Log-weights are shifted by their maximum so exp never overflows.
DualState EvaluateDual(std::span<const double> log_prior,
                       std::span<const double> phi,
                       std::span<const double> target,
                       std::span<const double> lambda) {
  const size_t n = log_prior.size();
  const size_t k = target.size();
  DualState s;
  s.probs.resize(n);
  double max_score = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    double score = log_prior[i];
    for (size_t j = 0; j < k; ++j) score += lambda[j] * phi[i * k + j];
    s.probs[i] = score;
    max_score = std::max(max_score, score);
  }
  double z = 0.0;
  for (size_t i = 0; i < n; ++i) {
    s.probs[i] = std::exp(s.probs[i] - max_score);
    z += s.probs[i];
  }
  const double log_z = max_score + std::log(z);
  for (double& p : s.probs) p /= z;

  s.gradient.assign(k, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < k; ++j) s.gradient[j] += s.probs[i] * phi[i * k + j];
  }
  double dot = 0.0;
  for (size_t j = 0; j < k; ++j) {
    s.gradient[j] -= target[j];
    dot += lambda[j] * target[j];
  }
  s.objective = log_z - dot;
  return s;
}

double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void ValidateDistribution(const DiscreteDistribution& dist) {
  if (dist.support.empty()) throw InvalidArgument("distribution has no support");
  if (dist.support.size() != dist.probs.size()) {
    throw InvalidArgument("support and probability sizes differ");
  }
  std::set<BinaryCode> seen;
  double total = 0.0;
  for (size_t i = 0; i < dist.support.size(); ++i) {
    if (dist.support[i].size() != dist.support[0].size()) {
      throw InvalidArgument("support codes have different lengths");
    }
    if (!seen.insert(dist.support[i]).second) {
      throw InvalidArgument("duplicate support code " +
                            ToString(dist.support[i]));
    }
    if (!(dist.probs[i] >= 0.0)) throw InvalidArgument("negative probability");
    total += dist.probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("probabilities do not sum to 1");
  }
}

DiscreteDistribution EmpiricalPrior(const BinaryTable& table, double smooth) {
  if (table.codes.empty()) throw InvalidArgument("empty binary table");
  if (!(smooth >= 0.0)) throw InvalidArgument("smooth must be >= 0");
  std::map<BinaryCode, size_t> counts;
  for (const BinaryCode& c : table.codes) ++counts[c];
  const double denom = static_cast<double>(table.codes.size()) +
                       smooth * static_cast<double>(counts.size());
  DiscreteDistribution dist;
  for (const auto& [code, count] : counts) {
    dist.support.push_back(code);
    dist.probs.push_back((static_cast<double>(count) + smooth) / denom);
  }
  return dist;
}

std::vector<double> ConstraintSet::Flatten() const {
  std::vector<double> out = marginals;
  if (joint) out.push_back(*joint);
  return out;
}

std::vector<double> SufficientStatistics(const BinaryCode& code,
                                         const ConstraintSet& constraints) {
  if (code.size() != constraints.marginals.size()) {
    throw InvalidArgument("code length does not match constraint length");
  }
  std::vector<double> phi(code.bits.begin(), code.bits.end());
  if (constraints.joint) {
    phi.push_back(static_cast<double>(code.bits[constraints.protected_bit] *
                                      code.bits[constraints.label_bit]));
  }
  return phi;
}

ConstraintSet FairMarginals(const BinaryTable& table, size_t protected_bit,
                            size_t label_bit, double tau) {
  if (table.codes.empty()) throw InvalidArgument("empty binary table");
  const size_t m = table.code_length;
  if (protected_bit >= m || label_bit >= m) {
    throw InvalidArgument("protected/label bit out of range");
  }
  if (protected_bit == label_bit) {
    throw InvalidArgument("protected and label bits must differ");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw InvalidArgument("statistical rate tau must lie in (0, 1]");
  }
  ConstraintSet cs;
  cs.protected_bit = protected_bit;
  cs.label_bit = label_bit;
  cs.marginals.assign(m, 0.0);
  double joint = 0.0;
  for (const BinaryCode& c : table.codes) {
    for (size_t j = 0; j < m; ++j) cs.marginals[j] += c.bits[j];
    joint += c.bits[protected_bit] * c.bits[label_bit];
  }
  const double n = static_cast<double>(table.codes.size());
  for (double& v : cs.marginals) v /= n;
  joint /= n;

  const double a = cs.marginals[protected_bit];  // P(C=1)
  const double y = cs.marginals[label_bit];      // P(Y=1)
  if (a <= 0.0 || a >= 1.0) {
    throw InvalidArgument("both protected groups must be present");
  }
  const double rate1 = joint / a;              // P(Y=1 | C=1)
  const double rate0 = (y - joint) / (1 - a);  // P(Y=1 | C=0)
  const double hi = std::max(rate0, rate1);
  const double lo = std::min(rate0, rate1);
  if (hi <= 0.0 || lo >= tau * hi) {
    cs.joint = joint;
  } else if (rate1 > rate0) {
    // Solve rate0 = tau * rate1 with P(C=1) and P(Y=1) fixed.
    cs.joint = y * a / (a + tau * (1 - a));
  } else {
    cs.joint = tau * a * y / ((1 - a) + tau * a);
  }
  return cs;
}

double DualObjective(const DiscreteDistribution& prior,
                     const ConstraintSet& constraints,
                     std::span<const double> lambda) {
  std::vector<double> log_prior(prior.probs.size());
  for (size_t i = 0; i < log_prior.size(); ++i) {
    log_prior[i] = std::log(prior.probs[i]);
  }
  const auto phi = StatisticsMatrix(prior, constraints);
  const auto target = constraints.Flatten();
  return EvaluateDual(log_prior, phi, target, lambda).objective;
}

MaxEntSolution SolveMaxEnt(const DiscreteDistribution& prior,
                           const ConstraintSet& constraints,
                           const MaxEntOptions& options) {
  ValidateDistribution(prior);
  const std::vector<double> target = constraints.Flatten();
  const size_t k = target.size();
  const std::vector<double> phi = StatisticsMatrix(prior, constraints);
  const size_t n = prior.support.size();

  for (size_t j = 0; j < k; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t i = 0; i < n; ++i) {
      lo = std::min(lo, phi[i * k + j]);
      hi = std::max(hi, phi[i * k + j]);
    }
    if (target[j] < lo - 1e-12 || target[j] > hi + 1e-12) {
      throw InvalidArgument("infeasible constraint " + std::to_string(j) +
                            ": target " + std::to_string(target[j]) +
                            " outside support range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
    }
  }

  std::vector<double> log_prior(n);
  for (size_t i = 0; i < n; ++i) {
    // Zero-probability support points can never gain mass.
    log_prior[i] = prior.probs[i] > 0.0
                       ? std::log(prior.probs[i])
                       : -std::numeric_limits<double>::infinity();
  }

  MaxEntSolution sol;
  sol.target = target;
  sol.lambda.assign(k, 0.0);
  DualState state = EvaluateDual(log_prior, phi, target, sol.lambda);
  if (options.record_objective) sol.objective_history.push_back(state.objective);

  std::vector<double> trial(k);
  int iter = 0;
  while (MaxAbs(state.gradient) > options.tolerance &&
         iter < options.max_iterations) {
    double grad_sq = 0.0;
    for (double g : state.gradient) grad_sq += g * g;
    double step = options.initial_step;
    DualState next;
    bool accepted = false;
    while (step > 1e-20) {
      for (size_t j = 0; j < k; ++j) {
        trial[j] = sol.lambda[j] - step * state.gradient[j];
      }
      next = EvaluateDual(log_prior, phi, target, trial);
      if (next.objective <=
          state.objective - options.armijo * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= options.backtrack_factor;
    }
    ++iter;
    if (!accepted) break;  // No descent possible at double precision.
    sol.lambda = trial;
    state = std::move(next);
    if (options.record_objective) {
      sol.objective_history.push_back(state.objective);
    }
  }

  sol.iterations = iter;
  sol.residual = MaxAbs(state.gradient);
  sol.converged = sol.residual <= options.tolerance;
  sol.distribution.support = prior.support;
  sol.distribution.probs = std::move(state.probs);
  // Renormalize in a fixed order so the sum is 1 to the last bit we can get.
  const double total = std::accumulate(sol.distribution.probs.begin(),
                                       sol.distribution.probs.end(), 0.0);
  for (double& p : sol.distribution.probs) p /= total;

  if (!sol.converged && options.require_convergence) {
    throw NotConverged("max-entropy dual did not converge: residual " +
                       std::to_string(sol.residual) + " after " +
                       std::to_string(sol.iterations) + " iterations");
  }
  return sol;
}

std::vector<BinaryCode> SampleCodes(const DiscreteDistribution& dist, size_t k,
                                    uint64_t seed) {
  if (k == 0) throw InvalidArgument("sample size must be >= 1");
  ValidateDistribution(dist);
  std::vector<double> cdf(dist.probs.size());
  std::partial_sum(dist.probs.begin(), dist.probs.end(), cdf.begin());
  Rng rng(seed);
  std::vector<BinaryCode> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    const double u = rng.Uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t idx = static_cast<size_t>(it - cdf.begin());
    if (idx >= cdf.size()) idx = cdf.size() - 1;
    out.push_back(dist.support[idx]);
  }
  return out;
}

double GroupRates::gap() const {
  return std::abs(positive_rate_unprivileged - positive_rate_privileged);
}

GroupRates ComputeGroupRates(std::span<const BinaryCode> codes,
                             size_t protected_bit, size_t label_bit) {
  DiscreteDistribution dist;
  std::map<BinaryCode, size_t> counts;
  for (const BinaryCode& c : codes) ++counts[c];
  for (const auto& [code, count] : counts) {
    dist.support.push_back(code);
    dist.probs.push_back(static_cast<double>(count) /
                         static_cast<double>(codes.size()));
  }
  return ComputeGroupRates(dist, protected_bit, label_bit);
}

GroupRates ComputeGroupRates(const DiscreteDistribution& dist,
                             size_t protected_bit, size_t label_bit) {
  double c1 = 0.0, c1y1 = 0.0, c0y1 = 0.0;
  for (size_t i = 0; i < dist.support.size(); ++i) {
    const auto& bits = dist.support[i].bits;
    const double p = dist.probs[i];
    if (bits[protected_bit]) {
      c1 += p;
      if (bits[label_bit]) c1y1 += p;
    } else if (bits[label_bit]) {
      c0y1 += p;
    }
  }
  if (c1 <= 0.0 || c1 >= 1.0) {
    throw InvalidArgument("group rates need both protected groups");
  }
  GroupRates r;
  r.protected_rate = c1;
  r.positive_rate_privileged = c1y1 / c1;
  r.positive_rate_unprivileged = c0y1 / (1.0 - c1);
  return r;
}

}  // namespace ffpdg
