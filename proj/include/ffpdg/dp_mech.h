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

// Laplace-mechanism primitives for the Gaussian generative stage.

#ifndef FFPDG_DP_MECH_H_
#define FFPDG_DP_MECH_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ffpdg/random.h"

namespace ffpdg {

struct PrivacyBudget {
  double epsilon_total = 1.0;
  double epsilon_mu = 0.3;
  double epsilon_sigma = 0.7;

  // Splits `total` into mean and covariance budgets. mu_fraction in (0, 1).
  static PrivacyBudget FromTotal(double total, double mu_fraction = 0.3);
  // Parses "mu:sigma" weights (e.g. "0.3:0.7"), normalized to sum to 1.
  static PrivacyBudget FromSplit(double total, const std::string& split);

  // Throws InvalidArgument unless all parts are > 0 and mu + sigma == total.
  void Validate() const;
  // Same split scaled by `factor`.
  PrivacyBudget Scaled(double factor) const;
};

struct LaplaceParams {
  double scale = 1.0;
};

// Inverse CDF: -b * sign(u) * ln(1 - 2|u|) for u in (-1/2, 1/2).
double LaplaceFromUniform(double u, double scale);
double SampleLaplace(double scale, Rng& rng);
inline double SampleLaplace(const LaplaceParams& params, Rng& rng) {
  return SampleLaplace(params.scale, rng);
}
// P(X <= x) for X ~ Laplace(0, scale).
double LaplaceCdf(double x, double scale);

// 2 sqrt(d) / (n epsilon_mu).
double MeanNoiseScale(size_t d, size_t n, double epsilon_mu);
// 2 sqrt(p) / (n epsilon_sigma).
double CovarianceNoiseScale(size_t p, size_t n, double epsilon_sigma);

// Column mean of a d x n matrix of unit-norm columns plus i.i.d.
// Laplace(2 sqrt(d) / (n epsilon_mu)) noise per coordinate.
Eigen::VectorXd DpMean(const Eigen::MatrixXd& columns, double epsilon_mu,
                       Rng& rng);
Eigen::VectorXd DpMean(const Eigen::MatrixXd& columns, double epsilon_mu,
                       uint64_t seed);

// (1/n) X X^T plus a symmetric Laplace(2 sqrt(p) / (n epsilon_sigma)) noise
// matrix (upper triangle drawn row by row, mirrored), repaired to PSD.
Eigen::MatrixXd DpCovariance(const Eigen::MatrixXd& projected,
                             double epsilon_sigma, Rng& rng);
Eigen::MatrixXd DpCovariance(const Eigen::MatrixXd& projected,
                             double epsilon_sigma, uint64_t seed);

// Eigendecomposes a symmetric matrix, clips negative eigenvalues to zero and
// reconstructs it.
Eigen::MatrixXd RepairPsd(const Eigen::MatrixXd& symmetric);

}  // namespace ffpdg

#endif  // FFPDG_DP_MECH_H_
