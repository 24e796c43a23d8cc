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

#include "ffpdg/dp_mech.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ffpdg/error.h"

namespace ffpdg {

PrivacyBudget PrivacyBudget::FromTotal(double total, double mu_fraction) {
  if (!(total > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(mu_fraction > 0.0 && mu_fraction < 1.0)) {
    throw InvalidArgument("epsilon split must give both parts a share");
  }
  PrivacyBudget b;
  b.epsilon_total = total;
  b.epsilon_mu = mu_fraction * total;
  b.epsilon_sigma = total - b.epsilon_mu;
  return b;
}

PrivacyBudget PrivacyBudget::FromSplit(double total, const std::string& split) {
  const size_t colon = split.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("epsilon split must look like mu:sigma, got '" +
                          split + "'");
  }
  const std::string a = split.substr(0, colon);
  const std::string b = split.substr(colon + 1);
  char* end_a = nullptr;
  char* end_b = nullptr;
  const double mu = std::strtod(a.c_str(), &end_a);
  const double sigma = std::strtod(b.c_str(), &end_b);
  if (a.empty() || b.empty() || *end_a != '\0' || *end_b != '\0' ||
      !(mu > 0.0) || !(sigma > 0.0)) {
    throw InvalidArgument("epsilon split parts must be positive numbers, got '" +
                          split + "'");
  }
  return FromTotal(total, mu / (mu + sigma));
}

void PrivacyBudget::Validate() const {
  if (!(epsilon_total > 0.0 && epsilon_mu > 0.0 && epsilon_sigma > 0.0)) {
    throw InvalidArgument("privacy budget parts must be > 0");
  }
  if (std::abs(epsilon_mu + epsilon_sigma - epsilon_total) >
      1e-12 * std::max(1.0, epsilon_total)) {
    throw InvalidArgument("epsilon_mu + epsilon_sigma must equal epsilon");
  }
}

PrivacyBudget PrivacyBudget::Scaled(double factor) const {
  PrivacyBudget b;
  b.epsilon_total = epsilon_total * factor;
  b.epsilon_mu = epsilon_mu * factor;
  b.epsilon_sigma = b.epsilon_total - b.epsilon_mu;
  return b;
}

double LaplaceFromUniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

double SampleLaplace(double scale, Rng& rng) {
  if (!(scale > 0.0)) throw InvalidArgument("Laplace scale must be > 0");
  return LaplaceFromUniform(rng.UniformOpen() - 0.5, scale);
}

double LaplaceCdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

double MeanNoiseScale(size_t d, size_t n, double epsilon_mu) {
  return 2.0 * std::sqrt(static_cast<double>(d)) /
         (static_cast<double>(n) * epsilon_mu);
}

double CovarianceNoiseScale(size_t p, size_t n, double epsilon_sigma) {
  return 2.0 * std::sqrt(static_cast<double>(p)) /
         (static_cast<double>(n) * epsilon_sigma);
}

Eigen::VectorXd DpMean(const Eigen::MatrixXd& columns, double epsilon_mu,
                       Rng& rng) {
  const auto d = static_cast<size_t>(columns.rows());
  const auto n = static_cast<size_t>(columns.cols());
  if (n == 0 || d == 0) throw InvalidArgument("DP mean of empty matrix");
  if (!(epsilon_mu > 0.0)) throw InvalidArgument("epsilon_mu must be > 0");
  for (Eigen::Index i = 0; i < columns.cols(); ++i) {
    if (std::abs(columns.col(i).norm() - 1.0) > 1e-9) {
      throw InvalidArgument("DP mean needs unit-norm columns; column " +
                            std::to_string(i) + " has norm " +
                            std::to_string(columns.col(i).norm()));
    }
  }
  const double scale = MeanNoiseScale(d, n, epsilon_mu);
  Eigen::VectorXd mu = columns.rowwise().mean();
  for (Eigen::Index j = 0; j < mu.size(); ++j) mu(j) += SampleLaplace(scale, rng);
  return mu;
}

Eigen::VectorXd DpMean(const Eigen::MatrixXd& columns, double epsilon_mu,
                       uint64_t seed) {
  Rng rng(seed);
  return DpMean(columns, epsilon_mu, rng);
}

Eigen::MatrixXd DpCovariance(const Eigen::MatrixXd& projected,
                             double epsilon_sigma, Rng& rng) {
  const auto p = static_cast<size_t>(projected.rows());
  const auto n = static_cast<size_t>(projected.cols());
  if (n == 0 || p == 0) throw InvalidArgument("DP covariance of empty matrix");
  if (!(epsilon_sigma > 0.0)) {
    throw InvalidArgument("epsilon_sigma must be > 0");
  }
  const double scale = CovarianceNoiseScale(p, n, epsilon_sigma);
  Eigen::MatrixXd sigma =
      (projected * projected.transpose()) / static_cast<double>(n);
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = i; j < sigma.cols(); ++j) {
      const double z = SampleLaplace(scale, rng);
      sigma(i, j) += z;
      if (j != i) sigma(j, i) += z;
    }
  }
  return RepairPsd(sigma);
}

Eigen::MatrixXd DpCovariance(const Eigen::MatrixXd& projected,
                             double epsilon_sigma, uint64_t seed) {
  Rng rng(seed);
  return DpCovariance(projected, epsilon_sigma, rng);
}

Eigen::MatrixXd RepairPsd(const Eigen::MatrixXd& symmetric) {
  const Eigen::MatrixXd sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed during PSD repair");
  }
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() *
                        eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace ffpdg
