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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ffpdg/error.h"
#include "ffpdg/random.h"
#include "oracles.h"

namespace ffpdg {
namespace {

Eigen::MatrixXd UnitColumns(int d, int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) x(i, j) = rng.Normal();
    x.col(j).normalize();
  }
  return x;
}

TEST(PrivacyBudgetTest, DefaultSplit) {
  const PrivacyBudget b = PrivacyBudget::FromTotal(1.0);
  EXPECT_DOUBLE_EQ(b.epsilon_mu, 0.3);
  EXPECT_NEAR(b.epsilon_sigma, 0.7, 1e-15);
  EXPECT_NO_THROW(b.Validate());
  const PrivacyBudget d;
  EXPECT_NO_THROW(d.Validate());
  EXPECT_NEAR(d.epsilon_mu + d.epsilon_sigma, d.epsilon_total, 1e-12);
}

TEST(PrivacyBudgetTest, ParsesSplit) {
  const PrivacyBudget b = PrivacyBudget::FromSplit(2.0, "1:3");
  EXPECT_DOUBLE_EQ(b.epsilon_mu, 0.5);
  EXPECT_DOUBLE_EQ(b.epsilon_sigma, 1.5);
  EXPECT_THROW(PrivacyBudget::FromSplit(1.0, "0.3"), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::FromSplit(1.0, "0:1"), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::FromSplit(1.0, "a:b"), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::FromTotal(0.0), InvalidArgument);
  PrivacyBudget bad;
  bad.epsilon_sigma = 0.8;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
}

TEST(LaplaceTest, InverseCdf) {
  EXPECT_EQ(LaplaceFromUniform(0.0, 3.0), 0.0);
  EXPECT_NEAR(LaplaceFromUniform(0.25, 1.0), -std::log(0.5), 1e-15);
  EXPECT_NEAR(LaplaceFromUniform(-0.25, 2.0), 2.0 * std::log(0.5), 1e-15);
  EXPECT_NEAR(LaplaceCdf(LaplaceFromUniform(0.3, 1.5), 1.5), 0.8, 1e-12);
  Rng rng(1);
  EXPECT_THROW(SampleLaplace(0.0, rng), InvalidArgument);
}

TEST(LaplaceTest, MomentsAndKs) {
  Rng rng(2024);
  std::vector<double> s(1000000);
  double sum = 0.0, sq = 0.0;
  for (double& x : s) {
    x = SampleLaplace(1.0, rng);
    sum += x;
    sq += x * x;
  }
  const double n = static_cast<double>(s.size());
  const double mean = sum / n;
  EXPECT_NEAR(sq / n - mean * mean, 2.0, 0.05);
  std::vector<double> first(s.begin(), s.begin() + 100000);
  EXPECT_LT(testing::KsStatistic(first, [](double x) { return LaplaceCdf(x, 1.0); }),
            testing::KsCritical01(first.size()));

  Rng rng2(7);
  double m2 = 0.0;
  for (int i = 0; i < 1000000; ++i) m2 += SampleLaplace(LaplaceParams{0.5}, rng2);
  EXPECT_NEAR(m2 / 1e6, 0.0, 0.01);
}

TEST(NoiseScaleTest, Formulas) {
  EXPECT_NEAR(MeanNoiseScale(4, 100, 0.3), 4.0 / 30.0, 1e-15);
  EXPECT_NEAR(CovarianceNoiseScale(2, 50, 0.7), 2.0 * std::sqrt(2.0) / 35.0, 1e-15);
  EXPECT_NEAR(CovarianceNoiseScale(2, 50, 0.7), 0.0808, 1e-4);
}

TEST(DpMeanTest, HugeEpsilonIsEmpiricalMean) {
  const Eigen::MatrixXd x = UnitColumns(5, 200, 3);
  const Eigen::VectorXd mu = DpMean(x, 1e9, 11u);
  EXPECT_LE((mu - x.rowwise().mean()).cwiseAbs().maxCoeff(), 1e-6);
  const Eigen::MatrixXd one = UnitColumns(3, 1, 4);
  EXPECT_LE((DpMean(one, 1e12, 1u) - one.col(0)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(DpMeanTest, DeterministicAndSeedSensitive) {
  const Eigen::MatrixXd x = UnitColumns(4, 100, 5);
  EXPECT_EQ(DpMean(x, 0.3, 9u), DpMean(x, 0.3, 9u));
  EXPECT_NE(DpMean(x, 0.3, 9u), DpMean(x, 0.3, 10u));
}

TEST(DpMeanTest, NoiseHasCalibratedScale) {
  // Noise variance 2 b^2 with b = 2 sqrt(d) / (n eps).
  const Eigen::MatrixXd x = UnitColumns(4, 100, 6);
  const Eigen::VectorXd mean = x.rowwise().mean();
  Rng rng(12);
  double sq = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) sq += (DpMean(x, 0.3, rng) - mean).squaredNorm();
  const double b = MeanNoiseScale(4, 100, 0.3);
  EXPECT_NEAR(sq / (4.0 * trials), 2.0 * b * b, 0.05 * 2.0 * b * b);
}

TEST(DpMeanTest, RejectsNonUnitColumns) {
  Eigen::MatrixXd x = UnitColumns(3, 10, 1);
  x(0, 4) += 0.1;
  EXPECT_THROW(DpMean(x, 1.0, 1u), InvalidArgument);
  EXPECT_THROW(DpMean(Eigen::MatrixXd(3, 0), 1.0, 1u), InvalidArgument);
}

TEST(DpCovarianceTest, HugeEpsilonIsSecondMoment) {
  const Eigen::MatrixXd x = UnitColumns(3, 300, 8);
  const Eigen::MatrixXd s = DpCovariance(x, 1e9, 2u);
  const Eigen::MatrixXd exact = x * x.transpose() / 300.0;
  EXPECT_LE((s - exact).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(DpCovarianceTest, AlwaysSymmetricPsd) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::MatrixXd x = UnitColumns(6, 20, seed);
    const Eigen::MatrixXd s = DpCovariance(x, 0.05, seed);
    EXPECT_EQ((s - s.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(RepairPsdTest, ClipsNegativeEigenvalues) {
  Eigen::Matrix2d m;
  m << 1, 2, 2, 1;  // eigenvalues 3 and -1
  const Eigen::MatrixXd r = RepairPsd(m);
  Eigen::Matrix2d expected;
  expected << 1.5, 1.5, 1.5, 1.5;
  EXPECT_LE((r - expected).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::Matrix2d psd = Eigen::Vector2d(2, 0.5).asDiagonal();
  EXPECT_LE((RepairPsd(psd) - psd).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
}  // namespace ffpdg
