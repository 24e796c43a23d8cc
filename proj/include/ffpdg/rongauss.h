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

// Random-orthonormal-projection Gaussian generator (RON-Gauss).
//
// Fitting:
//   1. encode features (one-hot + white noise for categorical, z-score for
//      continuous and binary) and scale every sample to unit norm;
//   2. subtract a Laplace-noised mean and re-normalize;
//   3. project with a random d x p matrix W with orthonormal columns;
//   4. estimate a Laplace-noised second-moment matrix of the projection.
// Sampling draws from N(0, Sigma), maps back with x = W z + mu and converts
// every column to the original format using training percentiles.
//
// Classification mode repeats 2-4 per label class and samples the class from
// Laplace-noised class weights. Regression mode appends a continuous target
// to the projection and fits their joint second-moment matrix.

#ifndef FFPDG_RONGAUSS_H_
#define FFPDG_RONGAUSS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ffpdg/dataset.h"
#include "ffpdg/dp_mech.h"
#include "ffpdg/random.h"

namespace ffpdg {

enum class GenerationMode { kUnsupervised, kClassification, kRegression };

// Affine map applied to continuous and binary columns before unit
// normalization.
enum class NumericScaling {
  // Raw values.
  kNone,
  // (x - mean) / std.
  kStandardize,
  // (x - min) / (max - min).
  kMinMax,
};

std::string_view ToString(NumericScaling scaling);
NumericScaling ParseNumericScaling(std::string_view name);

std::string_view ToString(GenerationMode mode);
GenerationMode ParseGenerationMode(std::string_view name);

struct GenerationConfig {
  // Projected dimension; 0 picks min(d_eff - 1, 8).
  int p = 0;
  PrivacyBudget budget;
  // Rows to generate; 0 means the training row count.
  size_t n_out = 0;
  // Unset: classification when the schema has a label, else unsupervised.
  std::optional<GenerationMode> mode;
  // Regression target, a continuous column. Required in regression mode.
  std::optional<size_t> target_column;
  uint64_t seed = 0;
  double categorical_noise_sigma = 0.01;
  NumericScaling scaling = NumericScaling::kStandardize;
  // Percentile grid resolution stored for continuous post-processing.
  int quantile_grid = 100;
};

// Where one source column lives in the encoded feature vector.
struct FeatureBlock {
  size_t column = 0;
  ColumnKind kind = ColumnKind::kContinuous;
  size_t offset = 0;
  size_t width = 1;
  // Continuous and binary: encoded value = (x - center) / scale.
  double center = 0.0;
  double scale = 1.0;
};

struct FeatureEncoding {
  std::vector<FeatureBlock> blocks;
  size_t width = 0;

  // Index of the one-hot coordinate with the largest value in a block.
  static size_t DecodeCategorical(const FeatureBlock& block,
                                  std::span<const double> encoded);
};

struct Normalized {
  // d_eff x n, unit-norm columns.
  Eigen::MatrixXd columns;
  FeatureEncoding encoding;
};

// Encodes `feature_columns` of every row and scales each sample to unit norm.
// Throws InvalidArgument on a sample whose encoding is all zeros.
Normalized PreNormalize(const Dataset& dataset,
                        std::span<const size_t> feature_columns,
                        double categorical_noise_sigma, Rng& rng,
                        NumericScaling scaling =
                            NumericScaling::kStandardize);

// Applies an existing encoding (same standardization, fresh one-hot noise).
Eigen::MatrixXd PreNormalizeWith(const Dataset& dataset,
                                 const FeatureEncoding& encoding,
                                 double categorical_noise_sigma, Rng& rng);

struct Centered {
  Eigen::MatrixXd columns;
  Eigen::VectorXd mu_dp;
  // Columns that were zero after centering and got a 1e-12 perturbation.
  size_t perturbed_columns = 0;
};

Centered CenterAndRenormalize(const Eigen::MatrixXd& columns,
                              double epsilon_mu, Rng& rng);

struct RonProjection {
  // d x p with orthonormal columns.
  Eigen::MatrixXd w;

  Eigen::Index d() const { return w.rows(); }
  Eigen::Index p() const { return w.cols(); }
};

// QR of a d x d standard-normal matrix; the first p columns of Q with the
// sign convention R_ii >= 0.
RonProjection MakeRon(int d, int p, Rng& rng);
RonProjection MakeRon(int d, int p, uint64_t seed);

// Per-column conversion back to the original format.
struct ColumnPostprocess {
  size_t column = 0;
  ColumnKind kind = ColumnKind::kContinuous;
  double min = 0.0;
  double max = 0.0;
  // Binary: training share of ones.
  double positive_rate = 0.0;
  // Continuous: nearest-rank training percentiles at k / grid, k = 0..grid.
  std::vector<double> percentiles;
};

struct GaussianComponent {
  double weight = 1.0;
  // Class label for classification components.
  double label = 0.0;
  // Noised mean in encoded space (length d_eff).
  Eigen::VectorXd mu_dp;
  // p x p, or (p+1) x (p+1) in regression mode.
  Eigen::MatrixXd sigma_dp;
  // One entry per schema column, from this component's training rows.
  std::vector<ColumnPostprocess> postprocess;
};

struct RegressionTarget {
  size_t column = 0;
  // y is divided by `scale` (max |y|) before fitting.
  double scale = 1.0;
  double mean_dp = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct RonGaussModel {
  Schema schema;
  GenerationMode mode = GenerationMode::kUnsupervised;
  FeatureEncoding encoding;
  RonProjection projection;
  std::vector<GaussianComponent> components;
  std::optional<RegressionTarget> target;
  PrivacyBudget budget;
  size_t train_rows = 0;

  // Noised class proportions in component order (classification mode).
  std::vector<double> class_weights() const;
};

RonGaussModel Fit(const Dataset& dataset, const GenerationConfig& config);

// Noised second-moment matrix of the stacked (projection; target) vectors,
// with the target already scaled into [-1, 1]. The stacked vectors are
// shrunk by 1/sqrt(2) so every column has norm <= 1 before DpCovariance, and
// the result is scaled back.
Eigen::MatrixXd FitJointCovariance(const Eigen::MatrixXd& projected,
                                   const Eigen::VectorXd& target,
                                   double epsilon_sigma, Rng& rng);

// n draws from N(0, sigma) as the columns of a k x n matrix.
Eigen::MatrixXd SampleGaussian(const Eigen::MatrixXd& sigma, size_t n,
                               Rng& rng);

struct RawSample {
  // d_eff x n back-projected samples W z + mu.
  Eigen::MatrixXd features;
  // Component index per sample.
  std::vector<size_t> component;
  // Regression mode: target in scaled units, before un-scaling.
  Eigen::VectorXd target;
};

// Draws from the fitted Gaussians and back-projects, without converting to
// the original format.
RawSample SampleRaw(const RonGaussModel& model, size_t n_out, Rng& rng);

Dataset Sample(const RonGaussModel& model, size_t n_out, uint64_t seed);

// Converts back-projected samples to a Dataset with the model schema.
Dataset Postprocess(const RonGaussModel& model, const RawSample& raw);

// Documented text format; SaveModel(LoadModel(s)) == s.
std::string FormatModel(const RonGaussModel& model);
RonGaussModel ParseModel(std::string_view text);
void SaveModel(const RonGaussModel& model, const std::string& path);
RonGaussModel LoadModel(const std::string& path);

}  // namespace ffpdg

#endif  // FFPDG_RONGAUSS_H_
