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

// Small binary classifiers used for evaluation: logistic regression,
// Gaussian and Bernoulli naive Bayes, and a CART-style decision tree.

#ifndef FFPDG_MODELS_H_
#define FFPDG_MODELS_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ffpdg/dataset.h"

namespace ffpdg {

enum class ModelKind {
  kLogisticRegression,
  kGaussianNb,
  kBernoulliNb,
  kDecisionTree,
};

std::string_view ToString(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);
std::vector<ModelKind> AllModelKinds();

// Row-per-sample design matrix built from a Dataset. Categorical columns are
// one-hot encoded over the schema levels. The label and protected columns are
// left out of `x` unless requested; both stay available in `y` and
// `protected_values`.
struct FeatureMatrix {
  Eigen::MatrixXd x;
  // Label column values (empty when the schema has no label).
  Eigen::VectorXd y;
  // Protected column values.
  Eigen::VectorXd protected_values;
  std::vector<std::string> names;
};

struct FeatureColumns {
  bool label = false;
  bool protected_column = false;
};

FeatureMatrix BuildFeatures(const Dataset& dataset,
                            FeatureColumns include = {});

struct ClassifierOptions {
  // Logistic regression.
  int epochs = 500;
  double learning_rate = 0.1;
  double l2 = 1e-3;
  bool record_loss = false;
  // Gaussian naive Bayes.
  double variance_floor = 1e-9;
  // Bernoulli naive Bayes add-alpha smoothing.
  double alpha = 1.0;
  // Decision tree.
  int max_depth = 5;
  int min_leaf = 5;
};

struct LogisticModel {
  // Standardization applied before the linear score.
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::VectorXd weights;
  double bias = 0.0;
  // Regularized loss before each epoch and after the last one.
  std::vector<double> loss_history;
};

struct GaussianNbModel {
  std::array<double, 2> log_prior{};
  // Row c holds class c.
  Eigen::MatrixXd mean;
  Eigen::MatrixXd variance;
};

struct BernoulliNbModel {
  // A feature is 1 when strictly above its training mean.
  Eigen::VectorXd threshold;
  std::array<double, 2> log_prior{};
  // Row c: log P(bit = 1 | class c) and log P(bit = 0 | class c).
  Eigen::MatrixXd log_on;
  Eigen::MatrixXd log_off;
};

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  // Rows with x[feature] <= threshold go left.
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Share of class 1 among the training rows reaching this node.
  double probability = 0.0;
};

struct DecisionTreeModel {
  // nodes[0] is the root.
  std::vector<TreeNode> nodes;
};

struct Classifier {
  ModelKind kind = ModelKind::kLogisticRegression;
  Eigen::Index width = 0;
  std::variant<LogisticModel, GaussianNbModel, BernoulliNbModel,
               DecisionTreeModel>
      params;
};

// Fits on rows of `x` with 0/1 labels `y`. Throws InvalidArgument on fewer
// than two rows, non-binary labels or a single class. Deterministic.
Classifier FitClassifier(ModelKind kind, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y,
                         const ClassifierOptions& options = {});

// Class-1 probabilities in [0, 1]. Throws InvalidArgument on a width
// mismatch.
Eigen::VectorXd PredictProba(const Classifier& model, const Eigen::MatrixXd& x);

// Mean log loss plus (l2 / 2) |w|^2 on already standardized features.
double LogisticLoss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights, double bias, double l2);
// Gradient of LogisticLoss; the last entry is d/d bias.
Eigen::VectorXd LogisticGradient(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& weights, double bias,
                                 double l2);

}  // namespace ffpdg

#endif  // FFPDG_MODELS_H_
