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

#include "ffpdg/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffpdg/error.h"

namespace ffpdg {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void CheckTrainingData(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw InvalidArgument("feature rows and label count differ");
  }
  if (x.rows() < 2) throw InvalidArgument("need at least two training rows");
  if (x.cols() < 1) throw InvalidArgument("need at least one feature");
  bool seen[2] = {false, false};
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw InvalidArgument("labels must be 0 or 1");
    }
    seen[y(i) == 1.0 ? 1 : 0] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw InvalidArgument("training labels contain a single class");
  }
}

LogisticModel FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const ClassifierOptions& opt) {
  LogisticModel m;
  const auto n = static_cast<double>(x.rows());
  m.mean = x.colwise().mean().transpose();
  m.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - m.mean(j)).square().sum() / n;
    m.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  const Eigen::MatrixXd z =
      (x.rowwise() - m.mean.transpose()).array().rowwise() /
      m.scale.transpose().array();
  m.weights = Eigen::VectorXd::Zero(x.cols());
  m.bias = 0.0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    if (opt.record_loss) {
      m.loss_history.push_back(LogisticLoss(z, y, m.weights, m.bias, opt.l2));
    }
    const Eigen::VectorXd g = LogisticGradient(z, y, m.weights, m.bias, opt.l2);
    m.weights -= opt.learning_rate * g.head(x.cols());
    m.bias -= opt.learning_rate * g(x.cols());
  }
  if (opt.record_loss) {
    m.loss_history.push_back(LogisticLoss(z, y, m.weights, m.bias, opt.l2));
  }
  return m;
}

GaussianNbModel FitGaussianNb(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              const ClassifierOptions& opt) {
  GaussianNbModel m;
  m.mean = Eigen::MatrixXd::Zero(2, x.cols());
  m.variance = Eigen::MatrixXd::Zero(2, x.cols());
  double count[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y(i) == 1.0 ? 1 : 0;
    count[c] += 1.0;
    m.mean.row(c) += x.row(i);
  }
  for (int c = 0; c < 2; ++c) m.mean.row(c) /= count[c];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y(i) == 1.0 ? 1 : 0;
    m.variance.row(c) += (x.row(i) - m.mean.row(c)).array().square().matrix();
  }
  for (int c = 0; c < 2; ++c) {
    m.variance.row(c) = (m.variance.row(c) / count[c])
                            .array()
                            .max(opt.variance_floor)
                            .matrix();
    m.log_prior[c] = std::log(count[c] / static_cast<double>(x.rows()));
  }
  return m;
}

BernoulliNbModel FitBernoulliNb(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y,
                                const ClassifierOptions& opt) {
  BernoulliNbModel m;
  m.threshold = x.colwise().mean().transpose();
  Eigen::MatrixXd on = Eigen::MatrixXd::Zero(2, x.cols());
  double count[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y(i) == 1.0 ? 1 : 0;
    count[c] += 1.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(i, j) > m.threshold(j)) on(c, j) += 1.0;
    }
  }
  m.log_on.resize(2, x.cols());
  m.log_off.resize(2, x.cols());
  for (int c = 0; c < 2; ++c) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double p = (on(c, j) + opt.alpha) / (count[c] + 2.0 * opt.alpha);
      m.log_on(c, j) = std::log(p);
      m.log_off(c, j) = std::log1p(-p);
    }
    m.log_prior[c] = std::log(count[c] / static_cast<double>(x.rows()));
  }
  return m;
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              const ClassifierOptions& opt)
      : x_(x), y_(y), opt_(opt) {}

  DecisionTreeModel Build() {
    std::vector<Eigen::Index> rows(static_cast<size_t>(x_.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    Grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  static double Gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  int Grow(const std::vector<Eigen::Index>& rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double pos = 0.0;
    for (Eigen::Index r : rows) pos += y_(r);
    const auto total = static_cast<double>(rows.size());
    tree_.nodes[index].probability = pos / total;
    if (depth >= opt_.max_depth || pos == 0.0 || pos == total ||
        rows.size() < 2 * static_cast<size_t>(opt_.min_leaf)) {
      return index;
    }
    const Split split = BestSplit(rows, pos);
    if (split.feature < 0) return index;

    std::vector<Eigen::Index> left, right;
    for (Eigen::Index r : rows) {
      (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    tree_.nodes[index].feature = split.feature;
    tree_.nodes[index].threshold = split.threshold;
    const int l = Grow(left, depth + 1);
    const int rr = Grow(right, depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = rr;
    return index;
  }

  // Weighted child Gini must strictly improve on the parent. Features and
  // thresholds are scanned in ascending order and only strict improvements
  // replace the incumbent.
  Split BestSplit(const std::vector<Eigen::Index>& rows, double pos) const {
    const auto total = static_cast<double>(rows.size());
    const size_t min_leaf = static_cast<size_t>(std::max(1, opt_.min_leaf));
    Split best;
    best.impurity = Gini(pos, total) - 1e-12;
    std::vector<Eigen::Index> order = rows;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return x_(a, f) < x_(b, f);
                       });
      double left_pos = 0.0;
      for (size_t k = 0; k + 1 < order.size(); ++k) {
        left_pos += y_(order[k]);
        const double v = x_(order[k], f);
        const double next = x_(order[k + 1], f);
        if (v == next) continue;
        const size_t n_left = k + 1;
        const size_t n_right = order.size() - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const auto nl = static_cast<double>(n_left);
        const auto nr = static_cast<double>(n_right);
        const double impurity = (nl * Gini(left_pos, nl) +
                                 nr * Gini(pos - left_pos, nr)) /
                                total;
        if (impurity < best.impurity - 1e-15) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (v + next);
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  const ClassifierOptions& opt_;
  DecisionTreeModel tree_;
};

}  // namespace

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogisticRegression:
      return "logistic_regression";
    case ModelKind::kGaussianNb:
      return "gaussian_nb";
    case ModelKind::kBernoulliNb:
      return "bernoulli_nb";
    case ModelKind::kDecisionTree:
      return "decision_tree";
  }
  return "?";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind k : AllModelKinds()) {
    if (ToString(k) == name) return k;
  }
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

std::vector<ModelKind> AllModelKinds() {
  return {ModelKind::kLogisticRegression, ModelKind::kGaussianNb,
          ModelKind::kBernoulliNb, ModelKind::kDecisionTree};
}

FeatureMatrix BuildFeatures(const Dataset& dataset, FeatureColumns include) {
  const Schema& schema = dataset.schema();
  const std::optional<size_t> label = schema.label_index();
  std::vector<size_t> cols;
  size_t width = 0;
  FeatureMatrix out;
  for (size_t c = 0; c < schema.size(); ++c) {
    if (label && c == *label && !include.label) continue;
    if (c == schema.protected_index() && !include.protected_column) continue;
    cols.push_back(c);
    const ColumnSpec& spec = schema.column(c);
    if (spec.kind == ColumnKind::kCategorical) {
      for (const std::string& level : spec.levels) {
        out.names.push_back(spec.name + "=" + level);
      }
      width += spec.levels.size();
    } else {
      out.names.push_back(spec.name);
      width += 1;
    }
  }
  const auto n = static_cast<Eigen::Index>(dataset.rows());
  out.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(width));
  out.protected_values.resize(n);
  if (label) out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<size_t>(i);
    Eigen::Index j = 0;
    for (size_t c : cols) {
      const double v = dataset.At(r, c);
      const ColumnSpec& spec = schema.column(c);
      if (spec.kind == ColumnKind::kCategorical) {
        out.x(i, j + static_cast<Eigen::Index>(v)) = 1.0;
        j += static_cast<Eigen::Index>(spec.levels.size());
      } else {
        out.x(i, j++) = v;
      }
    }
    out.protected_values(i) = dataset.At(r, schema.protected_index());
    if (label) out.y(i) = dataset.At(r, *label);
  }
  return out;
}

double LogisticLoss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights, double bias, double l2) {
  const Eigen::VectorXd t = (x * weights).array() + bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    // -[y log s(t) + (1 - y) log(1 - s(t))] = softplus(t) - y t
    loss += Softplus(t(i)) - y(i) * t(i);
  }
  return loss / static_cast<double>(t.size()) + 0.5 * l2 * weights.squaredNorm();
}

Eigen::VectorXd LogisticGradient(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& weights, double bias,
                                 double l2) {
  const Eigen::VectorXd t = (x * weights).array() + bias;
  Eigen::VectorXd residual(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) residual(i) = Sigmoid(t(i)) - y(i);
  const auto n = static_cast<double>(t.size());
  Eigen::VectorXd g(weights.size() + 1);
  g.head(weights.size()) = x.transpose() * residual / n + l2 * weights;
  g(weights.size()) = residual.sum() / n;
  return g;
}

Classifier FitClassifier(ModelKind kind, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y,
                         const ClassifierOptions& options) {
  CheckTrainingData(x, y);
  Classifier model;
  model.kind = kind;
  model.width = x.cols();
  switch (kind) {
    case ModelKind::kLogisticRegression:
      model.params = FitLogistic(x, y, options);
      break;
    case ModelKind::kGaussianNb:
      model.params = FitGaussianNb(x, y, options);
      break;
    case ModelKind::kBernoulliNb:
      model.params = FitBernoulliNb(x, y, options);
      break;
    case ModelKind::kDecisionTree:
      model.params = TreeBuilder(x, y, options).Build();
      break;
  }
  return model;
}

Eigen::VectorXd PredictProba(const Classifier& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.width) {
    throw InvalidArgument("feature width " + std::to_string(x.cols()) +
                          " does not match the trained width " +
                          std::to_string(model.width));
  }
  Eigen::VectorXd out(x.rows());
  if (const auto* m = std::get_if<LogisticModel>(&model.params)) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Eigen::VectorXd z =
          (x.row(i).transpose() - m->mean).cwiseQuotient(m->scale);
      out(i) = Sigmoid(z.dot(m->weights) + m->bias);
    }
  } else if (const auto* m = std::get_if<GaussianNbModel>(&model.params)) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double logp[2];
      for (int c = 0; c < 2; ++c) {
        double s = m->log_prior[c];
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
          const double var = m->variance(c, j);
          const double diff = x(i, j) - m->mean(c, j);
          s -= 0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
        }
        logp[c] = s;
      }
      out(i) = Sigmoid(logp[1] - logp[0]);
    }
  } else if (const auto* m = std::get_if<BernoulliNbModel>(&model.params)) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double logp[2];
      for (int c = 0; c < 2; ++c) {
        double s = m->log_prior[c];
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
          s += x(i, j) > m->threshold(j) ? m->log_on(c, j) : m->log_off(c, j);
        }
        logp[c] = s;
      }
      out(i) = Sigmoid(logp[1] - logp[0]);
    }
  } else {
    const auto& tree = std::get<DecisionTreeModel>(model.params);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      int node = 0;
      while (tree.nodes[node].feature >= 0) {
        const TreeNode& t = tree.nodes[node];
        node = x(i, t.feature) <= t.threshold ? t.left : t.right;
      }
      out(i) = tree.nodes[node].probability;
    }
  }
  return out;
}

}  // namespace ffpdg
