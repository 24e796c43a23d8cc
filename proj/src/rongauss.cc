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

#include "ffpdg/rongauss.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ffpdg/error.h"

namespace ffpdg {
namespace {

constexpr uint64_t kStreamEncoding = 1;
constexpr uint64_t kStreamProjection = 2;
constexpr uint64_t kStreamClassWeights = 3;
constexpr uint64_t kStreamGroupBase = 10;

// Factor A with A A^T = sigma, from the clipped eigendecomposition.
Eigen::MatrixXd SqrtFactor(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw Error("covariance factorization failed");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

double InterpolatePercentile(const std::vector<double>& grid, double u) {
  if (grid.size() == 1) return grid[0];
  const double pos = std::clamp(u, 0.0, 1.0) *
                     static_cast<double>(grid.size() - 1);
  const size_t lo = std::min(static_cast<size_t>(pos), grid.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  return grid[lo] + frac * (grid[lo + 1] - grid[lo]);
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<ColumnPostprocess> ColumnPostprocessFor(
    const Dataset& rows, std::span<const double> grid) {
  const ColumnStats stats = ComputeColumnStats(rows, grid);
  std::vector<ColumnPostprocess> out;
  for (size_t c = 0; c < rows.cols(); ++c) {
    ColumnPostprocess pp;
    pp.column = c;
    pp.kind = rows.schema().column(c).kind;
    pp.min = stats.columns[c].min;
    pp.max = stats.columns[c].max;
    if (pp.kind == ColumnKind::kBinary) pp.positive_rate = stats.columns[c].mean;
    if (pp.kind == ColumnKind::kContinuous) {
      pp.percentiles = stats.columns[c].percentiles;
    }
    out.push_back(std::move(pp));
  }
  return out;
}

}  // namespace

std::string_view ToString(GenerationMode mode) {
  switch (mode) {
    case GenerationMode::kUnsupervised:
      return "unsupervised";
    case GenerationMode::kClassification:
      return "classification";
    case GenerationMode::kRegression:
      return "regression";
  }
  return "?";
}

std::string_view ToString(NumericScaling scaling) {
  switch (scaling) {
    case NumericScaling::kNone:
      return "none";
    case NumericScaling::kStandardize:
      return "standardize";
    case NumericScaling::kMinMax:
      return "minmax";
  }
  return "?";
}

NumericScaling ParseNumericScaling(std::string_view name) {
  if (name == "none") return NumericScaling::kNone;
  if (name == "standardize") return NumericScaling::kStandardize;
  if (name == "minmax") return NumericScaling::kMinMax;
  throw InvalidArgument("unknown scaling '" + std::string(name) +
                        "' (expected none, standardize or minmax)");
}

GenerationMode ParseGenerationMode(std::string_view name) {
  if (name == "unsupervised") return GenerationMode::kUnsupervised;
  if (name == "classification") return GenerationMode::kClassification;
  if (name == "regression") return GenerationMode::kRegression;
  throw InvalidArgument("unknown mode '" + std::string(name) +
                        "' (expected unsupervised, classification or "
                        "regression)");
}

size_t FeatureEncoding::DecodeCategorical(const FeatureBlock& block,
                                          std::span<const double> encoded) {
  size_t best = 0;
  for (size_t j = 1; j < block.width; ++j) {
    if (encoded[block.offset + j] > encoded[block.offset + best]) best = j;
  }
  return best;
}

Eigen::MatrixXd PreNormalizeWith(const Dataset& dataset,
                                 const FeatureEncoding& encoding,
                                 double categorical_noise_sigma, Rng& rng) {
  if (!(categorical_noise_sigma >= 0.0)) {
    throw InvalidArgument("categorical noise sigma must be >= 0");
  }
  const size_t n = dataset.rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(encoding.width), static_cast<Eigen::Index>(n));
  for (size_t r = 0; r < n; ++r) {
    const auto col = static_cast<Eigen::Index>(r);
    for (const FeatureBlock& b : encoding.blocks) {
      const double v = dataset.At(r, b.column);
      const auto off = static_cast<Eigen::Index>(b.offset);
      switch (b.kind) {
        case ColumnKind::kContinuous:
        case ColumnKind::kBinary:
          x(off, col) = (v - b.center) / b.scale;
          break;
        case ColumnKind::kCategorical:
          for (size_t j = 0; j < b.width; ++j) {
            double e = static_cast<size_t>(v) == j ? 1.0 : 0.0;
            if (categorical_noise_sigma > 0.0) {
              e += categorical_noise_sigma * rng.Normal();
            }
            x(off + static_cast<Eigen::Index>(j), col) = e;
          }
          break;
      }
    }
    const double norm = x.col(col).norm();
    if (!(norm > 1e-300)) {
      throw InvalidArgument("row " + std::to_string(r) +
                            " encodes to the zero vector and cannot be "
                            "normalized");
    }
    x.col(col) /= norm;
  }
  return x;
}

Normalized PreNormalize(const Dataset& dataset,
                        std::span<const size_t> feature_columns,
                        double categorical_noise_sigma, Rng& rng,
                        NumericScaling scaling) {
  if (feature_columns.empty()) throw InvalidArgument("no feature columns");
  Normalized out;
  size_t offset = 0;
  for (size_t c : feature_columns) {
    if (c >= dataset.cols()) throw InvalidArgument("feature column out of range");
    const ColumnSpec& spec = dataset.schema().column(c);
    FeatureBlock b;
    b.column = c;
    b.kind = spec.kind;
    b.offset = offset;
    b.width = spec.kind == ColumnKind::kCategorical ? spec.levels.size() : 1;
    if (spec.kind != ColumnKind::kCategorical) {
      const std::vector<double> col = dataset.Column(c);
      const double n = static_cast<double>(col.size());
      const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
      double var = 0.0;
      for (double v : col) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / n);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      switch (scaling) {
        case NumericScaling::kNone:
          break;
        case NumericScaling::kStandardize:
          b.center = mean;
          b.scale = sd > 0.0 ? sd : 1.0;
          break;
        case NumericScaling::kMinMax:
          b.center = *lo;
          b.scale = *hi > *lo ? *hi - *lo : 1.0;
          break;
      }
    }
    offset += b.width;
    out.encoding.blocks.push_back(b);
  }
  out.encoding.width = offset;
  out.columns =
      PreNormalizeWith(dataset, out.encoding, categorical_noise_sigma, rng);
  return out;
}

Centered CenterAndRenormalize(const Eigen::MatrixXd& columns,
                              double epsilon_mu, Rng& rng) {
  Centered out;
  out.mu_dp = DpMean(columns, epsilon_mu, rng);
  out.columns = columns.colwise() - out.mu_dp;
  for (Eigen::Index i = 0; i < out.columns.cols(); ++i) {
    double norm = out.columns.col(i).norm();
    if (!(norm > 1e-300)) {
      out.columns(0, i) += 1e-12;
      norm = out.columns.col(i).norm();
      ++out.perturbed_columns;
    }
    out.columns.col(i) /= norm;
  }
  return out;
}

RonProjection MakeRon(int d, int p, Rng& rng) {
  if (p < 1 || p >= d) {
    throw InvalidArgument("projection needs 1 <= p < d, got p=" +
                          std::to_string(p) + ", d=" + std::to_string(d));
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixXd g(d, d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) g(i, j) = rng.Normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    bool full_rank = true;
    for (int i = 0; i < d; ++i) {
      if (std::abs(packed(i, i)) < 1e-10) full_rank = false;
    }
    if (!full_rank) continue;
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < p; ++i) {
      if (packed(i, i) < 0.0) q.col(i) = -q.col(i);
    }
    return RonProjection{q.leftCols(p)};
  }
  throw Error("could not draw a full-rank matrix for the projection");
}

RonProjection MakeRon(int d, int p, uint64_t seed) {
  Rng rng(seed);
  return MakeRon(d, p, rng);
}

Eigen::MatrixXd FitJointCovariance(const Eigen::MatrixXd& projected,
                                   const Eigen::VectorXd& target,
                                   double epsilon_sigma, Rng& rng) {
  if (target.size() != projected.cols()) {
    throw InvalidArgument("target length does not match sample count");
  }
  Eigen::MatrixXd stacked(projected.rows() + 1, projected.cols());
  stacked.topRows(projected.rows()) = projected;
  stacked.bottomRows(1) = target.transpose();
  stacked /= std::sqrt(2.0);
  return 2.0 * DpCovariance(stacked, epsilon_sigma, rng);
}

Eigen::MatrixXd SampleGaussian(const Eigen::MatrixXd& sigma, size_t n,
                               Rng& rng) {
  const Eigen::MatrixXd a = SqrtFactor(sigma);
  Eigen::MatrixXd out(sigma.rows(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd z(sigma.rows());
  for (size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.Normal();
    out.col(static_cast<Eigen::Index>(i)) = a * z;
  }
  return out;
}

std::vector<double> RonGaussModel::class_weights() const {
  std::vector<double> w;
  for (const GaussianComponent& c : components) w.push_back(c.weight);
  return w;
}

RonGaussModel Fit(const Dataset& dataset, const GenerationConfig& config) {
  const Schema& schema = dataset.schema();
  config.budget.Validate();
  if (!(config.categorical_noise_sigma >= 0.0)) {
    throw InvalidArgument("categorical noise sigma must be >= 0");
  }
  if (config.quantile_grid < 1) {
    throw InvalidArgument("quantile grid must be >= 1");
  }

  RonGaussModel model{.schema = schema};
  model.mode = config.mode.value_or(schema.label_index()
                                        ? GenerationMode::kClassification
                                        : GenerationMode::kUnsupervised);
  model.budget = config.budget;
  model.train_rows = dataset.rows();

  std::optional<size_t> excluded;
  if (model.mode == GenerationMode::kClassification) {
    if (!schema.label_index()) {
      throw InvalidArgument("classification mode needs a label column");
    }
    excluded = schema.label_index();
  } else if (model.mode == GenerationMode::kRegression) {
    if (!config.target_column ||
        *config.target_column >= schema.size() ||
        schema.column(*config.target_column).kind != ColumnKind::kContinuous) {
      throw InvalidArgument("regression mode needs a continuous target column");
    }
    excluded = config.target_column;
  }
  std::vector<size_t> features;
  for (size_t c = 0; c < schema.size(); ++c) {
    if (!excluded || c != *excluded) features.push_back(c);
  }

  std::vector<double> grid;
  for (int k = 0; k <= config.quantile_grid; ++k) {
    grid.push_back(static_cast<double>(k) / config.quantile_grid);
  }
  const ColumnStats stats = ComputeColumnStats(dataset, grid);

  const Rng root(config.seed);
  Rng encoding_rng = root.Fork(kStreamEncoding);
  Normalized normalized = PreNormalize(dataset, features,
                                       config.categorical_noise_sigma,
                                       encoding_rng, config.scaling);
  model.encoding = normalized.encoding;
  const int d_eff = static_cast<int>(normalized.encoding.width);
  const int p = config.p > 0 ? config.p : std::min(d_eff - 1, 8);
  if (p < 1 || p >= d_eff) {
    throw InvalidArgument("projected dimension must satisfy 1 <= p < " +
                          std::to_string(d_eff) + ", got " +
                          std::to_string(p));
  }
  Rng projection_rng = root.Fork(kStreamProjection);
  model.projection = MakeRon(d_eff, p, projection_rng);
  const Eigen::MatrixXd& w = model.projection.w;

  // Row groups: one per class in classification mode, otherwise everything.
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<double> group_labels;
  if (model.mode == GenerationMode::kClassification) {
    const size_t label = *schema.label_index();
    groups.resize(2);
    group_labels = {0.0, 1.0};
    for (size_t r = 0; r < dataset.rows(); ++r) {
      groups[dataset.At(r, label) != 0.0 ? 1 : 0].push_back(
          static_cast<Eigen::Index>(r));
    }
  } else {
    groups.emplace_back(dataset.rows());
    std::iota(groups[0].begin(), groups[0].end(), Eigen::Index{0});
    group_labels = {0.0};
  }
  const double k = static_cast<double>(groups.size());
  const PrivacyBudget group_budget = config.budget.Scaled(1.0 / k);

  std::optional<Eigen::VectorXd> scaled_target;
  if (model.mode == GenerationMode::kRegression) {
    RegressionTarget t;
    t.column = *config.target_column;
    t.min = stats.columns[t.column].min;
    t.max = stats.columns[t.column].max;
    t.scale = std::max(std::abs(t.min), std::abs(t.max));
    if (t.scale == 0.0) t.scale = 1.0;
    Eigen::VectorXd y(static_cast<Eigen::Index>(dataset.rows()));
    for (size_t r = 0; r < dataset.rows(); ++r) {
      y(static_cast<Eigen::Index>(r)) = dataset.At(r, t.column) / t.scale;
    }
    scaled_target = std::move(y);
    model.target = t;
  }

  for (size_t g = 0; g < groups.size(); ++g) {
    const auto& rows = groups[g];
    if (rows.size() < static_cast<size_t>(p)) {
      throw InvalidArgument(
          "class " + Num(group_labels[g]) + " has " +
          std::to_string(rows.size()) + " rows, fewer than p = " +
          std::to_string(p) + "; its covariance cannot be estimated");
    }
    Eigen::MatrixXd xg(normalized.columns.rows(),
                       static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      xg.col(static_cast<Eigen::Index>(i)) = normalized.columns.col(rows[i]);
    }
    Rng group_rng = root.Fork(kStreamGroupBase + g);
    GaussianComponent comp;
    comp.label = group_labels[g];
    const auto n_g = static_cast<double>(rows.size());
    if (model.mode == GenerationMode::kRegression) {
      // Half of the mean budget goes to the feature mean, half to the target.
      const double eps_mu_half = 0.5 * config.budget.epsilon_mu;
      Centered centered = CenterAndRenormalize(xg, eps_mu_half, group_rng);
      const Eigen::MatrixXd projected = w.transpose() * centered.columns;
      const Eigen::VectorXd& y = *scaled_target;
      model.target->mean_dp =
          y.mean() + SampleLaplace(2.0 / (n_g * eps_mu_half), group_rng);
      const Eigen::VectorXd centered_y =
          (y.array() - model.target->mean_dp).cwiseMax(-1.0).cwiseMin(1.0);
      comp.mu_dp = centered.mu_dp;
      comp.sigma_dp = FitJointCovariance(projected, centered_y,
                                         config.budget.epsilon_sigma,
                                         group_rng);
    } else {
      Centered centered =
          CenterAndRenormalize(xg, group_budget.epsilon_mu, group_rng);
      const Eigen::MatrixXd projected = w.transpose() * centered.columns;
      comp.mu_dp = centered.mu_dp;
      comp.sigma_dp =
          DpCovariance(projected, group_budget.epsilon_sigma, group_rng);
    }
    comp.weight = n_g / static_cast<double>(dataset.rows());
    if (groups.size() == 1) {
      comp.postprocess = ColumnPostprocessFor(dataset, grid);
    } else {
      std::vector<size_t> idx(rows.begin(), rows.end());
      comp.postprocess = ColumnPostprocessFor(dataset.Select(idx), grid);
    }
    model.components.push_back(std::move(comp));
  }

  if (model.mode == GenerationMode::kClassification) {
    Rng weight_rng = root.Fork(kStreamClassWeights);
    const double scale = 2.0 / (static_cast<double>(dataset.rows()) *
                                config.budget.epsilon_mu);
    double total = 0.0;
    for (GaussianComponent& c : model.components) {
      c.weight = std::max(0.0, c.weight + SampleLaplace(scale, weight_rng));
      total += c.weight;
    }
    for (GaussianComponent& c : model.components) {
      c.weight = total > 0.0 ? c.weight / total : 1.0 / k;
    }
  }
  return model;
}

RawSample SampleRaw(const RonGaussModel& model, size_t n_out, Rng& rng) {
  if (n_out == 0) throw InvalidArgument("n_out must be >= 1");
  if (model.components.empty()) throw InvalidArgument("model is not fitted");
  const Eigen::MatrixXd& w = model.projection.w;
  const Eigen::Index p = w.cols();
  std::vector<Eigen::MatrixXd> factors;
  std::vector<double> cdf;
  double acc = 0.0;
  for (const GaussianComponent& c : model.components) {
    factors.push_back(SqrtFactor(c.sigma_dp));
    acc += c.weight;
    cdf.push_back(acc);
  }

  RawSample raw;
  raw.features.resize(w.rows(), static_cast<Eigen::Index>(n_out));
  raw.component.resize(n_out);
  if (model.mode == GenerationMode::kRegression) {
    raw.target.resize(static_cast<Eigen::Index>(n_out));
  }
  for (size_t i = 0; i < n_out; ++i) {
    size_t comp = 0;
    if (model.components.size() > 1) {
      const double u = rng.Uniform() * cdf.back();
      comp = static_cast<size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      comp = std::min(comp, model.components.size() - 1);
    }
    const Eigen::MatrixXd& a = factors[comp];
    Eigen::VectorXd z(a.cols());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.Normal();
    const Eigen::VectorXd x = a * z;
    const auto col = static_cast<Eigen::Index>(i);
    raw.features.col(col) = w * x.head(p) + model.components[comp].mu_dp;
    if (model.mode == GenerationMode::kRegression) raw.target(col) = x(p);
    raw.component[i] = comp;
  }
  return raw;
}

Dataset Postprocess(const RonGaussModel& model, const RawSample& raw) {
  const Schema& schema = model.schema;
  const size_t n = static_cast<size_t>(raw.features.cols());
  const size_t d = schema.size();
  std::vector<double> values(n * d, 0.0);

  // Rank-based conversion runs separately inside every component.
  std::vector<std::vector<size_t>> members(model.components.size());
  for (size_t i = 0; i < n; ++i) members[raw.component[i]].push_back(i);

  for (const FeatureBlock& b : model.encoding.blocks) {
    const auto off = static_cast<Eigen::Index>(b.offset);
    if (b.kind == ColumnKind::kCategorical) {
      std::vector<double> encoded(model.encoding.width);
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < b.width; ++j) {
          encoded[b.offset + j] =
              raw.features(off + static_cast<Eigen::Index>(j),
                           static_cast<Eigen::Index>(i));
        }
        values[i * d + b.column] =
            static_cast<double>(FeatureEncoding::DecodeCategorical(b, encoded));
      }
      continue;
    }
    for (size_t c = 0; c < members.size(); ++c) {
      const ColumnPostprocess& pp = model.components[c].postprocess[b.column];
      std::vector<size_t> order = members[c];
      const size_t m = order.size();
      std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        return raw.features(off, static_cast<Eigen::Index>(i)) <
               raw.features(off, static_cast<Eigen::Index>(j));
      });
      if (b.kind == ColumnKind::kBinary) {
        // The largest round(rate * m) values become ones.
        const auto ones = static_cast<size_t>(
            std::llround(pp.positive_rate * static_cast<double>(m)));
        for (size_t rank = 0; rank < m; ++rank) {
          values[order[rank] * d + b.column] = rank >= m - ones ? 1.0 : 0.0;
        }
      } else {
        for (size_t rank = 0; rank < m; ++rank) {
          const double u =
              (static_cast<double>(rank) + 0.5) / static_cast<double>(m);
          values[order[rank] * d + b.column] = std::clamp(
              InterpolatePercentile(pp.percentiles, u), pp.min, pp.max);
        }
      }
    }
  }

  if (model.mode == GenerationMode::kClassification) {
    const size_t label = *schema.label_index();
    for (size_t i = 0; i < n; ++i) {
      values[i * d + label] = model.components[raw.component[i]].label;
    }
  } else if (model.mode == GenerationMode::kRegression) {
    const RegressionTarget& t = *model.target;
    for (size_t i = 0; i < n; ++i) {
      const double y =
          (raw.target(static_cast<Eigen::Index>(i)) + t.mean_dp) * t.scale;
      values[i * d + t.column] = std::clamp(y, t.min, t.max);
    }
  }
  return Dataset(schema, std::move(values));
}

Dataset Sample(const RonGaussModel& model, size_t n_out, uint64_t seed) {
  Rng rng(seed);
  return Postprocess(model, SampleRaw(model, n_out, rng));
}

std::string FormatModel(const RonGaussModel& model) {
  std::ostringstream out;
  out << "ffpdg_model 1\n";
  out << "mode " << ToString(model.mode) << "\n";
  out << "train_rows " << model.train_rows << "\n";
  out << "budget " << Num(model.budget.epsilon_total) << " "
      << Num(model.budget.epsilon_mu) << " "
      << Num(model.budget.epsilon_sigma) << "\n";
  std::istringstream schema_lines(FormatSchema(model.schema));
  for (std::string line; std::getline(schema_lines, line);) {
    out << "schema " << line << "\n";
  }
  out << "encoding " << model.encoding.width << " "
      << model.encoding.blocks.size() << "\n";
  for (const FeatureBlock& b : model.encoding.blocks) {
    out << "block " << b.column << " " << ToString(b.kind) << " " << b.offset
        << " " << b.width << " " << Num(b.center) << " " << Num(b.scale)
        << "\n";
  }
  const Eigen::MatrixXd& w = model.projection.w;
  out << "projection " << w.rows() << " " << w.cols() << "\n";
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      out << (j ? " " : "") << Num(w(i, j));
    }
    out << "\n";
  }
  out << "components " << model.components.size() << "\n";
  for (const GaussianComponent& c : model.components) {
    out << "component " << Num(c.weight) << " " << Num(c.label) << "\n";
    out << "mu " << c.mu_dp.size();
    for (Eigen::Index i = 0; i < c.mu_dp.size(); ++i) out << " " << Num(c.mu_dp(i));
    out << "\n";
    out << "sigma " << c.sigma_dp.rows() << "\n";
    for (Eigen::Index i = 0; i < c.sigma_dp.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.sigma_dp.cols(); ++j) {
        out << (j ? " " : "") << Num(c.sigma_dp(i, j));
      }
      out << "\n";
    }
    out << "postprocess " << c.postprocess.size() << "\n";
    for (const ColumnPostprocess& pp : c.postprocess) {
      out << "post " << pp.column << " " << ToString(pp.kind) << " "
          << Num(pp.min) << " " << Num(pp.max) << " "
          << Num(pp.positive_rate) << " " << pp.percentiles.size();
      for (double v : pp.percentiles) out << " " << Num(v);
      out << "\n";
    }
  }
  if (model.target) {
    const RegressionTarget& t = *model.target;
    out << "target " << t.column << " " << Num(t.scale) << " "
        << Num(t.mean_dp) << " " << Num(t.min) << " " << Num(t.max) << "\n";
  }
  out << "end\n";
  return out.str();
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) : in_{std::string(text)} {}

  std::istringstream Line(std::string_view expected_key) {
    std::string line;
    do {
      if (!std::getline(in_, line)) {
        throw InvalidArgument("model file ended before '" +
                              std::string(expected_key) + "'");
      }
      ++line_no_;
    } while (line.empty());
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != expected_key) {
      throw InvalidArgument("model file line " + std::to_string(line_no_) +
                            ": expected '" + std::string(expected_key) +
                            "', found '" + key + "'");
    }
    return ss;
  }

  std::istringstream Values() {
    std::string line;
    if (!std::getline(in_, line)) throw InvalidArgument("model file truncated");
    ++line_no_;
    return std::istringstream(line);
  }

  std::string Peek() {
    const auto pos = in_.tellg();
    std::string line;
    std::getline(in_, line);
    in_.clear();
    in_.seekg(pos);
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    return key;
  }

 private:
  std::istringstream in_;
  size_t line_no_ = 0;
};

double ReadNum(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw InvalidArgument("model file: missing number");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (*end != '\0') throw InvalidArgument("model file: bad number '" + tok + "'");
  return v;
}

size_t ReadSize(std::istream& in) {
  long long v = 0;
  if (!(in >> v) || v < 0) throw InvalidArgument("model file: bad count");
  return static_cast<size_t>(v);
}

ColumnKind ParseKind(const std::string& s) {
  if (s == "continuous") return ColumnKind::kContinuous;
  if (s == "binary") return ColumnKind::kBinary;
  if (s == "categorical") return ColumnKind::kCategorical;
  throw InvalidArgument("model file: unknown column kind '" + s + "'");
}

}  // namespace

RonGaussModel ParseModel(std::string_view text) {
  ModelReader reader(text);
  {
    auto ss = reader.Line("ffpdg_model");
    if (ReadSize(ss) != 1) throw InvalidArgument("unsupported model version");
  }
  std::string mode_name;
  reader.Line("mode") >> mode_name;
  const GenerationMode mode = ParseGenerationMode(mode_name);
  size_t train_rows = 0;
  {
    auto ss = reader.Line("train_rows");
    train_rows = ReadSize(ss);
  }
  PrivacyBudget budget;
  {
    auto ss = reader.Line("budget");
    budget.epsilon_total = ReadNum(ss);
    budget.epsilon_mu = ReadNum(ss);
    budget.epsilon_sigma = ReadNum(ss);
  }
  std::string schema_text;
  while (reader.Peek() == "schema") {
    auto ss = reader.Line("schema");
    std::string rest;
    std::getline(ss, rest);
    schema_text += rest + "\n";
  }
  RonGaussModel model{.schema = ParseSchema(schema_text)};
  model.mode = mode;
  model.train_rows = train_rows;
  model.budget = budget;
  const size_t d = model.schema.size();

  size_t block_count = 0;
  {
    auto ss = reader.Line("encoding");
    model.encoding.width = ReadSize(ss);
    block_count = ReadSize(ss);
  }
  for (size_t i = 0; i < block_count; ++i) {
    auto ss = reader.Line("block");
    FeatureBlock b;
    b.column = ReadSize(ss);
    std::string kind;
    ss >> kind;
    b.kind = ParseKind(kind);
    b.offset = ReadSize(ss);
    b.width = ReadSize(ss);
    b.center = ReadNum(ss);
    b.scale = ReadNum(ss);
    if (b.column >= d || b.offset + b.width > model.encoding.width) {
      throw InvalidArgument("model file: feature block out of range");
    }
    model.encoding.blocks.push_back(b);
  }
  Eigen::Index rows = 0, cols = 0;
  {
    auto ss = reader.Line("projection");
    rows = static_cast<Eigen::Index>(ReadSize(ss));
    cols = static_cast<Eigen::Index>(ReadSize(ss));
  }
  if (rows != static_cast<Eigen::Index>(model.encoding.width) || cols < 1 ||
      cols >= rows) {
    throw InvalidArgument("model file: projection shape mismatch");
  }
  model.projection.w.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    auto ss = reader.Values();
    for (Eigen::Index j = 0; j < cols; ++j) model.projection.w(i, j) = ReadNum(ss);
  }
  size_t comp_count = 0;
  {
    auto ss = reader.Line("components");
    comp_count = ReadSize(ss);
  }
  for (size_t c = 0; c < comp_count; ++c) {
    GaussianComponent comp;
    {
      auto ss = reader.Line("component");
      comp.weight = ReadNum(ss);
      comp.label = ReadNum(ss);
    }
    {
      auto ss = reader.Line("mu");
      const size_t k = ReadSize(ss);
      if (k != model.encoding.width) {
        throw InvalidArgument("model file: mean length mismatch");
      }
      comp.mu_dp.resize(static_cast<Eigen::Index>(k));
      for (size_t i = 0; i < k; ++i) comp.mu_dp(static_cast<Eigen::Index>(i)) = ReadNum(ss);
    }
    Eigen::Index k = 0;
    {
      auto ss = reader.Line("sigma");
      k = static_cast<Eigen::Index>(ReadSize(ss));
    }
    const Eigen::Index expected =
        cols + (mode == GenerationMode::kRegression ? 1 : 0);
    if (k != expected) {
      throw InvalidArgument("model file: covariance size mismatch");
    }
    comp.sigma_dp.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      auto ss = reader.Values();
      for (Eigen::Index j = 0; j < k; ++j) comp.sigma_dp(i, j) = ReadNum(ss);
    }
    size_t post_count = 0;
    {
      auto ss = reader.Line("postprocess");
      post_count = ReadSize(ss);
    }
    if (post_count != d) {
      throw InvalidArgument("model file: need one postprocess entry per column");
    }
    for (size_t i = 0; i < post_count; ++i) {
      auto ss = reader.Line("post");
      ColumnPostprocess pp;
      pp.column = ReadSize(ss);
      std::string kind;
      ss >> kind;
      pp.kind = ParseKind(kind);
      pp.min = ReadNum(ss);
      pp.max = ReadNum(ss);
      pp.positive_rate = ReadNum(ss);
      const size_t k = ReadSize(ss);
      for (size_t j = 0; j < k; ++j) pp.percentiles.push_back(ReadNum(ss));
      comp.postprocess.push_back(std::move(pp));
    }
    model.components.push_back(std::move(comp));
  }
  if (reader.Peek() == "target") {
    auto ss = reader.Line("target");
    RegressionTarget t;
    t.column = ReadSize(ss);
    t.scale = ReadNum(ss);
    t.mean_dp = ReadNum(ss);
    t.min = ReadNum(ss);
    t.max = ReadNum(ss);
    model.target = t;
  }
  reader.Line("end");
  if (mode == GenerationMode::kRegression && !model.target) {
    throw InvalidArgument("model file: regression model without target");
  }
  return model;
}

void SaveModel(const RonGaussModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file: " + path);
  out << FormatModel(model);
  if (!out) throw Error("write failed: " + path);
}

RonGaussModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseModel(ss.str());
}

}  // namespace ffpdg
