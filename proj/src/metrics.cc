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

#include "ffpdg/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ffpdg/error.h"
#include "ffpdg/parallel.h"
#include "ffpdg/random.h"

namespace ffpdg {
namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> Threshold(const Eigen::VectorXd& probs) {
  std::vector<double> out(static_cast<size_t>(probs.size()));
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    out[static_cast<size_t>(i)] = probs(i) > kPredictionThreshold ? 1.0 : 0.0;
  }
  return out;
}

void Shuffle(std::vector<size_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.UniformInt(i)]);
  }
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double AucRoc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("scores and labels differ in length");
  }
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their average.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t k = i; k < j; ++k) {
      const double y = labels[order[k]];
      if (y != 0.0 && y != 1.0) throw InvalidArgument("labels must be 0 or 1");
      if (y == 1.0) {
        positives += 1.0;
        rank_sum += avg;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw InvalidArgument("AUC needs both classes");
  }
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

double Deo(std::span<const double> predictions, std::span<const double> labels,
           std::span<const double> protected_values) {
  if (predictions.size() != labels.size() ||
      predictions.size() != protected_values.size()) {
    throw InvalidArgument("DEO inputs differ in length");
  }
  double hits[2] = {0.0, 0.0};
  double positives[2] = {0.0, 0.0};
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0) continue;
    const int g = protected_values[i] == 1.0 ? 1 : 0;
    positives[g] += 1.0;
    hits[g] += predictions[i] == 1.0 ? 1.0 : 0.0;
  }
  if (positives[0] == 0.0 || positives[1] == 0.0) {
    throw InvalidArgument("DEO needs positive labels in both groups");
  }
  return std::abs(hits[0] / positives[0] - hits[1] / positives[1]);
}

double Dsp(std::span<const double> predictions,
           std::span<const double> protected_values) {
  if (predictions.size() != protected_values.size()) {
    throw InvalidArgument("DSP inputs differ in length");
  }
  double ones[2] = {0.0, 0.0};
  double count[2] = {0.0, 0.0};
  for (size_t i = 0; i < predictions.size(); ++i) {
    const int g = protected_values[i] == 1.0 ? 1 : 0;
    count[g] += 1.0;
    ones[g] += predictions[i] == 1.0 ? 1.0 : 0.0;
  }
  if (count[0] == 0.0 || count[1] == 0.0) {
    throw InvalidArgument("DSP needs members of both groups");
  }
  return std::abs(ones[0] / count[0] - ones[1] / count[1]);
}

DisparateImpactResult DisparateImpact(std::span<const double> labels,
                                      std::span<const double> protected_values) {
  if (labels.size() != protected_values.size()) {
    throw InvalidArgument("disparate impact inputs differ in length");
  }
  double ones[2] = {0.0, 0.0};
  double count[2] = {0.0, 0.0};
  for (size_t i = 0; i < labels.size(); ++i) {
    const int g = protected_values[i] == 1.0 ? 1 : 0;
    count[g] += 1.0;
    ones[g] += labels[i] == 1.0 ? 1.0 : 0.0;
  }
  if (count[0] == 0.0 || count[1] == 0.0) {
    throw InvalidArgument("disparate impact needs members of both groups");
  }
  if (ones[1] == 0.0) {
    throw InvalidArgument(
        "disparate impact is undefined: the C=1 group has no positives");
  }
  DisparateImpactResult r;
  r.ratio = (ones[0] / count[0]) / (ones[1] / count[1]);
  r.flagged = r.ratio <= 0.8;
  return r;
}

TstrResult Tstr(const Dataset& synthetic, const Dataset& real_test,
                std::span<const ModelKind> zoo, bool include_protected,
                const ClassifierOptions& options) {
  if (!(synthetic.schema() == real_test.schema())) {
    throw InvalidArgument("synthetic and test schemas differ");
  }
  if (!synthetic.schema().label_index()) {
    throw InvalidArgument("TSTR needs a label column");
  }
  if (zoo.empty()) throw InvalidArgument("empty model zoo");
  const FeatureColumns cols{.label = false,
                            .protected_column = include_protected};
  const FeatureMatrix train = BuildFeatures(synthetic, cols);
  const FeatureMatrix test = BuildFeatures(real_test, cols);
  const std::vector<double> test_labels = ToVector(test.y);
  const std::vector<double> test_protected = ToVector(test.protected_values);

  std::vector<std::optional<ModelScore>> scores(zoo.size());
  std::vector<std::string> errors(zoo.size());
  ParallelFor(zoo.size(), [&](size_t i) {
    try {
      const Classifier model =
          FitClassifier(zoo[i], train.x, train.y, options);
      const Eigen::VectorXd probs = PredictProba(model, test.x);
      const std::vector<double> p = ToVector(probs);
      const std::vector<double> pred = Threshold(probs);
      ModelScore s{zoo[i]};
      s.auc = AucRoc(p, test_labels);
      s.deo = Deo(pred, test_labels, test_protected);
      s.dsp = Dsp(pred, test_protected);
      scores[i] = s;
    } catch (const Error& e) {
      errors[i] = std::string(ToString(zoo[i])) + ": " + e.what();
    }
  });

  TstrResult result;
  for (size_t i = 0; i < zoo.size(); ++i) {
    if (scores[i]) {
      result.per_model.push_back(*scores[i]);
      result.best_auc = std::max(result.best_auc, scores[i]->auc);
    } else {
      result.skipped.push_back(errors[i]);
    }
  }
  if (result.per_model.empty()) {
    throw Error("every model failed: " + result.skipped.front());
  }
  return result;
}

double Lrd(const Dataset& real, const Dataset& synthetic, int folds,
           uint64_t seed) {
  if (folds < 2) throw InvalidArgument("LRD needs at least 2 folds");
  if (!(real.schema() == synthetic.schema())) {
    throw InvalidArgument("real and synthetic schemas differ");
  }
  const size_t m = std::min(real.rows(), synthetic.rows());
  if (m < static_cast<size_t>(folds)) {
    throw InvalidArgument("LRD needs at least " + std::to_string(folds) +
                          " rows per origin");
  }
  Rng rng(seed);
  std::vector<size_t> real_rows(real.rows());
  std::vector<size_t> synth_rows(synthetic.rows());
  std::iota(real_rows.begin(), real_rows.end(), size_t{0});
  std::iota(synth_rows.begin(), synth_rows.end(), size_t{0});
  Shuffle(real_rows, rng);
  Shuffle(synth_rows, rng);
  real_rows.resize(m);
  synth_rows.resize(m);
  // Keep the original row order within each origin.
  std::sort(real_rows.begin(), real_rows.end());
  std::sort(synth_rows.begin(), synth_rows.end());

  const FeatureMatrix fr = BuildFeatures(real.Select(real_rows), {true, true});
  const FeatureMatrix fs = BuildFeatures(synthetic.Select(synth_rows), {true, true});
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd x(2 * mi, fr.x.cols());
  x.topRows(mi) = fr.x;
  x.bottomRows(mi) = fs.x;
  Eigen::VectorXd origin(2 * mi);
  origin.head(mi).setOnes();
  origin.tail(mi).setZero();

  // Stratified assignment: each origin is shuffled and dealt round-robin.
  std::vector<int> fold_of(2 * m);
  for (int part = 0; part < 2; ++part) {
    std::vector<size_t> idx(m);
    std::iota(idx.begin(), idx.end(), part * m);
    Shuffle(idx, rng);
    for (size_t k = 0; k < m; ++k) {
      fold_of[idx[k]] = static_cast<int>(k % static_cast<size_t>(folds));
    }
  }

  std::vector<double> aucs(static_cast<size_t>(folds));
  ParallelFor(static_cast<size_t>(folds), [&](size_t f) {
    std::vector<Eigen::Index> train_idx, test_idx;
    for (size_t i = 0; i < 2 * m; ++i) {
      (fold_of[i] == static_cast<int>(f) ? test_idx : train_idx)
          .push_back(static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd xtr = x(train_idx, Eigen::all);
    const Eigen::VectorXd ytr = origin(train_idx);
    const Eigen::MatrixXd xte = x(test_idx, Eigen::all);
    const Eigen::VectorXd yte = origin(test_idx);
    const Classifier model =
        FitClassifier(ModelKind::kLogisticRegression, xtr, ytr);
    const std::vector<double> p = ToVector(PredictProba(model, xte));
    aucs[f] = AucRoc(p, ToVector(yte));
  });
  const double mean =
      std::accumulate(aucs.begin(), aucs.end(), 0.0) / static_cast<double>(folds);
  return std::clamp(1.0 - mean, 0.0, 1.0);
}

EvalReport Evaluate(const Dataset& real_train, const Dataset& real_test,
                    const Dataset& synthetic, const EvalOptions& options) {
  if (!(real_train.schema() == real_test.schema()) ||
      !(real_train.schema() == synthetic.schema())) {
    throw InvalidArgument("train, test and synthetic schemas differ");
  }
  EvalReport report;
  report.folds = options.folds;
  report.seed = options.seed;
  report.include_protected = options.include_protected;
  const TstrResult tstr =
      Tstr(synthetic, real_test, options.zoo, options.include_protected);
  report.aucroc_best = tstr.best_auc;
  report.per_model = tstr.per_model;
  report.skipped = tstr.skipped;
  for (const ModelScore& s : tstr.per_model) {
    report.deo += s.deo;
    report.dsp += s.dsp;
  }
  report.deo /= static_cast<double>(tstr.per_model.size());
  report.dsp /= static_cast<double>(tstr.per_model.size());

  const Schema& schema = synthetic.schema();
  try {
    report.disparate_impact =
        DisparateImpact(synthetic.Column(*schema.label_index()),
                        synthetic.Column(schema.protected_index()));
  } catch (const InvalidArgument& e) {
    report.disparate_impact_error = e.what();
  }
  report.lrd = Lrd(real_train, synthetic, options.folds, options.seed);
  return report;
}

std::string FormatKeyValues(const EvalReport& report) {
  std::ostringstream out;
  out << "aucroc_best=" << Fmt(report.aucroc_best) << "\n";
  out << "deo=" << Fmt(report.deo) << "\n";
  out << "dsp=" << Fmt(report.dsp) << "\n";
  out << "di_ratio="
      << (report.disparate_impact ? Fmt(report.disparate_impact->ratio)
                                  : std::string("nan"))
      << "\n";
  out << "lrd=" << Fmt(report.lrd) << "\n";
  return out.str();
}

std::string FormatTable(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %8s %8s %8s\n", "model", "AUCROC",
                "DEO", "DSP");
  out << line;
  for (const ModelScore& s : report.per_model) {
    std::snprintf(line, sizeof(line), "%-22s %8.4f %8.4f %8.4f\n",
                  std::string(ToString(s.kind)).c_str(), s.auc, s.deo, s.dsp);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-22s %8.4f %8.4f %8.4f\n",
                "best / mean", report.aucroc_best, report.deo, report.dsp);
  out << line;
  for (const std::string& s : report.skipped) out << "skipped " << s << "\n";
  if (report.disparate_impact) {
    std::snprintf(line, sizeof(line), "%-22s %8.4f%s\n", "DI ratio (synthetic)",
                  report.disparate_impact->ratio,
                  report.disparate_impact->flagged ? "  (<= 0.8: flagged)" : "");
    out << line;
  } else {
    out << "DI ratio (synthetic)   undefined: " << report.disparate_impact_error
        << "\n";
  }
  std::snprintf(line, sizeof(line), "%-22s %8.4f  (%d-fold, seed %llu)\n",
                "LRD", report.lrd, report.folds,
                static_cast<unsigned long long>(report.seed));
  out << line;
  std::snprintf(line, sizeof(line),
                "prediction threshold %.2f; protected column %s\n",
                kPredictionThreshold,
                report.include_protected ? "used as a model feature"
                                         : "withheld from model features");
  out << line;
  return out.str();
}

}  // namespace ffpdg
