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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ffpdg/error.h"
#include "ffpdg/parallel.h"
#include "ffpdg/random.h"
#include "oracles.h"

namespace ffpdg {
namespace {

TEST(AucTest, Examples) {
  const std::vector<double> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(AucRoc(y, y), 1.0);
  const std::vector<double> flat = {0.3, 0.3, 0.3, 0.3};
  EXPECT_DOUBLE_EQ(AucRoc(flat, y), 0.5);
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
  EXPECT_DOUBLE_EQ(AucRoc(s, y), 0.75);
  EXPECT_DOUBLE_EQ(testing::BruteForceAuc(s, y), 0.75);
  const std::vector<double> one = {1, 1, 1, 1};
  EXPECT_THROW(AucRoc(s, one), InvalidArgument);
  const std::vector<double> shorter = {1, 0};
  EXPECT_THROW(AucRoc(s, shorter), InvalidArgument);
}

TEST(AucTest, MatchesBruteForceWithTies) {
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const size_t n = 2 + rng.UniformInt(49);
    std::vector<double> s(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.UniformInt(6));
      y[i] = static_cast<double>(rng.UniformInt(2));
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_EQ(AucRoc(s, y), testing::BruteForceAuc(s, y));
  }
}

TEST(AucTest, ComplementAndMonotoneInvariance) {
  Rng rng(2);
  std::vector<double> s(200), y(200), neg(200), cubed(200);
  for (size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<double>(i % 2);
    s[i] = rng.Normal() + y[i];
    neg[i] = -s[i];
    cubed[i] = std::exp(s[i]) * 3.0 + 1.0;
  }
  EXPECT_NEAR(AucRoc(s, y) + AucRoc(neg, y), 1.0, 1e-12);
  EXPECT_EQ(AucRoc(s, y), AucRoc(cubed, y));
}

TEST(FairnessTest, DeoExamples) {
  // Group 0 TPR 0.9 (9 of 10), group 1 TPR 0.7 (7 of 10).
  std::vector<double> pred, label, prot;
  for (int g = 0; g < 2; ++g) {
    for (int i = 0; i < 10; ++i) {
      pred.push_back(i < (g == 0 ? 9 : 7) ? 1 : 0);
      label.push_back(1);
      prot.push_back(g);
    }
  }
  EXPECT_NEAR(Deo(pred, label, prot), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(Deo(label, label, prot), 0.0);
  // Swapping group names leaves the value unchanged.
  std::vector<double> flipped(prot.size());
  for (size_t i = 0; i < prot.size(); ++i) flipped[i] = 1 - prot[i];
  EXPECT_DOUBLE_EQ(Deo(pred, label, flipped), Deo(pred, label, prot));
  const std::vector<double> no_pos(label.size(), 0.0);
  EXPECT_THROW(Deo(pred, no_pos, prot), InvalidArgument);
}

TEST(FairnessTest, DspExamples) {
  std::vector<double> pred, prot;
  for (int i = 0; i < 10; ++i) {
    pred.push_back(i < 5 ? 1 : 0);
    prot.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    pred.push_back(i < 3 ? 1 : 0);
    prot.push_back(1);
  }
  EXPECT_NEAR(Dsp(pred, prot), 0.2, 1e-12);
  const std::vector<double> zeros(20, 0.0);
  EXPECT_DOUBLE_EQ(Dsp(zeros, prot), 0.0);
  const std::vector<double> one_group(20, 1.0);
  EXPECT_THROW(Dsp(pred, one_group), InvalidArgument);
}

TEST(FairnessTest, DisparateImpact) {
  auto make = [](int pos0, int pos1) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (int i = 0; i < 100; ++i) {
      out.first.push_back(i < pos0 ? 1 : 0);
      out.second.push_back(0);
    }
    for (int i = 0; i < 100; ++i) {
      out.first.push_back(i < pos1 ? 1 : 0);
      out.second.push_back(1);
    }
    return out;
  };
  auto [y1, c1] = make(30, 50);
  EXPECT_NEAR(DisparateImpact(y1, c1).ratio, 0.6, 1e-12);
  EXPECT_TRUE(DisparateImpact(y1, c1).flagged);
  auto [y2, c2] = make(50, 50);
  EXPECT_DOUBLE_EQ(DisparateImpact(y2, c2).ratio, 1.0);
  EXPECT_FALSE(DisparateImpact(y2, c2).flagged);
  auto [y3, c3] = make(41, 50);
  EXPECT_NEAR(DisparateImpact(y3, c3).ratio, 0.82, 1e-12);
  EXPECT_FALSE(DisparateImpact(y3, c3).flagged);
  auto [y4, c4] = make(40, 50);
  EXPECT_TRUE(DisparateImpact(y4, c4).flagged);
  auto [y5, c5] = make(40, 0);
  EXPECT_THROW(DisparateImpact(y5, c5), InvalidArgument);
}

TEST(TstrTest, SingleModelAndShuffledLabels) {
  const Dataset train = testing::BiasedDataset(3000, 0.6, 0.2, 1);
  const Dataset test = testing::BiasedDataset(2000, 0.6, 0.2, 2);
  const std::vector<ModelKind> lr = {ModelKind::kLogisticRegression};
  const TstrResult one = Tstr(train, test, lr);
  ASSERT_EQ(one.per_model.size(), 1u);
  EXPECT_EQ(one.best_auc, one.per_model[0].auc);
  EXPECT_GT(one.best_auc, 0.7);

  // Permutation null: shuffled labels carry no signal.
  std::vector<double> v = train.values();
  Rng rng(3);
  for (size_t i = train.rows() - 1; i > 0; --i) {
    std::swap(v[i * 4 + 1], v[rng.UniformInt(i + 1) * 4 + 1]);
  }
  const TstrResult null = Tstr(Dataset(train.schema(), v), test, AllModelKinds());
  EXPECT_LE(null.best_auc, 0.55);
}

TEST(TstrTest, SingleClassSyntheticSkipsEveryModel) {
  const Dataset train = testing::BiasedDataset(200, 0.6, 0.2, 4);
  std::vector<double> v = train.values();
  for (size_t r = 0; r < train.rows(); ++r) v[r * 4 + 1] = 1;
  const Dataset test = testing::BiasedDataset(200, 0.6, 0.2, 5);
  EXPECT_THROW(Tstr(Dataset(train.schema(), v), test, AllModelKinds()), Error);
}

TEST(LrdTest, DisjointHalvesAreIndistinguishable) {
  const Dataset d = testing::BiasedDataset(8000, 0.6, 0.2, 6);
  double sum = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto [a, b] = Split(d, 0.5, seed);
    const double v = Lrd(a, b, 5, seed);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 5.0, 0.5, 0.05);
}

TEST(LrdTest, ShiftedDataIsSeparable) {
  const Dataset d = testing::BiasedDataset(2000, 0.6, 0.2, 7);
  std::vector<double> v = d.values();
  for (size_t r = 0; r < d.rows(); ++r) {
    v[r * 4 + 2] += 10;
    v[r * 4 + 3] += 10;
  }
  const Dataset shifted(d.schema(), v);
  EXPECT_LE(Lrd(d, shifted, 5, 1), 0.05);
  EXPECT_NEAR(Lrd(d, shifted, 5, 1), Lrd(shifted, d, 5, 1), 0.02);
  EXPECT_THROW(Lrd(d, shifted, 1, 1), InvalidArgument);
}

TEST(EvaluateTest, KeyValueLinesAndTable) {
  const Dataset train = testing::BiasedDataset(2000, 0.6, 0.2, 8);
  const Dataset test = testing::BiasedDataset(1000, 0.6, 0.2, 9);
  const EvalReport r = Evaluate(train, test, train);
  EXPECT_NEAR(r.lrd, 0.5, 0.05);
  EXPECT_EQ(r.per_model.size(), 4u);
  ASSERT_TRUE(r.disparate_impact.has_value());
  EXPECT_NEAR(r.disparate_impact->ratio, 1.0 / 3.0, 0.08);
  std::istringstream lines(FormatKeyValues(r));
  std::vector<std::string> keys;
  for (std::string line; std::getline(lines, line);) {
    keys.push_back(line.substr(0, line.find('=')));
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"aucroc_best", "deo", "dsp", "di_ratio", "lrd"}));
  const std::string table = FormatTable(r);
  for (const char* name : {"logistic_regression", "gaussian_nb", "bernoulli_nb",
                           "decision_tree", "threshold 0.50"}) {
    EXPECT_NE(table.find(name), std::string::npos) << name;
  }
  for (double v : {r.aucroc_best, r.deo, r.dsp, r.lrd}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(EvaluateTest, UndefinedDisparateImpactPrintsNan) {
  const Dataset train = testing::BiasedDataset(600, 0.6, 0.2, 10);
  std::vector<double> v = train.values();
  // No positives in group C=1 of the synthetic data.
  for (size_t r = 0; r < train.rows(); ++r) {
    if (v[r * 4] == 1) v[r * 4 + 1] = 0;
  }
  const EvalReport r =
      Evaluate(train, testing::BiasedDataset(300, 0.6, 0.2, 11), Dataset(train.schema(), v));
  EXPECT_FALSE(r.disparate_impact.has_value());
  EXPECT_NE(FormatKeyValues(r).find("di_ratio=nan"), std::string::npos);
}

TEST(ParallelTest, ThreadCountAndOrderedResults) {
  setenv("FFPDG_THREADS", "3", 1);
  EXPECT_EQ(ThreadCount(), 3);
  std::vector<size_t> out(100);
  ParallelFor(out.size(), [&](size_t i) { out[i] = i * i; });
  for (size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
  std::atomic<int> calls{0};
  try {
    ParallelFor(10, [&](size_t i) {
      ++calls;
      if (i == 4 || i == 7) throw std::runtime_error("task " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "task 4");
  }
  EXPECT_EQ(calls.load(), 10);
  setenv("FFPDG_THREADS", "junk", 1);
  EXPECT_GE(ThreadCount(), 1);
  unsetenv("FFPDG_THREADS");
}

}  // namespace
}  // namespace ffpdg
