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

#include "ffpdg/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ffpdg/error.h"
#include "ffpdg/random.h"
#include "oracles.h"

namespace ffpdg {
namespace {

Schema SmallSchema() {
  return ParseSchema(
      "column = age:continuous:feature\n"
      "column = sex:binary:protected\n"
      "column = income:binary:label\n");
}

Schema MixedSchema() {
  return ParseSchema(
      "# mixed\n"
      "column = x:continuous:feature\n"
      "column = c:binary:protected\n"
      "column = color:categorical:feature:red|green|blue\n"
      "column = y:binary:label\n");
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST(SchemaTest, ParsesColumnsAndRoles) {
  const Schema s = MixedSchema();
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.protected_index(), 1u);
  EXPECT_EQ(s.label_index(), 3u);
  EXPECT_EQ(s.column(2).levels, (std::vector<std::string>{"red", "green", "blue"}));
  EXPECT_EQ(s.Find("color"), 2u);
  EXPECT_FALSE(s.Find("nope").has_value());
  EXPECT_EQ(ParseSchema(FormatSchema(s)), s);
}

TEST(SchemaTest, RejectsInvalidSchemas) {
  // No protected column.
  EXPECT_THROW(ParseSchema("column = a:binary:feature\ncolumn = b:binary:label\n"),
               InvalidArgument);
  // Two protected columns.
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = b:binary:protected\n"),
               InvalidArgument);
  // Two labels.
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = b:binary:label\n"
                           "column = c:binary:label\n"),
               InvalidArgument);
  // Protected must be binary.
  EXPECT_THROW(ParseSchema("column = a:continuous:protected\ncolumn = b:binary:feature\n"),
               InvalidArgument);
  // Duplicate names.
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = a:binary:feature\n"),
               InvalidArgument);
  // Categorical needs two unique levels.
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = b:categorical:feature:x\n"),
               InvalidArgument);
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = b:categorical:feature:x|x\n"),
               InvalidArgument);
  EXPECT_THROW(ParseSchema("column = a:binary:protected\ncolumn = b:weird:feature\n"),
               InvalidArgument);
}

TEST(CsvTest, ParsesThreeRows) {
  const Dataset d = ParseCsv("age,sex,income\n30,1,0\n41.5,0,1\n22,1,1\n",
                             SmallSchema());
  EXPECT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.cols(), 3u);
  EXPECT_DOUBLE_EQ(d.At(1, 0), 41.5);
  EXPECT_DOUBLE_EQ(d.At(2, 2), 1.0);
}

TEST(CsvTest, BadCellNamesRowAndColumn) {
  try {
    ParseCsv("age,sex,income\n30,1,0\nabc,0,1\n", SmallSchema());
    FAIL() << "expected a parse error";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("age"), std::string::npos) << msg;
  }
}

TEST(CsvTest, RejectsHeaderMismatchUnknownLevelAndMissingFile) {
  EXPECT_THROW(ParseCsv("age,gender,income\n1,0,0\n", SmallSchema()),
               InvalidArgument);
  EXPECT_THROW(ParseCsv("x,c,color,y\n1,0,purple,1\n", MixedSchema()),
               InvalidArgument);
  EXPECT_THROW(ParseCsv("age,sex,income\n1,2,0\n", SmallSchema()),
               InvalidArgument);
  EXPECT_THROW(ParseCsv("age,sex,income\n1,,0\n", SmallSchema()),
               InvalidArgument);
  EXPECT_THROW(LoadCsv("/nonexistent/file.csv", SmallSchema()), Error);
}

TEST(CsvTest, EmptyDatasetRejected) {
  EXPECT_THROW(ParseCsv("age,sex,income\n", SmallSchema()), InvalidArgument);
  EXPECT_THROW(Dataset(SmallSchema(), {}), InvalidArgument);
}

TEST(CsvTest, RoundTripIsExact) {
  Rng rng(7);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) {
    v.push_back(rng.Normal() * std::pow(10.0, static_cast<double>(i % 9) - 4));
    v.push_back(static_cast<double>(rng.UniformInt(2)));
    v.push_back(static_cast<double>(rng.UniformInt(3)));
    v.push_back(static_cast<double>(rng.UniformInt(2)));
  }
  const Dataset d(MixedSchema(), v);
  const std::string path = TempPath("ffpdg_roundtrip.csv");
  SaveCsv(d, path);
  EXPECT_EQ(LoadCsv(path, MixedSchema()), d);
  std::filesystem::remove(path);
}

TEST(CsvTest, CategoricalWrittenAsLevelNames) {
  const Dataset d(MixedSchema(), {1.5, 1, 2, 0});
  const std::string text = FormatCsv(d);
  EXPECT_NE(text.find("blue"), std::string::npos);
  EXPECT_EQ(text, "x,c,color,y\n1.5,1,blue,0\n");
}

TEST(CsvTest, LoadsAdult) {
  const Schema s = LoadSchema(testing::DataPath("adult.schema"));
  const Dataset d = LoadCsv(testing::DataPath("adult_train.csv"), s);
  EXPECT_EQ(d.cols(), 5u);
  EXPECT_GT(d.rows(), 30000u);
  EXPECT_EQ(s.column(s.protected_index()).name, "sex");
  EXPECT_EQ(s.column(*s.label_index()).name, "income");
}

TEST(ColumnStatsTest, NearestRankMedian) {
  const Dataset d(SmallSchema(), {1, 0, 0, 2, 1, 0, 3, 0, 1, 4, 1, 1});
  const std::vector<double> q = {0.5};
  const ColumnStats s = ComputeColumnStats(d, q);
  EXPECT_DOUBLE_EQ(s.columns[0].percentiles[0], 2.0);
  EXPECT_DOUBLE_EQ(s.columns[0].min, 1.0);
  EXPECT_DOUBLE_EQ(s.columns[0].max, 4.0);
  EXPECT_DOUBLE_EQ(s.columns[0].mean, 2.5);
}

TEST(ColumnStatsTest, ConstantColumn) {
  const Dataset d(SmallSchema(), {5, 0, 0, 5, 1, 0, 5, 0, 1});
  const std::vector<double> q = {0.1, 0.9};
  const ColumnStats stats = ComputeColumnStats(d, q);
  const ColumnSummary& c = stats.columns[0];
  EXPECT_EQ(c.min, 5.0);
  EXPECT_EQ(c.max, 5.0);
  EXPECT_EQ(c.mean, 5.0);
}

TEST(ColumnStatsTest, NormalMedianMatchesSortOracle) {
  Rng rng(11);
  std::vector<double> v;
  std::vector<double> col;
  for (int i = 0; i < 10000; ++i) {
    col.push_back(rng.Normal());
    v.insert(v.end(), {col.back(), 0.0, 1.0});
  }
  const std::vector<double> q = {0.5};
  const double median = ComputeColumnStats(Dataset(SmallSchema(), v), q)
                            .columns[0].percentiles[0];
  std::sort(col.begin(), col.end());
  EXPECT_EQ(median, col[4999]);
  EXPECT_NEAR(median, 0.0, 0.1);
}

TEST(ColumnStatsTest, OrderingInvariantAndErrors) {
  Rng rng(3);
  std::vector<double> v;
  for (int i = 0; i < 97; ++i) {
    v.insert(v.end(), {rng.Normal() * 10, static_cast<double>(rng.UniformInt(2)),
                       static_cast<double>(rng.UniformInt(2))});
  }
  const Dataset d(SmallSchema(), v);
  const std::vector<double> q = {0.0, 0.01, 0.25, 0.5, 0.75, 1.0};
  for (const ColumnSummary& c : ComputeColumnStats(d, q).columns) {
    EXPECT_LE(c.min, c.mean);
    EXPECT_LE(c.mean, c.max);
    for (double p : c.percentiles) {
      EXPECT_LE(c.min, p);
      EXPECT_LE(p, c.max);
    }
  }
  EXPECT_THROW(ComputeColumnStats(d, {}), InvalidArgument);
  const std::vector<double> bad = {1.5};
  EXPECT_THROW(ComputeColumnStats(d, bad), InvalidArgument);
}

Dataset Numbered(size_t n) {
  std::vector<double> v;
  for (size_t i = 0; i < n; ++i) v.insert(v.end(), {static_cast<double>(i), 0, 1});
  return Dataset(SmallSchema(), v);
}

TEST(SplitTest, Sizes) {
  auto [a, b] = Split(Numbered(10), 0.5, 1);
  EXPECT_EQ(a.rows(), 5u);
  EXPECT_EQ(b.rows(), 5u);
  auto [c, e] = Split(Numbered(100), 0.7, 1);
  EXPECT_EQ(c.rows(), 70u);
  EXPECT_EQ(e.rows(), 30u);
  auto [f, g] = Split(Numbered(7), 0.5, 1);
  EXPECT_EQ(f.rows(), 4u);
  EXPECT_EQ(g.rows(), 3u);
}

TEST(SplitTest, DeterministicDisjointCover) {
  const auto [a1, b1] = SplitIndices(101, 0.3, 42);
  const auto [a2, b2] = SplitIndices(101, 0.3, 42);
  EXPECT_EQ(a1, a2);
  EXPECT_EQ(b1, b2);
  std::set<size_t> all(a1.begin(), a1.end());
  for (size_t i : b1) EXPECT_TRUE(all.insert(i).second) << "overlap at " << i;
  EXPECT_EQ(all.size(), 101u);
  EXPECT_EQ(*all.rbegin(), 100u);
  const auto [a3, b3] = SplitIndices(101, 0.3, 43);
  EXPECT_NE(a1, a3);
}

TEST(SplitTest, RejectsBadFraction) {
  EXPECT_THROW(Split(Numbered(10), 0.0, 1), InvalidArgument);
  EXPECT_THROW(Split(Numbered(10), 1.0, 1), InvalidArgument);
  EXPECT_THROW(Split(Numbered(1), 0.5, 1), InvalidArgument);
}

}  // namespace
}  // namespace ffpdg
