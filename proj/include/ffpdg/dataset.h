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

// Typed tabular data: schema, dataset, CSV I/O and column summaries.
//
// A Dataset is an immutable n x d table of doubles. Binary columns hold 0/1,
// categorical columns hold the level index, continuous columns hold the value.
// Exactly one binary column is the protected attribute; at most one binary
// column is the label.

#ifndef FFPDG_DATASET_H_
#define FFPDG_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ffpdg {

enum class ColumnKind { kContinuous, kBinary, kCategorical };
enum class ColumnRole { kFeature, kProtected, kLabel };

std::string_view ToString(ColumnKind kind);
std::string_view ToString(ColumnRole role);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  ColumnRole role = ColumnRole::kFeature;
  // Only for kCategorical; order defines the level index.
  std::vector<std::string> levels;

  bool operator==(const ColumnSpec&) const = default;
};

class Schema {
 public:
  // Validates the column list; throws InvalidArgument on any violation.
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec& column(size_t i) const { return columns_[i]; }
  size_t size() const { return columns_.size(); }
  size_t protected_index() const { return protected_index_; }
  std::optional<size_t> label_index() const { return label_index_; }
  std::optional<size_t> Find(std::string_view name) const;

  bool operator==(const Schema& other) const {
    return columns_ == other.columns_;
  }

 private:
  std::vector<ColumnSpec> columns_;
  size_t protected_index_ = 0;
  std::optional<size_t> label_index_;
};

// Schema file format, one column per line in column order:
//
//   # comment
//   column = <name>:<continuous|binary|categorical>:<feature|protected|label>[:<level>|<level>|...]
//
// Levels are only given for categorical columns.
Schema ParseSchema(std::string_view text);
Schema LoadSchema(const std::string& path);
std::string FormatSchema(const Schema& schema);

class Dataset {
 public:
  // `values` is row-major with schema.size() entries per row. Throws
  // InvalidArgument unless n >= 1, d >= 2 and every value fits its column.
  Dataset(Schema schema, std::vector<double> values);

  const Schema& schema() const { return schema_; }
  size_t rows() const { return rows_; }
  size_t cols() const { return schema_.size(); }
  double At(size_t row, size_t col) const {
    return values_[row * schema_.size() + col];
  }
  std::span<const double> Row(size_t row) const {
    return {values_.data() + row * schema_.size(), schema_.size()};
  }
  std::vector<double> Column(size_t col) const;
  const std::vector<double>& values() const { return values_; }

  // Rows in the given order; indices may repeat.
  Dataset Select(std::span<const size_t> row_indices) const;

  bool operator==(const Dataset& other) const {
    return schema_ == other.schema_ && values_ == other.values_;
  }

 private:
  Schema schema_;
  std::vector<double> values_;
  size_t rows_ = 0;
};

// Checks a single value against its column kind.
bool ValueFits(const ColumnSpec& spec, double value);

// RFC-4180 CSV with a header row matching the schema column names.
Dataset ParseCsv(std::string_view text, const Schema& schema);
Dataset LoadCsv(const std::string& path, const Schema& schema);
std::string FormatCsv(const Dataset& dataset);
void SaveCsv(const Dataset& dataset, const std::string& path);

struct ColumnSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // One entry per requested quantile, nearest-rank.
  std::vector<double> percentiles;
};

struct ColumnStats {
  std::vector<double> quantiles;
  std::vector<ColumnSummary> columns;
};

// Nearest-rank quantile of an ascending-sorted sample: the ceil(q * n)-th
// smallest value, with q = 0 mapping to the minimum.
double NearestRank(std::span<const double> sorted, double q);

ColumnStats ComputeColumnStats(const Dataset& dataset,
                               std::span<const double> quantiles);

// Seeded shuffle split into sizes ceil(fraction * n) and the remainder.
std::pair<Dataset, Dataset> Split(const Dataset& dataset, double fraction,
                                  uint64_t seed);

// The row permutation behind Split, exposed for tests and callers that need
// index sets.
std::pair<std::vector<size_t>, std::vector<size_t>> SplitIndices(
    size_t n, double fraction, uint64_t seed);

}  // namespace ffpdg

#endif  // FFPDG_DATASET_H_
