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
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "ffpdg/error.h"
#include "ffpdg/random.h"

namespace ffpdg {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> SplitOn(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.emplace_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << contents;
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

// Splits CSV text into records of fields. Handles quoted fields with ""
// escapes and embedded separators/newlines. Returns the 1-based line number
// each record starts on alongside it.
std::vector<std::pair<size_t, std::vector<std::string>>> TokenizeCsv(
    std::string_view text) {
  std::vector<std::pair<size_t, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  size_t record_line = 1;

  auto end_record = [&]() {
    fields.push_back(std::move(field));
    field.clear();
    const bool blank = fields.size() == 1 && fields[0].empty();
    if (!blank) records.emplace_back(record_line, std::move(fields));
    fields.clear();
    field_started = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw InvalidArgument("unterminated quoted field starting on line " +
                          std::to_string(record_line));
  }
  if (!field.empty() || !fields.empty()) end_record();
  return records;
}

std::string QuoteIfNeeded(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string_view ToString(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kContinuous:
      return "continuous";
    case ColumnKind::kBinary:
      return "binary";
    case ColumnKind::kCategorical:
      return "categorical";
  }
  return "?";
}

std::string_view ToString(ColumnRole role) {
  switch (role) {
    case ColumnRole::kFeature:
      return "feature";
    case ColumnRole::kProtected:
      return "protected";
    case ColumnRole::kLabel:
      return "label";
  }
  return "?";
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  std::optional<size_t> protected_index;
  for (size_t i = 0; i < columns_.size(); ++i) {
    const ColumnSpec& c = columns_[i];
    if (c.name.empty()) {
      throw InvalidArgument("column " + std::to_string(i) + " has empty name");
    }
    if (!names.insert(c.name).second) {
      throw InvalidArgument("duplicate column name: " + c.name);
    }
    if (c.kind == ColumnKind::kCategorical) {
      if (c.levels.size() < 2) {
        throw InvalidArgument("categorical column " + c.name +
                              " needs at least 2 levels");
      }
      std::set<std::string> levels(c.levels.begin(), c.levels.end());
      if (levels.size() != c.levels.size()) {
        throw InvalidArgument("categorical column " + c.name +
                              " has duplicate levels");
      }
    } else if (!c.levels.empty()) {
      throw InvalidArgument("column " + c.name +
                            " lists levels but is not categorical");
    }
    if (c.role != ColumnRole::kFeature && c.kind != ColumnKind::kBinary) {
      throw InvalidArgument("column " + c.name + " has role " +
                            std::string(ToString(c.role)) +
                            " and must be binary");
    }
    if (c.role == ColumnRole::kProtected) {
      if (protected_index) {
        throw InvalidArgument("more than one protected column");
      }
      protected_index = i;
    }
    if (c.role == ColumnRole::kLabel) {
      if (label_index_) throw InvalidArgument("more than one label column");
      label_index_ = i;
    }
  }
  if (!protected_index) throw InvalidArgument("schema has no protected column");
  protected_index_ = *protected_index;
}

std::optional<size_t> Schema::Find(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

Schema ParseSchema(std::string_view text) {
  std::vector<ColumnSpec> columns;
  size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("schema line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key != "column") {
      throw InvalidArgument("schema line " + std::to_string(line_no) +
                            ": unknown key '" + std::string(key) + "'");
    }
    const std::vector<std::string> parts = SplitOn(value, ':');
    if (parts.size() < 3 || parts.size() > 4) {
      throw InvalidArgument("schema line " + std::to_string(line_no) +
                            ": expected name:kind:role[:levels]");
    }
    ColumnSpec spec;
    spec.name = parts[0];
    if (parts[1] == "continuous") {
      spec.kind = ColumnKind::kContinuous;
    } else if (parts[1] == "binary") {
      spec.kind = ColumnKind::kBinary;
    } else if (parts[1] == "categorical") {
      spec.kind = ColumnKind::kCategorical;
    } else {
      throw InvalidArgument("schema line " + std::to_string(line_no) +
                            ": unknown kind '" + parts[1] + "'");
    }
    if (parts[2] == "feature") {
      spec.role = ColumnRole::kFeature;
    } else if (parts[2] == "protected") {
      spec.role = ColumnRole::kProtected;
    } else if (parts[2] == "label") {
      spec.role = ColumnRole::kLabel;
    } else {
      throw InvalidArgument("schema line " + std::to_string(line_no) +
                            ": unknown role '" + parts[2] + "'");
    }
    if (parts.size() == 4) spec.levels = SplitOn(parts[3], '|');
    columns.push_back(std::move(spec));
  }
  return Schema(std::move(columns));
}

Schema LoadSchema(const std::string& path) {
  return ParseSchema(ReadFile(path));
}

std::string FormatSchema(const Schema& schema) {
  std::string out;
  for (const ColumnSpec& c : schema.columns()) {
    out += "column = " + c.name + ":" + std::string(ToString(c.kind)) + ":" +
           std::string(ToString(c.role));
    if (c.kind == ColumnKind::kCategorical) {
      out += ":";
      for (size_t i = 0; i < c.levels.size(); ++i) {
        if (i) out += "|";
        out += c.levels[i];
      }
    }
    out += "\n";
  }
  return out;
}

bool ValueFits(const ColumnSpec& spec, double value) {
  switch (spec.kind) {
    case ColumnKind::kContinuous:
      return std::isfinite(value);
    case ColumnKind::kBinary:
      return value == 0.0 || value == 1.0;
    case ColumnKind::kCategorical:
      return value >= 0.0 && value < static_cast<double>(spec.levels.size()) &&
             value == std::floor(value);
  }
  return false;
}

Dataset::Dataset(Schema schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  const size_t d = schema_.size();
  if (d < 2) throw InvalidArgument("dataset needs at least 2 columns");
  if (values_.size() % d != 0) {
    throw InvalidArgument("value count is not a multiple of the column count");
  }
  rows_ = values_.size() / d;
  if (rows_ == 0) throw InvalidArgument("dataset needs at least 1 row");
  for (size_t r = 0; r < rows_; ++r) {
    for (size_t c = 0; c < d; ++c) {
      if (!ValueFits(schema_.column(c), values_[r * d + c])) {
        throw InvalidArgument("row " + std::to_string(r) + ", column " +
                              schema_.column(c).name +
                              ": value does not fit column kind");
      }
    }
  }
}

std::vector<double> Dataset::Column(size_t col) const {
  std::vector<double> out(rows_);
  for (size_t r = 0; r < rows_; ++r) out[r] = At(r, col);
  return out;
}

Dataset Dataset::Select(std::span<const size_t> row_indices) const {
  const size_t d = cols();
  std::vector<double> out;
  out.reserve(row_indices.size() * d);
  for (size_t r : row_indices) {
    const auto row = Row(r);
    out.insert(out.end(), row.begin(), row.end());
  }
  return Dataset(schema_, std::move(out));
}

Dataset ParseCsv(std::string_view text, const Schema& schema) {
  const auto records = TokenizeCsv(text);
  if (records.empty()) throw InvalidArgument("CSV has no header row");
  const auto& header = records[0].second;
  if (header.size() != schema.size()) {
    throw InvalidArgument("CSV header has " + std::to_string(header.size()) +
                          " columns, schema has " +
                          std::to_string(schema.size()));
  }
  for (size_t c = 0; c < header.size(); ++c) {
    if (std::string(Trim(header[c])) != schema.column(c).name) {
      throw InvalidArgument("CSV header column " + std::to_string(c) + " is '" +
                            header[c] + "', schema expects '" +
                            schema.column(c).name + "'");
    }
  }
  const size_t d = schema.size();
  std::vector<double> values;
  values.reserve((records.size() - 1) * d);
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [line, fields] = records[r];
    const std::string where =
        "row " + std::to_string(r) + " (line " + std::to_string(line) + ")";
    if (fields.size() != d) {
      throw InvalidArgument(where + ": expected " + std::to_string(d) +
                            " fields, got " + std::to_string(fields.size()));
    }
    for (size_t c = 0; c < d; ++c) {
      const ColumnSpec& spec = schema.column(c);
      const std::string cell(Trim(fields[c]));
      const std::string at = where + ", column " + spec.name;
      if (cell.empty()) throw InvalidArgument(at + ": missing value");
      double v = 0.0;
      if (spec.kind == ColumnKind::kCategorical) {
        auto it = std::find(spec.levels.begin(), spec.levels.end(), cell);
        if (it == spec.levels.end()) {
          throw InvalidArgument(at + ": unknown categorical level '" + cell +
                                "'");
        }
        v = static_cast<double>(it - spec.levels.begin());
      } else {
        char* end = nullptr;
        errno = 0;
        v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size() || errno == ERANGE ||
            !std::isfinite(v)) {
          throw InvalidArgument(at + ": cannot parse '" + cell +
                                "' as a number");
        }
        if (spec.kind == ColumnKind::kBinary && v != 0.0 && v != 1.0) {
          throw InvalidArgument(at + ": binary value must be 0 or 1, got '" +
                                cell + "'");
        }
      }
      values.push_back(v);
    }
  }
  if (values.empty()) throw InvalidArgument("CSV has no data rows");
  return Dataset(schema, std::move(values));
}

Dataset LoadCsv(const std::string& path, const Schema& schema) {
  return ParseCsv(ReadFile(path), schema);
}

std::string FormatCsv(const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  std::string out;
  for (size_t c = 0; c < schema.size(); ++c) {
    if (c) out += ",";
    out += QuoteIfNeeded(schema.column(c).name);
  }
  out += "\n";
  for (size_t r = 0; r < dataset.rows(); ++r) {
    for (size_t c = 0; c < schema.size(); ++c) {
      if (c) out += ",";
      const ColumnSpec& spec = schema.column(c);
      const double v = dataset.At(r, c);
      switch (spec.kind) {
        case ColumnKind::kCategorical:
          out += QuoteIfNeeded(spec.levels[static_cast<size_t>(v)]);
          break;
        case ColumnKind::kBinary:
          out += v != 0.0 ? "1" : "0";
          break;
        case ColumnKind::kContinuous:
          out += FormatDouble(v);
          break;
      }
    }
    out += "\n";
  }
  return out;
}

void SaveCsv(const Dataset& dataset, const std::string& path) {
  WriteFile(path, FormatCsv(dataset));
}

double NearestRank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("quantile must lie in [0, 1]");
  }
  const double n = static_cast<double>(sorted.size());
  // Guard against q * n landing a hair above an integer.
  const double rank = std::ceil(q * n - 1e-9);
  const size_t index = rank < 1.0 ? 0 : static_cast<size_t>(rank) - 1;
  return sorted[std::min(index, sorted.size() - 1)];
}

ColumnStats ComputeColumnStats(const Dataset& dataset,
                               std::span<const double> quantiles) {
  if (quantiles.empty()) throw InvalidArgument("empty quantile list");
  for (double q : quantiles) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw InvalidArgument("quantile must lie in [0, 1]");
    }
  }
  ColumnStats stats;
  stats.quantiles.assign(quantiles.begin(), quantiles.end());
  for (size_t c = 0; c < dataset.cols(); ++c) {
    std::vector<double> col = dataset.Column(c);
    std::sort(col.begin(), col.end());
    ColumnSummary s;
    s.min = col.front();
    s.max = col.back();
    s.mean = std::accumulate(col.begin(), col.end(), 0.0) /
             static_cast<double>(col.size());
    // Summation error can push the mean a rounding step outside the range.
    s.mean = std::clamp(s.mean, s.min, s.max);
    for (double q : quantiles) s.percentiles.push_back(NearestRank(col, q));
    stats.columns.push_back(std::move(s));
  }
  return stats;
}

std::pair<std::vector<size_t>, std::vector<size_t>> SplitIndices(
    size_t n, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0, 1)");
  }
  if (n < 2) throw InvalidArgument("split needs at least 2 rows");
  const size_t first =
      static_cast<size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (first == 0 || first >= n) {
    throw InvalidArgument("split fraction leaves an empty part");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  for (size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  std::vector<size_t> a(order.begin(), order.begin() + first);
  std::vector<size_t> b(order.begin() + first, order.end());
  return {std::move(a), std::move(b)};
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset, double fraction,
                                  uint64_t seed) {
  auto [a, b] = SplitIndices(dataset.rows(), fraction, seed);
  return {dataset.Select(a), dataset.Select(b)};
}

}  // namespace ffpdg
