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

#include "ffpdg/binarize.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ffpdg/error.h"

namespace ffpdg {

std::string ToString(const BinaryCode& code) {
  std::string s;
  s.reserve(code.bits.size());
  for (uint8_t b : code.bits) s.push_back(b ? '1' : '0');
  return s;
}

size_t HammingDistance(const BinaryCode& a, const BinaryCode& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("Hamming distance between codes of different length");
  }
  size_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += a.bits[i] != b.bits[i];
  return d;
}

CodeBook::CodeBook(Dataset source, std::vector<ColumnBits> layout)
    : source_(std::move(source)), layout_(std::move(layout)) {
  if (layout_.size() != source_.cols()) {
    throw InvalidArgument("code layout must cover every column");
  }
  size_t next = 0;
  for (size_t i = 0; i < layout_.size(); ++i) {
    const ColumnBits& lb = layout_[i];
    if (lb.column != i || lb.first_bit != next || lb.bit_count == 0) {
      throw InvalidArgument("code layout is not contiguous");
    }
    if (lb.kind == ColumnKind::kContinuous &&
        lb.thresholds.size() != lb.bit_count) {
      throw InvalidArgument("continuous layout needs one threshold per bit");
    }
    next += lb.bit_count;
  }
  code_length_ = next;
  for (size_t r = 0; r < source_.rows(); ++r) {
    entries_[Encode(source_.Row(r))].push_back(r);
  }
}

size_t CodeBook::BitOf(size_t column) const {
  if (column >= layout_.size() ||
      layout_[column].kind != ColumnKind::kBinary) {
    throw InvalidArgument("column " + std::to_string(column) +
                          " is not a binary column");
  }
  return layout_[column].first_bit;
}

BinaryCode CodeBook::Encode(std::span<const double> row) const {
  if (row.size() != layout_.size()) {
    throw InvalidArgument("row width " + std::to_string(row.size()) +
                          " does not match schema width " +
                          std::to_string(layout_.size()));
  }
  BinaryCode code;
  code.bits.assign(code_length_, 0);
  for (const ColumnBits& lb : layout_) {
    const ColumnSpec& spec = schema().column(lb.column);
    const double v = row[lb.column];
    if (!ValueFits(spec, v)) {
      throw InvalidArgument("value in column " + spec.name +
                            " does not fit the schema");
    }
    switch (lb.kind) {
      case ColumnKind::kBinary:
        code.bits[lb.first_bit] = v != 0.0;
        break;
      case ColumnKind::kCategorical:
        code.bits[lb.first_bit + static_cast<size_t>(v)] = 1;
        break;
      case ColumnKind::kContinuous:
        for (size_t j = 0; j < lb.bit_count; ++j) {
          code.bits[lb.first_bit + j] = v >= lb.thresholds[j];
        }
        break;
    }
  }
  return code;
}

Binarized BuildCodebook(const Dataset& dataset, int bins_per_continuous) {
  if (bins_per_continuous < 1) {
    throw InvalidArgument("bins_per_continuous must be >= 1");
  }
  const Schema& schema = dataset.schema();
  std::vector<ColumnBits> layout;
  size_t next = 0;
  for (size_t c = 0; c < schema.size(); ++c) {
    const ColumnSpec& spec = schema.column(c);
    ColumnBits lb;
    lb.column = c;
    lb.kind = spec.kind;
    lb.first_bit = next;
    switch (spec.kind) {
      case ColumnKind::kBinary:
        lb.bit_count = 1;
        break;
      case ColumnKind::kCategorical:
        lb.bit_count = spec.levels.size();
        break;
      case ColumnKind::kContinuous: {
        lb.bit_count = static_cast<size_t>(bins_per_continuous);
        std::vector<double> sorted = dataset.Column(c);
        std::sort(sorted.begin(), sorted.end());
        for (int j = 0; j < bins_per_continuous; ++j) {
          const double q = static_cast<double>(j + 1) /
                           static_cast<double>(bins_per_continuous + 1);
          const double cut = NearestRank(sorted, q);
          auto above = std::upper_bound(sorted.begin(), sorted.end(), cut);
          lb.thresholds.push_back(above == sorted.end()
                                      ? std::numeric_limits<double>::infinity()
                                      : *above);
        }
        break;
      }
    }
    next += lb.bit_count;
    layout.push_back(std::move(lb));
  }
  CodeBook codebook(dataset, std::move(layout));
  BinaryTable table;
  table.code_length = codebook.code_length();
  table.codes.reserve(dataset.rows());
  for (size_t r = 0; r < dataset.rows(); ++r) {
    table.codes.push_back(codebook.Encode(dataset.Row(r)));
  }
  return {std::move(table), std::move(codebook)};
}

BinaryCode EncodeRow(std::span<const double> row, const CodeBook& codebook) {
  return codebook.Encode(row);
}

const BinaryCode& NearestKey(const BinaryCode& code, const CodeBook& codebook) {
  const auto& entries = codebook.entries();
  if (entries.empty()) throw InvalidArgument("codebook is empty");
  if (code.size() != codebook.code_length()) {
    throw InvalidArgument("code length " + std::to_string(code.size()) +
                          " does not match codebook length " +
                          std::to_string(codebook.code_length()));
  }
  if (auto it = entries.find(code); it != entries.end()) return it->first;
  // Keys iterate in ascending order, so the first strict improvement wins
  // ties lexicographically.
  const BinaryCode* best = nullptr;
  size_t best_distance = std::numeric_limits<size_t>::max();
  for (const auto& [key, rows] : entries) {
    const size_t d = HammingDistance(code, key);
    if (d < best_distance) {
      best_distance = d;
      best = &key;
    }
  }
  return *best;
}

std::vector<double> InverseMap(const BinaryCode& code,
                               const CodeBook& codebook, Rng& rng) {
  const BinaryCode& key = NearestKey(code, codebook);
  const std::vector<size_t>& rows = codebook.entries().at(key);
  const size_t pick = rows[rng.UniformInt(rows.size())];
  const auto row = codebook.source().Row(pick);
  return {row.begin(), row.end()};
}

std::vector<double> InverseMap(const BinaryCode& code,
                               const CodeBook& codebook, uint64_t seed) {
  Rng rng(seed);
  return InverseMap(code, codebook, rng);
}

Dataset InverseMapAll(std::span<const BinaryCode> codes,
                      const CodeBook& codebook, uint64_t seed) {
  Rng rng(seed);
  std::map<BinaryCode, const BinaryCode*> nearest_cache;
  std::vector<double> values;
  values.reserve(codes.size() * codebook.schema().size());
  for (const BinaryCode& code : codes) {
    auto it = nearest_cache.find(code);
    if (it == nearest_cache.end()) {
      it = nearest_cache.emplace(code, &NearestKey(code, codebook)).first;
    }
    const std::vector<size_t>& rows = codebook.entries().at(*it->second);
    const auto row = codebook.source().Row(rows[rng.UniformInt(rows.size())]);
    values.insert(values.end(), row.begin(), row.end());
  }
  return Dataset(codebook.schema(), std::move(values));
}

std::string DescribeCodeBook(const CodeBook& codebook) {
  std::ostringstream out;
  out << "codebook code_length=" << codebook.code_length()
      << " entries=" << codebook.entries().size()
      << " rows=" << codebook.source().rows() << "\n";
  for (const ColumnBits& lb : codebook.layout()) {
    const ColumnSpec& spec = codebook.schema().column(lb.column);
    out << "layout column=" << spec.name << " kind=" << ToString(lb.kind)
        << " bits=" << lb.first_bit << ".." << lb.first_bit + lb.bit_count - 1;
    if (lb.kind == ColumnKind::kContinuous) {
      out << " thresholds=";
      for (size_t j = 0; j < lb.thresholds.size(); ++j) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", lb.thresholds[j]);
        out << (j ? "," : "") << buf;
      }
    } else if (lb.kind == ColumnKind::kCategorical) {
      out << " levels=";
      for (size_t j = 0; j < spec.levels.size(); ++j) {
        out << (j ? "|" : "") << spec.levels[j];
      }
    }
    out << "\n";
  }
  for (const auto& [key, rows] : codebook.entries()) {
    out << "entry " << ToString(key) << " rows=" << rows.size() << "\n";
  }
  return out.str();
}

}  // namespace ffpdg
