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

// Discretization of a dataset into fixed-length binary codes, and the
// dictionary that maps codes back to the original rows that produced them.

#ifndef FFPDG_BINARIZE_H_
#define FFPDG_BINARIZE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ffpdg/dataset.h"
#include "ffpdg/random.h"

namespace ffpdg {

struct BinaryCode {
  std::vector<uint8_t> bits;

  size_t size() const { return bits.size(); }
  // Lexicographic on bits, bit 0 most significant.
  auto operator<=>(const BinaryCode&) const = default;
  bool operator==(const BinaryCode&) const = default;
};

std::string ToString(const BinaryCode& code);
size_t HammingDistance(const BinaryCode& a, const BinaryCode& b);

// Bits owned by one source column.
struct ColumnBits {
  size_t column = 0;
  ColumnKind kind = ColumnKind::kBinary;
  size_t first_bit = 0;
  size_t bit_count = 0;
  // Continuous only: bit j is set iff value >= thresholds[j].
  std::vector<double> thresholds;
};

class CodeBook {
 public:
  CodeBook(Dataset source, std::vector<ColumnBits> layout);

  const Schema& schema() const { return source_.schema(); }
  const Dataset& source() const { return source_; }
  size_t code_length() const { return code_length_; }
  const std::vector<ColumnBits>& layout() const { return layout_; }
  // Code -> indices into source() of every row with that code.
  const std::map<BinaryCode, std::vector<size_t>>& entries() const {
    return entries_;
  }
  // First bit of a binary column.
  size_t BitOf(size_t column) const;

  BinaryCode Encode(std::span<const double> row) const;

 private:
  Dataset source_;
  std::vector<ColumnBits> layout_;
  size_t code_length_ = 0;
  std::map<BinaryCode, std::vector<size_t>> entries_;
};

struct BinaryTable {
  size_t code_length = 0;
  std::vector<BinaryCode> codes;
};

struct Binarized {
  BinaryTable table;
  CodeBook codebook;
};

// Continuous columns get `bins_per_continuous` bits. Threshold j is the
// smallest observed value strictly above the nearest-rank (j+1)/(bins+1)
// quantile (+inf when none exists), so the column minimum always encodes to
// zeros. Binary columns get one bit, categorical columns one-hot bits.
Binarized BuildCodebook(const Dataset& dataset, int bins_per_continuous);

BinaryCode EncodeRow(std::span<const double> row, const CodeBook& codebook);

// Maps a code back to an original-space row. A stored code returns one of its
// rows uniformly at random. An absent code uses the stored key at minimum
// Hamming distance (ties go to the lexicographically smallest key).
std::vector<double> InverseMap(const BinaryCode& code,
                               const CodeBook& codebook, Rng& rng);
std::vector<double> InverseMap(const BinaryCode& code,
                               const CodeBook& codebook, uint64_t seed);

// Key used by InverseMap for `code`.
const BinaryCode& NearestKey(const BinaryCode& code, const CodeBook& codebook);

// Maps a batch of codes to a Dataset with the codebook's schema.
Dataset InverseMapAll(std::span<const BinaryCode> codes,
                      const CodeBook& codebook, uint64_t seed);

// Text audit of the layout and per-code row counts.
std::string DescribeCodeBook(const CodeBook& codebook);

}  // namespace ffpdg

#endif  // FFPDG_BINARIZE_H_
