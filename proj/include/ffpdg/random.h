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

#ifndef FFPDG_RANDOM_H_
#define FFPDG_RANDOM_H_

#include <cstdint>
#include <random>

namespace ffpdg {

// Seeded random stream with platform-independent derived distributions.
//
// std::uniform_real_distribution and std::normal_distribution are
// implementation-defined, so uniforms are built directly from the top 53 bits
// of mt19937_64 and normals use Box-Muller. Two streams built from the same
// (seed, stream) pair produce identical sequences on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Uniform integer in [0, n). n must be > 0.
  uint64_t UniformInt(uint64_t n);
  double Normal();

  // Independent sub-stream for a fixed index; does not advance this stream.
  Rng Fork(uint64_t index) const { return Rng(seed_, Mix(stream_, index)); }

  uint64_t seed() const { return seed_; }

 private:
  static uint64_t Mix(uint64_t a, uint64_t b);

  uint64_t seed_;
  uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 finalizer.
uint64_t SplitMix64(uint64_t x);

}  // namespace ffpdg

#endif  // FFPDG_RANDOM_H_
