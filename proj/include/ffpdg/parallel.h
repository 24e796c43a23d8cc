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

#ifndef FFPDG_PARALLEL_H_
#define FFPDG_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ffpdg {

// Worker count: FFPDG_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int ThreadCount();

// Calls fn(i) for i in [0, count) on up to ThreadCount() threads. Callers
// write results into per-index slots, so reductions stay in index order. The
// first exception (lowest index) is rethrown after all tasks finish.
void ParallelFor(size_t count, const std::function<void(size_t)>& fn);

}  // namespace ffpdg

#endif  // FFPDG_PARALLEL_H_
