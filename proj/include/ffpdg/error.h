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

#ifndef FFPDG_ERROR_H_
#define FFPDG_ERROR_H_

#include <stdexcept>
#include <string>

namespace ffpdg {

// Domain or runtime failure. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input data or arguments (schema violations, parse failures, ...).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Solver did not reach its tolerance within the iteration budget.
class NotConverged : public Error {
 public:
  explicit NotConverged(const std::string& what) : Error(what) {}
};

}  // namespace ffpdg

#endif  // FFPDG_ERROR_H_
