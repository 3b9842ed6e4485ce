// Copyright (c) 2026 The S2AP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace s2ap {

enum class ErrorKind {
  kInvalidInput,
  kSingularFit,
  kOutOfBounds,
  kTrainingDiverged,
  kNotAchievable,
  kGeneration,
  kIo,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// what the CLI reports in its machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void check_input(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::kInvalidInput, message);
}

}  // namespace s2ap
