// Copyright 2026 The mapfront Authors. All Rights Reserved.
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
// =============================================================================

#ifndef MAPFRONT_ERRORS_HPP
#define MAPFRONT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mapfront {

enum class ErrorKind {
  LengthMismatch,
  DegeneratePretrained,
  ParseError,
  RangeViolation,
  InsufficientSamples,
  SingularDesign,
  EmptyInput,
  EmptyFront,
  EmptyStore,
  EmptyRecords,
  BudgetExceeded,
  TooFewNodes,
  ZeroVector,
  NegativeCoordinate,
  Validation,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace mapfront

#endif  // MAPFRONT_ERRORS_HPP
