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

#include "mapfront/errors.hpp"

namespace mapfront {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegeneratePretrained: return "DegeneratePretrained";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyFront: return "EmptyFront";
    case ErrorKind::EmptyStore: return "EmptyStore";
    case ErrorKind::EmptyRecords: return "EmptyRecords";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::TooFewNodes: return "TooFewNodes";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NegativeCoordinate: return "NegativeCoordinate";
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace mapfront
