// Copyright 2026 The gmpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with
// the License. You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on
// an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

#include "gmpr/error.hpp"

namespace gmpr {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfPair: return "SelfPair";
    case ErrorCode::ConflictingPair: return "ConflictingPair";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NotFinite: return "NotFinite";
    case ErrorCode::DegenerateNormalizer: return "DegenerateNormalizer";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::ExhaustedPairs: return "ExhaustedPairs";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericFeature: return "NonNumericFeature";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gmpr
