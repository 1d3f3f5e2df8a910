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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmpr {

enum class ErrorCode {
  IndexOutOfRange,
  SelfPair,
  ConflictingPair,
  SchemaMismatch,
  InvariantViolation,
  DimensionMismatch,
  EmptyInput,
  NotFinite,
  DegenerateNormalizer,
  EmptyClass,
  EmptyCluster,
  NoConvergence,
  KTooLarge,
  ClassTooSmall,
  ExhaustedPairs,
  LengthMismatch,
  ParseError,
  RaggedRows,
  NonNumericFeature,
  InvalidConfig,
  Io,
};

/// Stable identifier used in CLI error lines, e.g. "SelfPair".
std::string_view error_code_name(ErrorCode code) noexcept;

/// Single exception type for the library. `index()` carries the offending class, cluster, line or pair index when
/// one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<long long> index = std::nullopt)
      : std::runtime_error(message), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<long long> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<long long> index_;
};

}  // namespace gmpr
