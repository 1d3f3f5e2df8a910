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

// Portable random streams. The engine is std::mt19937_64, whose output sequence is fixed by the C++ standard; the
// distributions below are written out here because the standard library's are implementation-defined.

#pragma once

#include <cstdint>
#include <random>

namespace gmpr {

/// SplitMix64 of (seed, stream): decorrelated child seeds for trials and sub-tasks.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform integer in [0, n) by rejection, no modulo bias. n ≥ 1.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal, Marsaglia polar method (spare value cached).
  double normal();

  RngStream child(std::uint64_t stream) const { return RngStream(derive_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmpr
