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

// Labeled toy datasets.

#pragma once

#include <cstdint>
#include <string>

#include "gmpr/model.hpp"
#include "gmpr/rng.hpp"

namespace gmpr {

enum class SyntheticKind { TwoCluster, TwoMoons };

/// Accepts "two-cluster" and "two-moons". Throws InvalidConfig.
SyntheticKind parse_synthetic_kind(const std::string& s);

/// two-cluster: x ~ U(−1, 1) + N(0, 1), y ~ N(±2.6·noise, noise²); label 0 on top. Each class is a flat horizontal band, so a
/// vertical split at x = 0 is also a good two-Gaussian fit.
/// two-moons: upper half circle (cos t, sin t) and lower (1 − cos t, 0.5 − sin t) for t uniform on [0, π], plus
/// N(0, noise²·I).
/// Rows alternate class 0 / class 1. Throws InvalidConfig when n_per_class < 1 or noise < 0 (or noise = 0 for
/// two-cluster).
Dataset gen_synthetic(SyntheticKind kind, int n_per_class, double noise, std::uint64_t seed);

/// Pairs that contradict the x = 0 split: must-links within a class across x = 0 and cannot-links across classes on
/// the same side. Both endpoints satisfy |x| ≥ min_abs_x. Throws ExhaustedPairs.
RelationSet sample_crossing_relations(const Dataset& data, int n_must, int n_cannot, RngStream& rng,
                                      double min_abs_x = 0.0);

}  // namespace gmpr
