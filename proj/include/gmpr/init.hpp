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

// k-means++ seeding, nearest-mean initialization and relation simulation from ground truth.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmpr/model.hpp"
#include "gmpr/rng.hpp"

namespace gmpr {

/// Child streams of a trial seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kRelationStream = 2;

/// Indices of K k-means++ seeds in draw order. Once every remaining point coincides with a seed the rest are drawn
/// uniformly from the unchosen points. Throws KTooLarge when K > N, InvalidConfig when K < 1.
std::vector<Index> kmeanspp_indices(const Dataset& data, int K, RngStream& rng);
std::vector<Vector> kmeanspp_seeds(const Dataset& data, int K, RngStream& rng);

/// Nearest mean by Euclidean distance, ties to the lowest index.
std::vector<int> nearest_mean(const Dataset& data, const std::vector<Vector>& means);

/// Means as given, covariances from the nearest-mean partition (regularized, pooled covariance for a class with no
/// points), α uniform. `ridge_floor` is relative, as in FitConfig.
FlatModel init_flat_from_means(const Dataset& data, const std::vector<Vector>& means, double ridge_floor = 1e-6);

FlatModel init_flat(const Dataset& data, int classes, RngStream& rng, double ridge_floor = 1e-6);

/// Classes with fewer points than clusters get copies of the class mean jittered by N(0, ridge_floor·I); their
/// indices are appended to `small_classes` when given.
HierModel init_hier(const Dataset& data, int classes, const std::vector<int>& clusters_per_class, RngStream& rng,
                    double ridge_floor = 1e-6, std::vector<int>* small_classes = nullptr);

/// init_hier with the class-level seeds given; only the within-class seeding draws from `rng`.
HierModel init_hier_from_means(const Dataset& data, const std::vector<Vector>& class_means,
                               const std::vector<int>& clusters_per_class, RngStream& rng, double ridge_floor = 1e-6,
                               std::vector<int>* small_classes = nullptr);

enum class RelationMode { Both, MustOnly, CannotOnly };

std::string relation_mode_name(RelationMode mode);
/// Accepts "both", "must", "must-only", "cannot", "cannot-only". Throws InvalidConfig.
RelationMode parse_relation_mode(const std::string& s);

/// Uniform unordered pairs of distinct points without replacement, routed by label. In the single-kind modes draws
/// of the other kind are rejected. For the same stream, a smaller budget yields a subset of a larger one while both
/// are at most half the qualifying pairs (denser budgets shuffle the full pair list). Throws ExhaustedPairs.
RelationSet sample_relations(const std::vector<int>& labels, long long n_pairs, RngStream& rng,
                             RelationMode mode = RelationMode::Both);

}  // namespace gmpr
