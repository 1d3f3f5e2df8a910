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

// Covariance PCA with 1/N normalization.

#pragma once

#include <string>

#include "gmpr/model.hpp"

namespace gmpr {

struct PcaTransform {
  Vector mean;
  Matrix components;  ///< k×d, orthonormal rows; largest-magnitude entry of each row is positive
  Vector eigenvalues; ///< nonincreasing, clipped at 0
};

/// Throws KTooLarge unless 1 ≤ k ≤ min(N, d).
PcaTransform fit_pca(const Dataset& data, int k);

/// (x − mean)·componentsᵀ. Throws DimensionMismatch.
RowMatrix apply_pca(const PcaTransform& t, const RowMatrix& points);

std::string serialize_pca(const PcaTransform& t);
/// Throws SchemaMismatch.
PcaTransform deserialize_pca(const std::string& doc);

}  // namespace gmpr
