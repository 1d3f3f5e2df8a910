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

#include <span>
#include <vector>

#include "gmpr/em_flat.hpp"
#include "gmpr/error.hpp"

namespace gmpr::detail {

Vector log_of(const Vector& v);
bool relative_change_below(double prev, double cur, double tol);
void check_fit_inputs(const Dataset& data, const RelationSet& rel, int classes, int dim, const FitConfig& config);

/// Row-normalized max of each weight row.
std::vector<double> max_responsibility(const Matrix& w);
/// Lowest entry not yet used; marks it used.
Index least_confident_point(const std::vector<double>& maxr, std::vector<char>& used);

struct MStepMoments {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  std::vector<int> empty;  ///< columns that were reinitialized
  std::vector<int> ridged;  ///< columns whose covariance needed a ridge
  std::vector<int> kept;  ///< ridged columns reverted to the previous parameters
};

/// Moments for every column of w. With recover = false an empty column throws `empty_code`.
MStepMoments flat_moments(const Dataset& data, const Matrix& w, double ridge_abs, bool recover,
                          ErrorCode empty_code = ErrorCode::EmptyClass);

/// Σ_i w_i log N(x_i; g).
double weighted_log_density(const Dataset& data, std::span<const double> w, const CholeskyGaussian& g);

/// A ridged covariance is not the maximizer of the weighted Gaussian term; revert such a column to `old` when the
/// proposal scores lower, so the update never decreases the expected complete-data objective.
void keep_better_components(const Dataset& data, const Matrix& w, const std::vector<CholeskyGaussian>& old,
                            MStepMoments& mm);

}  // namespace gmpr::detail
