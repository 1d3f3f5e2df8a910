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

// Multivariate normal densities in Cholesky form and log-space reductions.

#pragma once

#include <span>

#include <Eigen/Dense>

namespace gmpr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// N(mean, L Lᵀ) with log|Σ| cached. Construction fails with InvariantViolation unless Σ is symmetric (1e-10,
/// relative to its largest entry) with strictly positive Cholesky pivots.
class CholeskyGaussian {
 public:
  CholeskyGaussian(Vector mean, const Matrix& cov);

  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  /// Lower-triangular factor, column-major, dense (upper part zero).
  const Matrix& chol() const noexcept { return chol_; }
  double log_det() const noexcept { return log_det_; }
  Matrix covariance() const { return chol_ * chol_.transpose(); }

 private:
  Vector mean_;
  Matrix chol_;
  double log_det_ = 0.0;
};

/// −d/2·log 2π − ½log|Σ| − ½‖L⁻¹(x−μ)‖². Throws DimensionMismatch.
double log_density(const CholeskyGaussian& g, const Eigen::Ref<const Vector>& x);

/// log Σ exp(v). −∞ entries are absorbed; all −∞ gives −∞. Throws EmptyInput.
double log_sum_exp(std::span<const double> v);

/// In-place: v ← v − logΣexp(v), then exponentiate. Returns the normalizer.
double normalize_log_weights(std::span<double> v);

/// Symmetrizes S and adds the smallest ridge εI, ε ∈ {0, floor, 10·floor, ...}, that makes Cholesky succeed with
/// every squared pivot at least floor/2.
/// Throws NotFinite if S has non-finite entries or no ridge up to 1e300 works.
Matrix regularize_covariance(const Matrix& S, double floor);

/// Default scale-aware floor: 1e-6 · trace(S)/d, or 1e-6 when the trace is not positive.
double default_ridge_floor(const Matrix& S);

/// Log-densities of N points stored column-major (N×d, one contiguous column per feature). Dispatches to the
/// active SIMD kernel.
void log_density_batch(const CholeskyGaussian& g, const Matrix& columns, std::span<double> out);

}  // namespace gmpr
