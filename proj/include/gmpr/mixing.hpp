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

// Class-weight update of the M-step.
//
// With expected class counts c_m (unsupervised posteriors, must-link pair posteriors counted once per pair and both
// cannot-link member posteriors) and |C| cannot-link pairs, the part of the expected complete-data log-likelihood
// that depends on α is
//
//     f(α) = Σ_m c_m log α_m − |C| log(1 − Σ_m α_m²)
//
// because every cannot-link pair contributes α_m α_m' / (1 − Σ α²) to its class-pair prior. f is maximized over the
// simplex. Without cannot-links the maximizer is c/Σc. Otherwise we start from c/Σc (the maximizer with the
// normalizer dropped) and run projected Newton on {α ≥ kMixingFloor, Σα = 1} with an active set, eigenvalue-
// modified reduced Hessian and Armijo backtracking. The floor keeps 1 − Σα² away from zero; when f increases without
// bound toward a vertex the solution sits on the floor.

#pragma once

#include "gmpr/gaussian.hpp"

namespace gmpr {

inline constexpr double kMixingFloor = 1e-10;
inline constexpr double kMixingKktTol = 1e-8;

double mixing_objective(const Vector& counts, double n_cannot, const Vector& alpha);
Vector mixing_gradient(const Vector& counts, double n_cannot, const Vector& alpha);
Matrix mixing_hessian(const Vector& counts, double n_cannot, const Vector& alpha);

/// KKT residual of f/Σc on {α ≥ floor, Σα = 1}: stationarity on free coordinates plus sign violations on bound ones,
/// divided by max(1, |λ|) for the multiplier λ. Optima a few floors away from a vertex have |∇f/Σc| ~ 1/floor.
double mixing_kkt_residual(const Vector& counts, double n_cannot, const Vector& alpha, double floor = kMixingFloor);

struct MixingResult {
  Vector alpha;
  int newton_steps = 0;
  double kkt_residual = 0.0;
};

/// Throws InvariantViolation on invalid counts, DegenerateNormalizer for M = 1 with cannot-links, NoConvergence after
/// 10·max_steps safeguarded steps. `alpha_init` (the previous weights) is used as a second start and the better of
/// the two results is returned, so f never decreases across EM iterations.
MixingResult optimize_mixing(const Vector& counts, double n_cannot, const Vector& alpha_init, int max_steps = 20);

/// Euclidean projection onto {α ≥ floor, Σα = 1}.
Vector project_capped_simplex(const Vector& v, double floor);

}  // namespace gmpr
