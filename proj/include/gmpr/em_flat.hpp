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

// EM for mixtures with pairwise relations, one Gaussian per class.
//
// Points named by a relation are modeled only through that relation: a must-link pair (i, j) shares one class
// variable, a cannot-link pair (a, b) draws its two classes from the zero-diagonal prior α_m α_m' / (1 − Σα²).
// All remaining points are independent mixture samples. Setting `relation_points_in_unsupervised` also adds the
// relation endpoints to the independent term.
//
// The posterior functions taking per-class log-likelihood vectors do not assume a density family; the FlatModel
// overloads evaluate Gaussian class densities and call them.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gmpr/model.hpp"

namespace gmpr {

struct CannotLinkPrior {
  Matrix table;  ///< p(z_a = m, z_b = m'), zero diagonal.
  double norm = 0.0;  ///< 1 − Σ α².
};

/// Throws DegenerateNormalizer when M = 1 or 1 − Σα² ≤ 1e-12.
CannotLinkPrior cannotlink_prior(const Vector& alpha);

struct FitConfig {
  int max_iters = 500;
  double tol = 1e-8;  ///< relative change of the observed-data log-likelihood
  double ridge_floor = 1e-6;  ///< covariance ridge, relative to the pooled data variance trace(S)/d
  int mixing_iters = 20;
  std::uint64_t seed = 0;  ///< used only when the fit initializes itself
  bool relation_points_in_unsupervised = false;
  int threads = 1;
};

/// Throws InvalidConfig.
void validate(const FitConfig& config);

struct FitTrace {
  std::vector<double> log_likelihood;  ///< entry 0 is the initial model, entry t follows M-step t
  std::vector<int> mixing_steps;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
  std::vector<int> recovery_iterations;  ///< M-steps that reinitialized an empty class or cluster
};

template <class Model>
struct FitResult {
  Model model;
  FitTrace trace;
};

// Posteriors from per-class log-likelihoods.
Vector posterior_unsupervised(const Vector& log_alpha, const Vector& loglik);
Vector posterior_mustlink(const Vector& log_alpha, const Vector& loglik_i, const Vector& loglik_j);

struct CannotLinkPosterior {
  Vector a;  ///< d_a^m
  Vector b;  ///< d_b^m
  Matrix joint;  ///< p(z_a = m, z_b = m' | x_a, x_b), zero diagonal
};

CannotLinkPosterior posterior_cannotlink(const CannotLinkPrior& prior, const Vector& loglik_a,
                                         const Vector& loglik_b);

/// Per-class Gaussian log-densities of one point.
Vector class_log_densities(const FlatModel& model, const Eigen::Ref<const Vector>& x);

/// N×M table of class log-densities via the batch kernels.
Matrix class_log_density_table(const FlatModel& model, const Dataset& data, int threads = 1);

Vector resp_unsupervised(const FlatModel& model, const Eigen::Ref<const Vector>& x);
Vector resp_mustlink(const FlatModel& model, const Eigen::Ref<const Vector>& x_i, const Eigen::Ref<const Vector>& x_j);
CannotLinkPosterior resp_cannotlink(const FlatModel& model, const Eigen::Ref<const Vector>& x_a,
                                    const Eigen::Ref<const Vector>& x_b);

/// Indices of points in the independent term, ascending.
std::vector<Index> unsupervised_points(Index n, const RelationSet& rel, bool include_relation_points);

struct Responsibilities {
  std::vector<Index> unsup_points;
  Matrix unsup;     ///< |U|×M, ℓ_n^m
  Matrix must;      ///< |M|×M, s_ij^m
  Matrix cannot_a;  ///< |C|×M, d_a^m
  Matrix cannot_b;  ///< |C|×M, d_b^m
};

struct EStep {
  Responsibilities resp;
  double log_likelihood = 0.0;
};

/// Class-level E-step from an N×M table of per-class log-likelihoods, any density family. `prior` is required when
/// there are cannot-links.
EStep e_step_from_loglik(const Vector& alpha, const Matrix& loglik, const RelationSet& rel,
                         const std::vector<Index>& unsup_points, const CannotLinkPrior* prior, int threads = 1);

/// E-step and observed-data log-likelihood from one density table.
EStep e_step(const FlatModel& model, const Dataset& data, const RelationSet& rel, const FitConfig& config = {});

/// N×M per-point weights: ℓ for independent points, s for both members of a must-link pair, d_a / d_b for
/// cannot-link members, summed over every relation a point takes part in. Column sums are the normalizers Z_m.
Matrix point_weights(Index n, const RelationSet& rel, const Responsibilities& resp);

/// c_m = Σ ℓ^m + Σ_ML s^m + Σ_CL (d_a^m + d_b^m).
Vector mixing_counts(const Responsibilities& resp);

struct MeanCov {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
};

/// Closed-form mean and covariance update. Throws EmptyClass (index = class) when Z_m ≤ 1e-12.
MeanCov update_mean_cov(const Dataset& data, const RelationSet& rel, const Responsibilities& resp,
                        double ridge_floor = 1e-6);

/// Weighted mean/covariance of the dataset for one weight column; shared with the hierarchical M-step. Returns true
/// when the covariance needed a ridge.
bool weighted_moments(const Dataset& data, std::span<const double> w, double ridge_abs, Vector& mean, Matrix& cov);

/// Pooled biased covariance of all points.
Matrix pooled_covariance(const Dataset& data);

/// Absolute ridge floor: relative · trace(pooled)/d (1e-6 fallback scale for constant data).
double absolute_ridge(const Dataset& data, double relative);

/// Observed-data log-likelihood with every latent variable marginalized. Throws DegenerateNormalizer.
double log_likelihood(const FlatModel& model, const Dataset& data, const RelationSet& rel,
                      bool relation_points_in_unsupervised = false);

using FlatObserver = std::function<void(int iteration, const FlatModel& model)>;

/// EM from a given model. The observer sees the model after every M-step.
FitResult<FlatModel> fit_flat(const Dataset& data, const RelationSet& rel, const FlatModel& init,
                              const FitConfig& config, const FlatObserver& observer = {});

/// EM from k-means++ initialization seeded with config.seed. Throws KTooLarge when N < M.
FitResult<FlatModel> fit_flat(const Dataset& data, const RelationSet& rel, int classes, const FitConfig& config);

Vector predict_flat(const FlatModel& model, const Eigen::Ref<const Vector>& x);
/// N×M soft labels.
Matrix predict_flat(const FlatModel& model, const Dataset& data);

}  // namespace gmpr
