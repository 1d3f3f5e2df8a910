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

// EM for models whose classes are themselves Gaussian mixtures. The class-level relation structure is the one in
// em_flat.hpp with p(x | class m) = Σ_k π_mk N_mk(x). A must-link ties the class label of both members; their
// sub-cluster labels stay independent. With one cluster per class every quantity equals the flat one bit for bit.
//
// Per-point joint tables are M × K_max with K_max = max_m K_m; cells k ≥ K_m are zero.

#pragma once

#include <vector>

#include "gmpr/em_flat.hpp"

namespace gmpr {

/// Class log-likelihoods of one point, plus within-class posteriors r_mk = π_mk N_mk(x) / p(x | m).
struct ClassMixtureEval {
  Vector loglik;  ///< length M
  Matrix within;  ///< M × K_max, rows sum to 1
};

ClassMixtureEval class_mixture_eval(const HierModel& model, const Eigen::Ref<const Vector>& x);

struct HierPointPosterior {
  Matrix joint;    ///< p(z = m, y = k | x)
  Vector marginal; ///< p(z = m | x)
};

struct HierMustLinkPosterior {
  Matrix joint_i;  ///< p(z_ij = m, y_i = k | x_i, x_j)
  Matrix joint_j;
  Vector marginal; ///< p(z_ij = m | x_i, x_j), shared
};

struct HierCannotLinkPosterior {
  Matrix joint_a;  ///< p(z_a = m, y_a = k | x_a, x_b)
  Matrix joint_b;
  Vector marginal_a;
  Vector marginal_b;
  Matrix class_joint;  ///< p(z_a = m, z_b = m' | x_a, x_b), zero diagonal
};

HierPointPosterior hier_resp_unsupervised(const HierModel& model, const Eigen::Ref<const Vector>& x);
HierMustLinkPosterior hier_resp_mustlink(const HierModel& model, const Eigen::Ref<const Vector>& x_i,
                                         const Eigen::Ref<const Vector>& x_j);
/// Throws DegenerateNormalizer.
HierCannotLinkPosterior hier_resp_cannotlink(const HierModel& model, const Eigen::Ref<const Vector>& x_a,
                                             const Eigen::Ref<const Vector>& x_b);

struct HierResponsibilities {
  Responsibilities classes;  ///< class-level tables as in the flat model
  Matrix within;             ///< N × total_clusters, r_mk(x_n) at column cluster_index(m, k)
};

struct HierEStep {
  HierResponsibilities resp;
  double log_likelihood = 0.0;
};

/// N×M class log-likelihoods and N×total_clusters within-class posteriors.
void class_mixture_tables(const HierModel& model, const Dataset& data, Matrix& loglik, Matrix& within,
                          int threads = 1);

HierEStep hier_e_step(const HierModel& model, const Dataset& data, const RelationSet& rel,
                      const FitConfig& config = {});

/// N × total_clusters cluster weights: class-level point weight times the within-class posterior.
Matrix hier_point_weights(const HierModel& model, Index n, const RelationSet& rel, const HierResponsibilities& resp);

/// Cluster means, covariances and within-class π. Throws EmptyCluster (index = flat cluster index).
std::vector<SubMixture> hier_update(const HierModel& model, const Dataset& data, const RelationSet& rel,
                                    const HierResponsibilities& resp, double ridge_floor = 1e-6);

double hier_log_likelihood(const HierModel& model, const Dataset& data, const RelationSet& rel,
                           bool relation_points_in_unsupervised = false);

using HierObserver = std::function<void(int iteration, const HierModel& model)>;

FitResult<HierModel> fit_hier(const Dataset& data, const RelationSet& rel, const HierModel& init,
                              const FitConfig& config, const HierObserver& observer = {});

/// k-means++ based init (init_hier) seeded with config.seed.
FitResult<HierModel> fit_hier(const Dataset& data, const RelationSet& rel, int classes,
                              const std::vector<int>& clusters_per_class, const FitConfig& config);

/// N×M class marginals p(z = m | x).
Matrix predict_hier(const HierModel& model, const Dataset& data);

}  // namespace gmpr
