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

#include "gmpr/em_hier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmpr/error.hpp"
#include "gmpr/init.hpp"
#include "gmpr/mixing.hpp"
#include "em_internal.hpp"
#include "parallel.hpp"

namespace gmpr {

namespace {

int max_clusters(const HierModel& model) {
  int k = 0;
  for (int m = 0; m < model.classes(); ++m) k = std::max(k, model.clusters_in(m));
  return k;
}

// vals[k] = log π_mk + log N_mk(x); returns log p(x | m) and writes r_mk into `r`.
double class_mixture(const Vector& pi, const double* vals, Index stride, double* r, Index rstride) {
  const Eigen::Index K = pi.size();
  double buf_small[8];
  std::vector<double> buf_big;
  double* buf = buf_small;
  if (K > 8) {
    buf_big.resize(static_cast<std::size_t>(K));
    buf = buf_big.data();
  }
  for (Eigen::Index k = 0; k < K; ++k) buf[k] = (pi[k] > 0.0 ? std::log(pi[k]) : -std::numeric_limits<double>::infinity()) + vals[k * stride];
  const double lc = log_sum_exp(std::span<const double>(buf, static_cast<std::size_t>(K)));
  for (Eigen::Index k = 0; k < K; ++k) r[k * rstride] = std::isfinite(lc) ? std::exp(buf[k] - lc) : pi[k];
  return lc;
}

Matrix expand(const HierModel& model, const Vector& class_post, const Matrix& within) {
  Matrix out = Matrix::Zero(model.classes(), within.cols());
  for (int m = 0; m < model.classes(); ++m)
    for (int k = 0; k < model.clusters_in(m); ++k) out(m, k) = class_post[m] * within(m, k);
  return out;
}

}  // namespace

ClassMixtureEval class_mixture_eval(const HierModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension != model dimension");
  ClassMixtureEval out;
  out.loglik.resize(model.classes());
  out.within = Matrix::Zero(model.classes(), max_clusters(model));
  for (int m = 0; m < model.classes(); ++m) {
    const int K = model.clusters_in(m);
    std::vector<double> vals(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) vals[static_cast<std::size_t>(k)] = log_density(model.clusters()[model.cluster_index(m, k)], x);
    out.loglik[m] = class_mixture(model.sub(m).pi, vals.data(), 1, out.within.row(m).data(), out.within.rows());
  }
  return out;
}

HierPointPosterior hier_resp_unsupervised(const HierModel& model, const Eigen::Ref<const Vector>& x) {
  const auto e = class_mixture_eval(model, x);
  HierPointPosterior out;
  out.marginal = posterior_unsupervised(detail::log_of(model.alpha()), e.loglik);
  out.joint = expand(model, out.marginal, e.within);
  return out;
}

HierMustLinkPosterior hier_resp_mustlink(const HierModel& model, const Eigen::Ref<const Vector>& x_i,
                                         const Eigen::Ref<const Vector>& x_j) {
  const auto ei = class_mixture_eval(model, x_i);
  const auto ej = class_mixture_eval(model, x_j);
  HierMustLinkPosterior out;
  out.marginal = posterior_mustlink(detail::log_of(model.alpha()), ei.loglik, ej.loglik);
  out.joint_i = expand(model, out.marginal, ei.within);
  out.joint_j = expand(model, out.marginal, ej.within);
  return out;
}

HierCannotLinkPosterior hier_resp_cannotlink(const HierModel& model, const Eigen::Ref<const Vector>& x_a,
                                             const Eigen::Ref<const Vector>& x_b) {
  const auto prior = cannotlink_prior(model.alpha());
  const auto ea = class_mixture_eval(model, x_a);
  const auto eb = class_mixture_eval(model, x_b);
  auto cl = posterior_cannotlink(prior, ea.loglik, eb.loglik);
  HierCannotLinkPosterior out;
  out.joint_a = expand(model, cl.a, ea.within);
  out.joint_b = expand(model, cl.b, eb.within);
  out.marginal_a = std::move(cl.a);
  out.marginal_b = std::move(cl.b);
  out.class_joint = std::move(cl.joint);
  return out;
}

void class_mixture_tables(const HierModel& model, const Dataset& data, Matrix& loglik, Matrix& within, int threads) {
  if (data.d() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "dataset dimension != model dimension");
  const Index n = data.n();
  const int total = model.total_clusters();
  Matrix dens(n, total);
  detail::parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t c) {
    auto col = dens.col(static_cast<Eigen::Index>(c));
    log_density_batch(model.clusters()[c], data.columns(), std::span<double>(col.data(), static_cast<std::size_t>(n)));
  });
  loglik.resize(n, model.classes());
  within.resize(n, total);
  detail::parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (int m = 0; m < model.classes(); ++m) {
      const int c0 = model.cluster_index(m, 0);
      loglik(row, m) = class_mixture(model.sub(m).pi, dens.data() + c0 * n + row, n, within.data() + c0 * n + row, n);
    }
  });
}

HierEStep hier_e_step(const HierModel& model, const Dataset& data, const RelationSet& rel, const FitConfig& config) {
  Matrix lc, within;
  class_mixture_tables(model, data, lc, within, config.threads);
  const auto unsup = unsupervised_points(data.n(), rel, config.relation_points_in_unsupervised);
  HierEStep out;
  EStep es;
  if (rel.cannot.empty()) {
    es = e_step_from_loglik(model.alpha(), lc, rel, unsup, nullptr, config.threads);
  } else {
    const CannotLinkPrior prior = cannotlink_prior(model.alpha());
    es = e_step_from_loglik(model.alpha(), lc, rel, unsup, &prior, config.threads);
  }
  out.resp.classes = std::move(es.resp);
  out.resp.within = std::move(within);
  out.log_likelihood = es.log_likelihood;
  return out;
}

Matrix hier_point_weights(const HierModel& model, Index n, const RelationSet& rel, const HierResponsibilities& resp) {
  const Matrix w = point_weights(n, rel, resp.classes);
  if (w.cols() != model.classes() || resp.within.cols() != model.total_clusters() || resp.within.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "responsibilities do not match the model");
  Matrix out(n, model.total_clusters());
  for (int m = 0; m < model.classes(); ++m)
    for (int k = 0; k < model.clusters_in(m); ++k) {
      const int c = model.cluster_index(m, k);
      out.col(c) = w.col(m).cwiseProduct(resp.within.col(c));
    }
  return out;
}

namespace {

std::vector<SubMixture> assemble(const HierModel& model, const Matrix& wc, detail::MStepMoments& mm) {
  std::vector<char> empty(static_cast<std::size_t>(model.total_clusters()), 0);
  for (int c : mm.empty) empty[static_cast<std::size_t>(c)] = 1;
  std::vector<SubMixture> subs(static_cast<std::size_t>(model.classes()));
  for (int m = 0; m < model.classes(); ++m) {
    const int K = model.clusters_in(m);
    SubMixture& s = subs[static_cast<std::size_t>(m)];
    s.pi.resize(K);
    for (int k = 0; k < K; ++k) {
      const int c = model.cluster_index(m, k);
      const double z = wc.col(c).sum();
      s.pi[k] = empty[static_cast<std::size_t>(c)] ? std::max(z, 1.0) : z;
      s.means.push_back(std::move(mm.means[static_cast<std::size_t>(c)]));
      s.covs.push_back(std::move(mm.covs[static_cast<std::size_t>(c)]));
    }
    s.pi /= s.pi.sum();
  }
  return subs;
}

}  // namespace

std::vector<SubMixture> hier_update(const HierModel& model, const Dataset& data, const RelationSet& rel,
                                    const HierResponsibilities& resp, double ridge_floor) {
  const Matrix wc = hier_point_weights(model, data.n(), rel, resp);
  auto mm = detail::flat_moments(data, wc, absolute_ridge(data, ridge_floor), false, ErrorCode::EmptyCluster);
  return assemble(model, wc, mm);
}

double hier_log_likelihood(const HierModel& model, const Dataset& data, const RelationSet& rel,
                           bool relation_points_in_unsupervised) {
  if (model.classes() == 1 && !rel.cannot.empty())
    throw Error(ErrorCode::DegenerateNormalizer, "cannot-links need at least two classes");
  FitConfig c;
  c.relation_points_in_unsupervised = relation_points_in_unsupervised;
  return hier_e_step(model, data, rel, c).log_likelihood;
}

FitResult<HierModel> fit_hier(const Dataset& data, const RelationSet& rel, const HierModel& init,
                              const FitConfig& config, const HierObserver& observer) {
  detail::check_fit_inputs(data, rel, init.classes(), init.dim(), config);
  const double ridge = absolute_ridge(data, config.ridge_floor);
  const auto n_cannot = static_cast<double>(rel.cannot.size());

  FitResult<HierModel> res{init, {}};
  FitTrace& tr = res.trace;
  HierEStep es = hier_e_step(res.model, data, rel, config);
  tr.log_likelihood.push_back(es.log_likelihood);

  for (int it = 1; it <= config.max_iters; ++it) {
    const Matrix wc = hier_point_weights(res.model, data.n(), rel, es.resp);
    auto mm = detail::flat_moments(data, wc, ridge, true, ErrorCode::EmptyCluster);
    detail::keep_better_components(data, wc, res.model.clusters(), mm);
    Vector counts = mixing_counts(es.resp.classes);
    for (int c : mm.empty) {
      int m = 0;
      while (m + 1 < res.model.classes() && res.model.cluster_index(m + 1, 0) <= c) ++m;
      counts[m] = std::max(counts[m], 1.0);
      tr.warnings.push_back("iteration " + std::to_string(it) + ": cluster " + std::to_string(c) + " of class " +
                            std::to_string(m) + " was empty and has been reinitialized");
    }
    if (!mm.empty.empty()) tr.recovery_iterations.push_back(it);
    auto subs = assemble(res.model, wc, mm);
    const MixingResult mix = optimize_mixing(counts, n_cannot, res.model.alpha(), config.mixing_iters);
    tr.mixing_steps.push_back(mix.newton_steps);
    res.model = HierModel(mix.alpha, std::move(subs));
    if (observer) observer(it, res.model);

    es = hier_e_step(res.model, data, rel, config);
    const double prev = tr.log_likelihood.back();
    tr.log_likelihood.push_back(es.log_likelihood);
    tr.iterations = it;
    if (mm.empty.empty() && detail::relative_change_below(prev, es.log_likelihood, config.tol)) {
      tr.converged = true;
      break;
    }
  }
  return res;
}

FitResult<HierModel> fit_hier(const Dataset& data, const RelationSet& rel, int classes,
                              const std::vector<int>& clusters_per_class, const FitConfig& config) {
  validate(config);
  int total = 0;
  for (int k : clusters_per_class) total += k;
  if (total > data.n()) throw Error(ErrorCode::KTooLarge, "more clusters than points");
  RngStream rng(derive_seed(config.seed, kInitStream));
  const HierModel init = init_hier(data, classes, clusters_per_class, rng, config.ridge_floor);
  return fit_hier(data, rel, init, config);
}

Matrix predict_hier(const HierModel& model, const Dataset& data) {
  Matrix lc, within;
  class_mixture_tables(model, data, lc, within);
  const Vector la = detail::log_of(model.alpha());
  Matrix out(lc.rows(), lc.cols());
  for (Eigen::Index i = 0; i < lc.rows(); ++i) out.row(i) = posterior_unsupervised(la, lc.row(i).transpose()).transpose();
  return out;
}

}  // namespace gmpr
