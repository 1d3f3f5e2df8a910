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

#include "gmpr/em_flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmpr/error.hpp"
#include "gmpr/init.hpp"
#include "gmpr/kernels.hpp"
#include "gmpr/mixing.hpp"
#include "em_internal.hpp"
#include "parallel.hpp"

namespace gmpr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_length(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() == 0) throw Error(ErrorCode::DimensionMismatch, "log-likelihood length != M");
}

// Inputs are read as in[m * stride]; outputs are contiguous length M.
double shared_label(const Vector& log_alpha, const double* li, const double* lj, Index stride, double* out) {
  const Eigen::Index M = log_alpha.size();
  for (Eigen::Index m = 0; m < M; ++m) out[m] = log_alpha[m] + li[m * stride] + (lj ? lj[m * stride] : 0.0);
  return normalize_log_weights(std::span<double>(out, static_cast<std::size_t>(M)));
}

double cannot_pair(const Matrix& log_prior, const double* la, const double* lb, Index stride, double* da,
                   double* db, Matrix* joint_out) {
  const Eigen::Index M = log_prior.rows();
  Matrix lj(M, M);
  for (Eigen::Index q = 0; q < M; ++q)
    for (Eigen::Index m = 0; m < M; ++m)
      lj(m, q) = m == q ? kNegInf : log_prior(m, q) + la[m * stride] + lb[q * stride];
  const double z = normalize_log_weights(std::span<double>(lj.data(), static_cast<std::size_t>(M * M)));
  for (Eigen::Index m = 0; m < M; ++m) lj(m, m) = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    double ra = 0.0, rb = 0.0;
    for (Eigen::Index q = 0; q < M; ++q) {
      ra += lj(m, q);
      rb += lj(q, m);
    }
    da[m] = ra;
    db[m] = rb;
  }
  if (joint_out) *joint_out = std::move(lj);
  return z;
}

Matrix log_table(const CannotLinkPrior& prior) {
  const Eigen::Index M = prior.table.rows();
  Matrix out(M, M);
  for (Eigen::Index q = 0; q < M; ++q)
    for (Eigen::Index m = 0; m < M; ++m)
      out(m, q) = prior.table(m, q) > 0.0 ? std::log(prior.table(m, q)) : kNegInf;
  return out;
}

Matrix rows_to_table(const std::vector<double>& v, Eigen::Index rows, Eigen::Index M) {
  Matrix t(rows, M);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index m = 0; m < M; ++m) t(i, m) = v[static_cast<std::size_t>(i * M + m)];
  return t;
}

}  // namespace

namespace detail {

Vector log_of(const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index m = 0; m < v.size(); ++m) out[m] = v[m] > 0.0 ? std::log(v[m]) : kNegInf;
  return out;
}

bool relative_change_below(double prev, double cur, double tol) {
  return std::abs(cur - prev) <= tol * std::max(1.0, std::abs(prev));
}

void check_fit_inputs(const Dataset& data, const RelationSet& rel, int classes, int dim, const FitConfig& config) {
  validate(config);
  if (dim != data.d()) throw Error(ErrorCode::DimensionMismatch, "dataset dimension != model dimension");
  if (classes == 1 && !rel.cannot.empty())
    throw Error(ErrorCode::DegenerateNormalizer, "cannot-links need at least two classes");
  if (rel != validate_relations(rel, data.n()))
    throw Error(ErrorCode::InvariantViolation, "relation set is not validated");
}

std::vector<double> max_responsibility(const Matrix& w) {
  std::vector<double> out(static_cast<std::size_t>(w.rows()), 0.0);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double s = w.row(i).sum();
    out[static_cast<std::size_t>(i)] = s > 0.0 ? w.row(i).maxCoeff() / s : 0.0;
  }
  return out;
}

Index least_confident_point(const std::vector<double>& maxr, std::vector<char>& used) {
  Index best = -1;
  for (std::size_t i = 0; i < maxr.size(); ++i) {
    if (used[i]) continue;
    if (best < 0 || maxr[i] < maxr[static_cast<std::size_t>(best)]) best = static_cast<Index>(i);
  }
  if (best < 0) best = 0;
  used[static_cast<std::size_t>(best)] = 1;
  return best;
}

}  // namespace detail

CannotLinkPrior cannotlink_prior(const Vector& alpha) {
  const Eigen::Index M = alpha.size();
  if (M < 2) throw Error(ErrorCode::DegenerateNormalizer, "cannot-link prior needs at least two classes");
  if (!on_simplex(alpha)) throw Error(ErrorCode::InvariantViolation, "alpha is not on the simplex");
  const double norm = 1.0 - alpha.squaredNorm();
  if (!(norm > 1e-12)) throw Error(ErrorCode::DegenerateNormalizer, "1 - sum(alpha^2) is not positive");
  CannotLinkPrior p;
  p.norm = norm;
  p.table = (alpha * alpha.transpose()) / norm;
  p.table.diagonal().setZero();
  return p;
}

void validate(const FitConfig& c) {
  if (c.max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");
  if (!(c.tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "tol must be > 0");
  if (!(c.ridge_floor > 0.0) || !std::isfinite(c.ridge_floor))
    throw Error(ErrorCode::InvalidConfig, "ridge_floor must be > 0");
  if (c.mixing_iters < 1) throw Error(ErrorCode::InvalidConfig, "mixing_iters must be >= 1");
  if (c.threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
}

Vector posterior_unsupervised(const Vector& log_alpha, const Vector& loglik) {
  check_length(log_alpha, loglik);
  Vector out(log_alpha.size());
  shared_label(log_alpha, loglik.data(), nullptr, 1, out.data());
  return out;
}

Vector posterior_mustlink(const Vector& log_alpha, const Vector& loglik_i, const Vector& loglik_j) {
  check_length(log_alpha, loglik_i);
  check_length(log_alpha, loglik_j);
  Vector out(log_alpha.size());
  shared_label(log_alpha, loglik_i.data(), loglik_j.data(), 1, out.data());
  return out;
}

CannotLinkPosterior posterior_cannotlink(const CannotLinkPrior& prior, const Vector& loglik_a,
                                         const Vector& loglik_b) {
  const Eigen::Index M = prior.table.rows();
  if (loglik_a.size() != M || loglik_b.size() != M)
    throw Error(ErrorCode::DimensionMismatch, "log-likelihood length != M");
  CannotLinkPosterior out;
  out.a.resize(M);
  out.b.resize(M);
  cannot_pair(log_table(prior), loglik_a.data(), loglik_b.data(), 1, out.a.data(), out.b.data(), &out.joint);
  return out;
}

Vector class_log_densities(const FlatModel& model, const Eigen::Ref<const Vector>& x) {
  Vector out(model.classes());
  for (int m = 0; m < model.classes(); ++m) out[m] = log_density(model.components()[m], x);
  return out;
}

Matrix class_log_density_table(const FlatModel& model, const Dataset& data, int threads) {
  if (data.d() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "dataset dimension != model dimension");
  Matrix out(data.n(), model.classes());
  detail::parallel_for(static_cast<std::size_t>(model.classes()), threads, [&](std::size_t m) {
    auto col = out.col(static_cast<Eigen::Index>(m));
    log_density_batch(model.components()[m], data.columns(),
                      std::span<double>(col.data(), static_cast<std::size_t>(data.n())));
  });
  return out;
}

Vector resp_unsupervised(const FlatModel& model, const Eigen::Ref<const Vector>& x) {
  return posterior_unsupervised(detail::log_of(model.alpha()), class_log_densities(model, x));
}

Vector resp_mustlink(const FlatModel& model, const Eigen::Ref<const Vector>& x_i, const Eigen::Ref<const Vector>& x_j) {
  return posterior_mustlink(detail::log_of(model.alpha()), class_log_densities(model, x_i),
                            class_log_densities(model, x_j));
}

CannotLinkPosterior resp_cannotlink(const FlatModel& model, const Eigen::Ref<const Vector>& x_a,
                                    const Eigen::Ref<const Vector>& x_b) {
  return posterior_cannotlink(cannotlink_prior(model.alpha()), class_log_densities(model, x_a),
                              class_log_densities(model, x_b));
}

std::vector<Index> unsupervised_points(Index n, const RelationSet& rel, bool include_relation_points) {
  std::vector<char> in_rel(static_cast<std::size_t>(n), 0);
  for (const auto* set : {&rel.must, &rel.cannot})
    for (const Pair& p : *set) {
      if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n)
        throw Error(ErrorCode::IndexOutOfRange, "relation index out of range");
      if (!include_relation_points) {
        in_rel[static_cast<std::size_t>(p.first)] = 1;
        in_rel[static_cast<std::size_t>(p.second)] = 1;
      }
    }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (!in_rel[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

EStep e_step_from_loglik(const Vector& alpha, const Matrix& loglik, const RelationSet& rel,
                         const std::vector<Index>& unsup_points, const CannotLinkPrior* prior, int threads) {
  const Eigen::Index M = alpha.size();
  if (loglik.cols() != M) throw Error(ErrorCode::DimensionMismatch, "log-likelihood table has wrong class count");
  if (!rel.cannot.empty() && !prior)
    throw Error(ErrorCode::DegenerateNormalizer, "cannot-links present but no cannot-link prior");
  const Vector la = detail::log_of(alpha);
  const Index stride = loglik.rows();
  const double* base = loglik.data();

  const auto nu = static_cast<std::size_t>(unsup_points.size());
  const auto nm = rel.must.size();
  const auto nc = rel.cannot.size();
  const auto uM = static_cast<std::size_t>(M);
  std::vector<double> us(nu * uM), ms(nm * uM), ca(nc * uM), cb(nc * uM);
  std::vector<double> lu(nu), lm(nm), lc(nc);

  detail::parallel_for(nu, threads, [&](std::size_t t) {
    lu[t] = shared_label(la, base + unsup_points[t], nullptr, stride, &us[t * uM]);
  });
  detail::parallel_for(nm, threads, [&](std::size_t t) {
    const Pair& p = rel.must[t];
    lm[t] = shared_label(la, base + p.first, base + p.second, stride, &ms[t * uM]);
  });
  if (nc > 0) {
    const Matrix lp = log_table(*prior);
    detail::parallel_for(nc, threads, [&](std::size_t t) {
      const Pair& p = rel.cannot[t];
      lc[t] = cannot_pair(lp, base + p.first, base + p.second, stride, &ca[t * uM], &cb[t * uM], nullptr);
    });
  }

  EStep out;
  Responsibilities& r = out.resp;
  r.unsup_points = unsup_points;
  r.unsup = rows_to_table(us, static_cast<Eigen::Index>(nu), M);
  r.must = rows_to_table(ms, static_cast<Eigen::Index>(nm), M);
  r.cannot_a = rows_to_table(ca, static_cast<Eigen::Index>(nc), M);
  r.cannot_b = rows_to_table(cb, static_cast<Eigen::Index>(nc), M);

  double ll = 0.0;
  for (double v : lu) ll += v;
  for (double v : lm) ll += v;
  for (double v : lc) ll += v;
  if (!std::isfinite(ll)) throw Error(ErrorCode::NotFinite, "log-likelihood is not finite");
  out.log_likelihood = ll;
  return out;
}

EStep e_step(const FlatModel& model, const Dataset& data, const RelationSet& rel, const FitConfig& config) {
  const Matrix table = class_log_density_table(model, data, config.threads);
  const auto unsup = unsupervised_points(data.n(), rel, config.relation_points_in_unsupervised);
  if (rel.cannot.empty()) return e_step_from_loglik(model.alpha(), table, rel, unsup, nullptr, config.threads);
  const CannotLinkPrior prior = cannotlink_prior(model.alpha());
  return e_step_from_loglik(model.alpha(), table, rel, unsup, &prior, config.threads);
}

Matrix point_weights(Index n, const RelationSet& rel, const Responsibilities& resp) {
  const Eigen::Index M = std::max({resp.unsup.cols(), resp.must.cols(), resp.cannot_a.cols()});
  if (static_cast<std::size_t>(resp.unsup.rows()) != resp.unsup_points.size() ||
      resp.must.rows() != static_cast<Eigen::Index>(rel.must.size()) ||
      resp.cannot_a.rows() != static_cast<Eigen::Index>(rel.cannot.size()) ||
      resp.cannot_b.rows() != resp.cannot_a.rows())
    throw Error(ErrorCode::DimensionMismatch, "responsibilities do not match relations");
  Matrix w = Matrix::Zero(n, M);
  for (std::size_t t = 0; t < resp.unsup_points.size(); ++t)
    w.row(resp.unsup_points[t]) += resp.unsup.row(static_cast<Eigen::Index>(t));
  for (std::size_t t = 0; t < rel.must.size(); ++t) {
    const auto row = resp.must.row(static_cast<Eigen::Index>(t));
    w.row(rel.must[t].first) += row;
    w.row(rel.must[t].second) += row;
  }
  for (std::size_t t = 0; t < rel.cannot.size(); ++t) {
    w.row(rel.cannot[t].first) += resp.cannot_a.row(static_cast<Eigen::Index>(t));
    w.row(rel.cannot[t].second) += resp.cannot_b.row(static_cast<Eigen::Index>(t));
  }
  return w;
}

Vector mixing_counts(const Responsibilities& resp) {
  const Eigen::Index M = std::max({resp.unsup.cols(), resp.must.cols(), resp.cannot_a.cols()});
  Vector c = Vector::Zero(M);
  auto add = [&](const Matrix& t) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) c += t.row(i).transpose();
  };
  add(resp.unsup);
  add(resp.must);
  add(resp.cannot_a);
  add(resp.cannot_b);
  return c;
}

bool weighted_moments(const Dataset& data, std::span<const double> w, double ridge_abs, Vector& mean, Matrix& cov) {
  const auto n = static_cast<std::size_t>(data.n());
  const int d = data.d();
  if (w.size() != n) throw Error(ErrorCode::LengthMismatch, "weight length != N");
  double z = 0.0;
  for (double v : w) z += v;
  const auto& k = kernels::active();
  mean.resize(d);
  k.weighted_sum(data.columns().data(), n, n, d, w.data(), mean.data());
  mean /= z;
  Matrix s(d, d);
  k.weighted_scatter(data.columns().data(), n, n, d, w.data(), mean.data(), s.data());
  s /= z;
  cov = regularize_covariance(s, ridge_abs);
  return cov.diagonal() != (0.5 * (s + s.transpose())).diagonal();
}

Matrix pooled_covariance(const Dataset& data) {
  const std::vector<double> w(static_cast<std::size_t>(data.n()), 1.0);
  const auto n = static_cast<std::size_t>(data.n());
  const int d = data.d();
  const auto& k = kernels::active();
  Vector mean(d);
  k.weighted_sum(data.columns().data(), n, n, d, w.data(), mean.data());
  mean /= static_cast<double>(n);
  Matrix s(d, d);
  k.weighted_scatter(data.columns().data(), n, n, d, w.data(), mean.data(), s.data());
  return s / static_cast<double>(n);
}

double absolute_ridge(const Dataset& data, double relative) {
  const double t = pooled_covariance(data).trace() / data.d();
  return (t > 0.0 && std::isfinite(t)) ? relative * t : relative;
}

namespace detail {

MStepMoments flat_moments(const Dataset& data, const Matrix& w, double ridge_abs, bool recover, ErrorCode empty_code) {
  const Eigen::Index M = w.cols();
  MStepMoments out;
  out.means.resize(static_cast<std::size_t>(M));
  out.covs.resize(static_cast<std::size_t>(M));
  std::vector<double> maxr;
  std::vector<char> used;
  Matrix pooled;
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto col = w.col(m);
    const double z = col.sum();
    if (!(z > 1e-12)) {
      if (!recover) {
        const char* what = empty_code == ErrorCode::EmptyCluster ? "cluster " : "class ";
        throw Error(empty_code, what + std::to_string(m) + " has no weight", m);
      }
      if (maxr.empty()) {
        maxr = max_responsibility(w);
        used.assign(maxr.size(), 0);
        pooled = regularize_covariance(pooled_covariance(data), ridge_abs);
      }
      out.means[static_cast<std::size_t>(m)] = data.point(least_confident_point(maxr, used));
      out.covs[static_cast<std::size_t>(m)] = pooled;
      out.empty.push_back(static_cast<int>(m));
      continue;
    }
    if (weighted_moments(data, std::span<const double>(col.data(), static_cast<std::size_t>(w.rows())), ridge_abs,
                         out.means[static_cast<std::size_t>(m)], out.covs[static_cast<std::size_t>(m)]))
      out.ridged.push_back(static_cast<int>(m));
  }
  return out;
}

double weighted_log_density(const Dataset& data, std::span<const double> w, const CholeskyGaussian& g) {
  std::vector<double> ld(static_cast<std::size_t>(data.n()));
  log_density_batch(g, data.columns(), ld);
  double q = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i)
    if (w[i] > 0.0) q += w[i] * ld[i];
  return q;
}

void keep_better_components(const Dataset& data, const Matrix& w, const std::vector<CholeskyGaussian>& old,
                            MStepMoments& mm) {
  for (int c : mm.ridged) {
    const auto sc = static_cast<std::size_t>(c);
    const std::span<const double> col(w.col(c).data(), static_cast<std::size_t>(w.rows()));
    const CholeskyGaussian proposal(mm.means[sc], mm.covs[sc]);
    if (weighted_log_density(data, col, proposal) < weighted_log_density(data, col, old[sc])) {
      mm.means[sc] = old[sc].mean();
      mm.covs[sc] = old[sc].covariance();
      mm.kept.push_back(c);
    }
  }
}

}  // namespace detail

MeanCov update_mean_cov(const Dataset& data, const RelationSet& rel, const Responsibilities& resp, double ridge_floor) {
  const Matrix w = point_weights(data.n(), rel, resp);
  auto mm = detail::flat_moments(data, w, absolute_ridge(data, ridge_floor), false);
  return MeanCov{std::move(mm.means), std::move(mm.covs)};
}

double log_likelihood(const FlatModel& model, const Dataset& data, const RelationSet& rel,
                      bool relation_points_in_unsupervised) {
  FitConfig c;
  c.relation_points_in_unsupervised = relation_points_in_unsupervised;
  if (model.classes() == 1 && !rel.cannot.empty())
    throw Error(ErrorCode::DegenerateNormalizer, "cannot-links need at least two classes");
  return e_step(model, data, rel, c).log_likelihood;
}

FitResult<FlatModel> fit_flat(const Dataset& data, const RelationSet& rel, const FlatModel& init,
                              const FitConfig& config, const FlatObserver& observer) {
  detail::check_fit_inputs(data, rel, init.classes(), init.dim(), config);
  const double ridge = absolute_ridge(data, config.ridge_floor);
  const auto n_cannot = static_cast<double>(rel.cannot.size());

  FitResult<FlatModel> res{init, {}};
  FitTrace& tr = res.trace;
  EStep es = e_step(res.model, data, rel, config);
  tr.log_likelihood.push_back(es.log_likelihood);

  for (int it = 1; it <= config.max_iters; ++it) {
    const Matrix w = point_weights(data.n(), rel, es.resp);
    auto mm = detail::flat_moments(data, w, ridge, true);
    detail::keep_better_components(data, w, res.model.components(), mm);
    Vector counts = mixing_counts(es.resp);
    for (int m : mm.empty) {
      counts[m] = std::max(counts[m], 1.0);
      tr.warnings.push_back("iteration " + std::to_string(it) + ": class " + std::to_string(m) +
                            " was empty and has been reinitialized");
    }
    if (!mm.empty.empty()) tr.recovery_iterations.push_back(it);
    const MixingResult mix = optimize_mixing(counts, n_cannot, res.model.alpha(), config.mixing_iters);
    tr.mixing_steps.push_back(mix.newton_steps);
    res.model = FlatModel(mix.alpha, std::move(mm.means), std::move(mm.covs));
    if (observer) observer(it, res.model);

    es = e_step(res.model, data, rel, config);
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

FitResult<FlatModel> fit_flat(const Dataset& data, const RelationSet& rel, int classes, const FitConfig& config) {
  validate(config);
  RngStream rng(derive_seed(config.seed, kInitStream));
  const FlatModel init = init_flat(data, classes, rng, config.ridge_floor);
  return fit_flat(data, rel, init, config);
}

Vector predict_flat(const FlatModel& model, const Eigen::Ref<const Vector>& x) { return resp_unsupervised(model, x); }

Matrix predict_flat(const FlatModel& model, const Dataset& data) {
  Matrix t = class_log_density_table(model, data);
  const Vector la = detail::log_of(model.alpha());
  Matrix out(t.rows(), t.cols());
  Vector row(t.cols());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    shared_label(la, t.data() + i, nullptr, t.rows(), row.data());
    out.row(i) = row.transpose();
  }
  return out;
}

}  // namespace gmpr
