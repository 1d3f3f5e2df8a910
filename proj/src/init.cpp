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

#include "gmpr/init.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gmpr/em_flat.hpp"
#include "gmpr/error.hpp"

namespace gmpr {

namespace {

double sq_dist(const Dataset& data, Index i, const Vector& c) {
  return (data.points().row(i).transpose() - c).squaredNorm();
}

FlatModel model_from_partition(const Dataset& data, const std::vector<Vector>& means, const std::vector<int>& assign,
                               double ridge_abs) {
  const auto M = means.size();
  std::vector<std::vector<double>> w(M, std::vector<double>(static_cast<std::size_t>(data.n()), 0.0));
  std::vector<Index> count(M, 0);
  for (Index i = 0; i < data.n(); ++i) {
    w[static_cast<std::size_t>(assign[i])][static_cast<std::size_t>(i)] = 1.0;
    ++count[static_cast<std::size_t>(assign[i])];
  }
  std::vector<Matrix> covs(M);
  Matrix pooled;
  for (std::size_t m = 0; m < M; ++m) {
    if (count[m] == 0) {
      if (pooled.size() == 0) pooled = regularize_covariance(pooled_covariance(data), ridge_abs);
      covs[m] = pooled;
      continue;
    }
    Vector mean;
    weighted_moments(data, w[m], ridge_abs, mean, covs[m]);
  }
  return FlatModel(Vector::Constant(static_cast<Eigen::Index>(M), 1.0 / static_cast<double>(M)), means, covs);
}

}  // namespace

std::vector<Index> kmeanspp_indices(const Dataset& data, int K, RngStream& rng) {
  const Index n = data.n();
  if (K < 1) throw Error(ErrorCode::InvalidConfig, "K must be >= 1");
  if (K > n) throw Error(ErrorCode::KTooLarge, "K exceeds the number of points");
  std::vector<Index> chosen;
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  std::vector<double> d2(static_cast<std::size_t>(n), 0.0);
  const Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  chosen.push_back(first);
  taken[static_cast<std::size_t>(first)] = 1;
  Vector c = data.point(first);
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = sq_dist(data, i, c);
  while (static_cast<int>(chosen.size()) < K) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i)
      if (!taken[static_cast<std::size_t>(i)]) total += d2[static_cast<std::size_t>(i)];
    Index pick = -1;
    if (total > 0.0) {
      const double u = rng.uniform01() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        acc += d2[static_cast<std::size_t>(i)];
        if (d2[static_cast<std::size_t>(i)] > 0.0) pick = i;
        if (acc > u) break;
      }
    } else {
      auto r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n) - chosen.size()));
      for (Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        if (r-- == 0) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
    taken[static_cast<std::size_t>(pick)] = 1;
    c = data.point(pick);
    for (Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], sq_dist(data, i, c));
  }
  return chosen;
}

std::vector<Vector> kmeanspp_seeds(const Dataset& data, int K, RngStream& rng) {
  std::vector<Vector> out;
  for (Index i : kmeanspp_indices(data, K, rng)) out.push_back(data.point(i));
  return out;
}

std::vector<int> nearest_mean(const Dataset& data, const std::vector<Vector>& means) {
  std::vector<int> out(static_cast<std::size_t>(data.n()), 0);
  for (Index i = 0; i < data.n(); ++i) {
    double best = sq_dist(data, i, means[0]);
    for (std::size_t m = 1; m < means.size(); ++m) {
      const double v = sq_dist(data, i, means[m]);
      if (v < best) {
        best = v;
        out[static_cast<std::size_t>(i)] = static_cast<int>(m);
      }
    }
  }
  return out;
}

FlatModel init_flat_from_means(const Dataset& data, const std::vector<Vector>& means, double ridge_floor) {
  if (means.empty()) throw Error(ErrorCode::InvalidConfig, "no initial means");
  for (const auto& m : means)
    if (m.size() != data.d()) throw Error(ErrorCode::DimensionMismatch, "initial mean dimension != d");
  return model_from_partition(data, means, nearest_mean(data, means), absolute_ridge(data, ridge_floor));
}

FlatModel init_flat(const Dataset& data, int classes, RngStream& rng, double ridge_floor) {
  return init_flat_from_means(data, kmeanspp_seeds(data, classes, rng), ridge_floor);
}

HierModel init_hier(const Dataset& data, int classes, const std::vector<int>& clusters_per_class, RngStream& rng,
                    double ridge_floor, std::vector<int>* small_classes) {
  if (static_cast<int>(clusters_per_class.size()) != classes)
    throw Error(ErrorCode::InvalidConfig, "clusters_per_class length != M");
  for (int k : clusters_per_class)
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "every class needs at least one cluster");
  const auto seeds = kmeanspp_seeds(data, classes, rng);
  return init_hier_from_means(data, seeds, clusters_per_class, rng, ridge_floor, small_classes);
}

HierModel init_hier_from_means(const Dataset& data, const std::vector<Vector>& seeds,
                               const std::vector<int>& clusters_per_class, RngStream& rng, double ridge_floor,
                               std::vector<int>* small_classes) {
  const int classes = static_cast<int>(seeds.size());
  if (classes < 1) throw Error(ErrorCode::InvalidConfig, "no class means");
  if (static_cast<int>(clusters_per_class.size()) != classes)
    throw Error(ErrorCode::InvalidConfig, "clusters_per_class length != M");
  for (int k : clusters_per_class)
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "every class needs at least one cluster");
  for (const auto& mu : seeds)
    if (mu.size() != data.d()) throw Error(ErrorCode::DimensionMismatch, "class mean dimension != d");
  const double ridge_abs = absolute_ridge(data, ridge_floor);
  const auto assign = nearest_mean(data, seeds);
  const FlatModel flat = model_from_partition(data, seeds, assign, ridge_abs);

  std::vector<SubMixture> subs(static_cast<std::size_t>(classes));
  for (int m = 0; m < classes; ++m) {
    const int K = clusters_per_class[static_cast<std::size_t>(m)];
    SubMixture& s = subs[static_cast<std::size_t>(m)];
    s.pi = Vector::Constant(K, 1.0 / K);
    if (K == 1) {
      s.means = {flat.mean(m)};
      s.covs = {flat.cov(m)};
      continue;
    }
    std::vector<Index> members;
    for (Index i = 0; i < data.n(); ++i)
      if (assign[static_cast<std::size_t>(i)] == m) members.push_back(i);
    if (static_cast<int>(members.size()) < K) {
      if (small_classes) small_classes->push_back(m);
      const double sd = std::sqrt(ridge_floor);
      for (int k = 0; k < K; ++k) {
        Vector mu = flat.mean(m);
        for (Eigen::Index q = 0; q < mu.size(); ++q) mu[q] += sd * rng.normal();
        s.means.push_back(mu);
        s.covs.push_back(flat.cov(m));
      }
      continue;
    }
    RowMatrix pts(static_cast<Eigen::Index>(members.size()), data.d());
    for (std::size_t t = 0; t < members.size(); ++t) pts.row(static_cast<Eigen::Index>(t)) = data.points().row(members[t]);
    const Dataset sub(std::move(pts));
    const auto sub_seeds = kmeanspp_seeds(sub, K, rng);
    const FlatModel part = model_from_partition(sub, sub_seeds, nearest_mean(sub, sub_seeds), ridge_abs);
    for (int k = 0; k < K; ++k) {
      s.means.push_back(part.mean(k));
      s.covs.push_back(part.cov(k));
    }
  }
  return HierModel(flat.alpha(), std::move(subs));
}

std::string relation_mode_name(RelationMode mode) {
  switch (mode) {
    case RelationMode::Both: return "both";
    case RelationMode::MustOnly: return "must";
    case RelationMode::CannotOnly: return "cannot";
  }
  return "both";
}

RelationMode parse_relation_mode(const std::string& s) {
  if (s == "both") return RelationMode::Both;
  if (s == "must" || s == "must-only") return RelationMode::MustOnly;
  if (s == "cannot" || s == "cannot-only") return RelationMode::CannotOnly;
  throw Error(ErrorCode::InvalidConfig, "unknown relation mode '" + s + "'");
}

RelationSet sample_relations(const std::vector<int>& labels, long long n_pairs, RngStream& rng, RelationMode mode) {
  if (n_pairs < 0) throw Error(ErrorCode::InvalidConfig, "n_pairs must be >= 0");
  const auto n = static_cast<long long>(labels.size());
  const long long total = n * (n - 1) / 2;
  std::vector<long long> per_label;
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::InvariantViolation, "negative label");
    if (static_cast<std::size_t>(l) >= per_label.size()) per_label.resize(static_cast<std::size_t>(l) + 1, 0);
    ++per_label[static_cast<std::size_t>(l)];
  }
  long long same = 0;
  for (long long c : per_label) same += c * (c - 1) / 2;
  const long long available =
      mode == RelationMode::Both ? total : (mode == RelationMode::MustOnly ? same : total - same);
  if (n_pairs > available)
    throw Error(ErrorCode::ExhaustedPairs, "only " + std::to_string(available) + " qualifying pairs exist");

  auto wanted = [&](Index i, Index j) {
    const bool s = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
    return mode == RelationMode::Both || (mode == RelationMode::MustOnly) == s;
  };
  std::vector<Pair> picked;
  if (2 * n_pairs <= available) {
    std::set<Pair> seen;
    while (static_cast<long long>(picked.size()) < n_pairs) {
      auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      const Pair p{std::min(i, j), std::max(i, j)};
      if (!seen.insert(p).second) continue;
      if (wanted(p.first, p.second)) picked.push_back(p);
    }
  } else {
    // Dense budgets: partial Fisher-Yates over the qualifying pairs.
    std::vector<Pair> pool;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (wanted(i, j)) pool.push_back({i, j});
    for (long long t = 0; t < n_pairs; ++t) {
      const auto r = t + static_cast<long long>(rng.below(static_cast<std::uint64_t>(pool.size() - t)));
      std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(r)]);
      picked.push_back(pool[static_cast<std::size_t>(t)]);
    }
  }
  RelationSet rel;
  for (const Pair& p : picked) {
    if (labels[static_cast<std::size_t>(p.first)] == labels[static_cast<std::size_t>(p.second)])
      rel.must.push_back(p);
    else
      rel.cannot.push_back(p);
  }
  return validate_relations(rel, static_cast<Index>(n));
}

}  // namespace gmpr
