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

// Shared fixtures and brute-force oracles. Oracles work in long double with explicit inverses and direct
// enumeration, and never call the library's posterior code.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmpr/em_flat.hpp"
#include "gmpr/em_hier.hpp"
#include "gmpr/error.hpp"
#include "gmpr/model.hpp"
#include "gmpr/rng.hpp"

namespace gmpr::test {

// Error code thrown by f, or nullopt when it returns normally.
inline std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define CHECK_CODE(expr, code) CHECK(::gmpr::test::code_of([&] { (void)(expr); }) == std::optional<::gmpr::ErrorCode>(code))

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

inline Matrix random_spd(int d, RngStream& rng, double scale = 1.0) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Matrix s = a * a.transpose() / d + 0.3 * Matrix::Identity(d, d);
  return scale * s;
}

inline Vector random_vec(int d, RngStream& rng, double scale = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

inline Vector random_simplex(int m, RngStream& rng, double lo = 0.05) {
  Vector a(m);
  for (int i = 0; i < m; ++i) a[i] = lo + rng.uniform01();
  return a / a.sum();
}

inline FlatModel random_flat(int M, int d, RngStream& rng, double spread = 1.5) {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int m = 0; m < M; ++m) {
    means.push_back(random_vec(d, rng, spread));
    covs.push_back(random_spd(d, rng));
  }
  return FlatModel(random_simplex(M, rng), std::move(means), std::move(covs));
}

inline HierModel random_hier(const std::vector<int>& ks, int d, RngStream& rng, double spread = 1.5) {
  std::vector<SubMixture> subs;
  for (int k : ks) {
    SubMixture s;
    s.pi = random_simplex(k, rng);
    for (int q = 0; q < k; ++q) {
      s.means.push_back(random_vec(d, rng, spread));
      s.covs.push_back(random_spd(d, rng));
    }
    subs.push_back(std::move(s));
  }
  return HierModel(random_simplex(static_cast<int>(ks.size()), rng), std::move(subs));
}

inline Dataset random_dataset(Index n, int d, RngStream& rng, double spread = 2.0) {
  RowMatrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) pts(i, k) = rng.normal() + (i % 3) * spread * (k == 0 ? 1.0 : -0.5);
  return Dataset(std::move(pts));
}

// Gaussian density in extended precision from the explicit inverse and determinant.
inline long double density(const Vector& mean, const Matrix& cov, const Vector& x) {
  const int d = static_cast<int>(mean.size());
  const LMatrix S = cov.cast<long double>();
  const LVector r = (x - mean).cast<long double>();
  const LMatrix inv = S.inverse();
  const long double q = r.dot(inv * r);
  return std::exp(-0.5L * q) / std::sqrt(std::pow(2.0L * std::numbers::pi_v<long double>, d) * S.determinant());
}

inline long double log_density_oracle(const Vector& mean, const Matrix& cov, const Vector& x) {
  const int d = static_cast<int>(mean.size());
  const LMatrix S = cov.cast<long double>();
  const LVector r = (x - mean).cast<long double>();
  const long double q = r.dot(S.inverse() * r);
  return -0.5L * d * std::log(2.0L * std::numbers::pi_v<long double>) - 0.5L * std::log(S.determinant()) - 0.5L * q;
}

// p(x | class m) for a hierarchical model, direct sum.
inline long double class_density(const HierModel& model, int m, const Vector& x) {
  const SubMixture& s = model.sub(m);
  long double p = 0;
  for (int k = 0; k < s.pi.size(); ++k) p += s.pi[k] * density(s.means[k], s.covs[k], x);
  return p;
}

inline long double class_density(const FlatModel& model, int m, const Vector& x) {
  return density(model.mean(m), model.cov(m), x);
}

// Class prior for a cannot-link pair, written from the definition.
inline long double cl_prior(const Vector& alpha, int m, int mp) {
  if (m == mp) return 0;
  long double sq = 0;
  for (int q = 0; q < alpha.size(); ++q) sq += static_cast<long double>(alpha[q]) * alpha[q];
  return static_cast<long double>(alpha[m]) * alpha[mp] / (1.0L - sq);
}

// Sum of the complete-data likelihood over every joint latent labeling. Enumerates M^(|U| + |ML| + 2|CL|) states.
template <class Model>
long double brute_force_likelihood(const Model& model, const Dataset& data, const RelationSet& rel,
                                   const std::vector<Index>& unsup) {
  const int M = model.classes();
  const auto& alpha = model.alpha();
  const std::size_t vars = unsup.size() + rel.must.size() + 2 * rel.cannot.size();
  LMatrix dens(data.n(), M);
  for (Index i = 0; i < data.n(); ++i)
    for (int m = 0; m < M; ++m) dens(i, m) = class_density(model, m, data.point(i));
  std::vector<int> z(vars, 0);
  long double total = 0;
  while (true) {
    long double p = 1;
    std::size_t v = 0;
    for (Index i : unsup) {
      p *= alpha[z[v]] * dens(i, z[v]);
      ++v;
    }
    for (const Pair& pr : rel.must) {
      p *= alpha[z[v]] * dens(pr.first, z[v]) * dens(pr.second, z[v]);
      ++v;
    }
    for (const Pair& pr : rel.cannot) {
      p *= cl_prior(alpha, z[v], z[v + 1]) * dens(pr.first, z[v]) * dens(pr.second, z[v + 1]);
      v += 2;
    }
    total += p;
    std::size_t q = 0;
    while (q < vars && ++z[q] == M) z[q++] = 0;
    if (q == vars) break;
  }
  return total;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

// Random relation set over n points with disjoint endpoints.
inline RelationSet random_relations(Index n, int n_must, int n_cannot, RngStream& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i) std::swap(idx[static_cast<std::size_t>(i)], idx[rng.below(static_cast<std::uint64_t>(i + 1))]);
  RelationSet rel;
  std::size_t t = 0;
  for (int q = 0; q < n_must && t + 1 < idx.size(); ++q, t += 2) rel.must.push_back({idx[t], idx[t + 1]});
  for (int q = 0; q < n_cannot && t + 1 < idx.size(); ++q, t += 2) rel.cannot.push_back({idx[t], idx[t + 1]});
  return validate_relations(rel, n);
}

}  // namespace gmpr::test
