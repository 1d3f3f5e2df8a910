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

// Brute-force references shared by the unit tests and the acceptance runner. Posteriors enumerate every latent
// assignment in long double; none of them call the library's posterior code.

#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "support.hpp"

namespace gmpr::test {

// Posteriors by enumeration, straight from the factor definitions.
inline Vector oracle_unsup(const FlatModel& f, const Vector& x) {
  const int M = f.classes();
  std::vector<long double> p(M);
  long double z = 0;
  for (int m = 0; m < M; ++m) z += p[m] = f.alpha()[m] * class_density(f, m, x);
  Vector out(M);
  for (int m = 0; m < M; ++m) out[m] = static_cast<double>(p[m] / z);
  return out;
}

inline Vector oracle_must(const FlatModel& f, const Vector& xi, const Vector& xj) {
  const int M = f.classes();
  std::vector<long double> p(M);
  long double z = 0;
  for (int m = 0; m < M; ++m) z += p[m] = f.alpha()[m] * class_density(f, m, xi) * class_density(f, m, xj);
  Vector out(M);
  for (int m = 0; m < M; ++m) out[m] = static_cast<double>(p[m] / z);
  return out;
}

inline Matrix oracle_cannot_joint(const FlatModel& f, const Vector& xa, const Vector& xb) {
  const int M = f.classes();
  LMatrix p = LMatrix::Zero(M, M);
  long double z = 0;
  for (int m = 0; m < M; ++m)
    for (int mp = 0; mp < M; ++mp) z += p(m, mp) = cl_prior(f.alpha(), m, mp) * class_density(f, m, xa) * class_density(f, mp, xb);
  return (p / z).cast<double>();
}

// Textbook GMM EM step (no relations).
inline FlatModel textbook_step(const FlatModel& f, const Dataset& data) {
  const int M = f.classes(), d = data.d();
  const Index n = data.n();
  Matrix r(n, M);
  for (Index i = 0; i < n; ++i) r.row(i) = oracle_unsup(f, data.point(i)).transpose();
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  Vector alpha(M);
  for (int m = 0; m < M; ++m) {
    const double z = r.col(m).sum();
    alpha[m] = z / static_cast<double>(n);
    Vector mu = Vector::Zero(d);
    for (Index i = 0; i < n; ++i) mu += r(i, m) * data.point(i);
    mu /= z;
    Matrix S = Matrix::Zero(d, d);
    for (Index i = 0; i < n; ++i) S += r(i, m) * (data.point(i) - mu) * (data.point(i) - mu).transpose();
    means.push_back(mu);
    covs.push_back(S / z);
  }
  return FlatModel(alpha / alpha.sum(), means, covs);
}

inline int kmax(const HierModel& h) {
  int k = 0;
  for (int m = 0; m < h.classes(); ++m) k = std::max(k, h.clusters_in(m));
  return k;
}

inline long double cell(const HierModel& h, int m, int k, const Vector& x) {
  return h.sub(m).pi[k] * density(h.sub(m).means[k], h.sub(m).covs[k], x);
}

// p(z = m, y = k | x) by enumeration over (m, k).
inline Matrix oracle_point(const HierModel& h, const Vector& x) {
  LMatrix p = LMatrix::Zero(h.classes(), kmax(h));
  long double z = 0;
  for (int m = 0; m < h.classes(); ++m)
    for (int k = 0; k < h.clusters_in(m); ++k) z += p(m, k) = h.alpha()[m] * cell(h, m, k, x);
  return (p / z).cast<double>();
}

// Enumerates (z, y_i, y_j); returns the two member joints.
inline std::pair<Matrix, Matrix> oracle_must(const HierModel& h, const Vector& xi, const Vector& xj) {
  const int M = h.classes(), K = kmax(h);
  LMatrix pi = LMatrix::Zero(M, K), pj = LMatrix::Zero(M, K);
  long double z = 0;
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < h.clusters_in(m); ++k)
      for (int kp = 0; kp < h.clusters_in(m); ++kp) {
        const long double v = h.alpha()[m] * cell(h, m, k, xi) * cell(h, m, kp, xj);
        pi(m, k) += v;
        pj(m, kp) += v;
        z += v;
      }
  return {(pi / z).cast<double>(), (pj / z).cast<double>()};
}

// Enumerates (z_a, z_b, y_a, y_b) with same-class pairs masked.
inline std::pair<Matrix, Matrix> oracle_cannot(const HierModel& h, const Vector& xa, const Vector& xb) {
  const int M = h.classes(), K = kmax(h);
  LMatrix pa = LMatrix::Zero(M, K), pb = LMatrix::Zero(M, K);
  long double z = 0;
  for (int m = 0; m < M; ++m)
    for (int mp = 0; mp < M; ++mp) {
      if (m == mp) continue;
      for (int k = 0; k < h.clusters_in(m); ++k)
        for (int kp = 0; kp < h.clusters_in(mp); ++kp) {
          const long double v = cl_prior(h.alpha(), m, mp) * cell(h, m, k, xa) * cell(h, mp, kp, xb);
          pa(m, k) += v;
          pb(mp, kp) += v;
          z += v;
        }
    }
  return {(pa / z).cast<double>(), (pb / z).cast<double>()};
}

}  // namespace gmpr::test
