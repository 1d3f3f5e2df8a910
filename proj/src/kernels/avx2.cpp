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

// Compiled with -mavx2 -mfma; only reached through the dispatch table after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <vector>

namespace gmpr::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sw = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

}  // namespace

void mahalanobis_sq_avx2(const double* chol, const double* mean, int d, const double* cols, std::size_t n,
                         std::size_t ld, double* out) {
  std::vector<double> y(4 * static_cast<std::size_t>(d));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < d; ++k) {
      __m256d r = _mm256_sub_pd(_mm256_loadu_pd(cols + k * ld + i), _mm256_set1_pd(mean[k]));
      for (int j = 0; j < k; ++j) r = _mm256_fnmadd_pd(_mm256_set1_pd(chol[j * d + k]), _mm256_loadu_pd(&y[4 * j]), r);
      const __m256d yk = _mm256_div_pd(r, _mm256_set1_pd(chol[k * d + k]));
      _mm256_storeu_pd(&y[4 * k], yk);
      acc = _mm256_fmadd_pd(yk, yk, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  if (i < n) mahalanobis_sq_scalar(chol, mean, d, cols + i, n - i, ld, out + i);
}

void weighted_sum_avx2(const double* cols, std::size_t n, std::size_t ld, int d, const double* w, double* out) {
  for (int k = 0; k < d; ++k) {
    const double* col = cols + k * ld;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(col + i), acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * col[i];
    out[k] = hsum(acc) + tail;
  }
}

void weighted_scatter_avx2(const double* cols, std::size_t n, std::size_t ld, int d, const double* w,
                           const double* center, double* out) {
  for (int a = 0; a < d; ++a) {
    const double* ca = cols + a * ld;
    const __m256d va = _mm256_set1_pd(center[a]);
    for (int b = 0; b <= a; ++b) {
      const double* cb = cols + b * ld;
      const __m256d vb = _mm256_set1_pd(center[b]);
      __m256d acc = _mm256_setzero_pd();
      std::size_t i = 0;
      for (; i + 4 <= n; i += 4) {
        __m256d da = _mm256_sub_pd(_mm256_loadu_pd(ca + i), va);
        __m256d db = _mm256_sub_pd(_mm256_loadu_pd(cb + i), vb);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), da), db, acc);
      }
      double tail = 0.0;
      for (; i < n; ++i) tail += w[i] * (ca[i] - center[a]) * (cb[i] - center[b]);
      const double s = hsum(acc) + tail;
      out[b * d + a] = s;
      out[a * d + b] = s;
    }
  }
}

}  // namespace gmpr::kernels::detail
