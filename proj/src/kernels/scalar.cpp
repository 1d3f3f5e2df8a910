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

#include "kernels_impl.hpp"

#include <vector>

namespace gmpr::kernels::detail {

void mahalanobis_sq_scalar(const double* chol, const double* mean, int d, const double* cols, std::size_t n,
                           std::size_t ld, double* out) {
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
      double r = cols[k * ld + i] - mean[k];
      for (int j = 0; j < k; ++j) r -= chol[j * d + k] * y[j];
      y[k] = r / chol[k * d + k];
      acc += y[k] * y[k];
    }
    out[i] = acc;
  }
}

void weighted_sum_scalar(const double* cols, std::size_t n, std::size_t ld, int d, const double* w, double* out) {
  for (int k = 0; k < d; ++k) {
    const double* col = cols + k * ld;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * col[i];
    out[k] = acc;
  }
}

void weighted_scatter_scalar(const double* cols, std::size_t n, std::size_t ld, int d, const double* w,
                             const double* center, double* out) {
  for (int a = 0; a < d; ++a) {
    const double* ca = cols + a * ld;
    for (int b = 0; b <= a; ++b) {
      const double* cb = cols + b * ld;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += w[i] * (ca[i] - center[a]) * (cb[i] - center[b]);
      out[b * d + a] = acc;
      out[a * d + b] = acc;
    }
  }
}

}  // namespace gmpr::kernels::detail
