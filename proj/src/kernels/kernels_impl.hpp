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

#pragma once

#include <cstddef>

namespace gmpr::kernels::detail {

void mahalanobis_sq_scalar(const double* chol, const double* mean, int d, const double* cols, std::size_t n,
                           std::size_t ld, double* out);
void weighted_sum_scalar(const double* cols, std::size_t n, std::size_t ld, int d, const double* w, double* out);
void weighted_scatter_scalar(const double* cols, std::size_t n, std::size_t ld, int d, const double* w,
                             const double* center, double* out);

#if GMPR_HAVE_AVX2
void mahalanobis_sq_avx2(const double* chol, const double* mean, int d, const double* cols, std::size_t n,
                         std::size_t ld, double* out);
void weighted_sum_avx2(const double* cols, std::size_t n, std::size_t ld, int d, const double* w, double* out);
void weighted_scatter_avx2(const double* cols, std::size_t n, std::size_t ld, int d, const double* w,
                           const double* center, double* out);
#endif

}  // namespace gmpr::kernels::detail
