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

// Inner loops of the E- and M-steps. Every kernel has a scalar reference and, where the build and CPU allow it, an
// AVX2+FMA variant. The variant is chosen once at startup; GMPR_ISA=scalar in the environment forces the reference.
//
// Layout: point sets are column-major N×d with leading dimension `ld` ≥ n, so feature k of point i lives at
// cols[k*ld + i]. Matrices are column-major d×d.

#pragma once

#include <cstddef>
#include <string_view>

namespace gmpr::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;

  /// out[i] = ‖L⁻¹(x_i − mean)‖² by forward substitution. `chol` is lower triangular.
  void (*mahalanobis_sq)(const double* chol, const double* mean, int d, const double* cols, std::size_t n,
                         std::size_t ld, double* out);

  /// out[k] = Σ_i w[i]·x_ik.
  void (*weighted_sum)(const double* cols, std::size_t n, std::size_t ld, int d, const double* w, double* out);

  /// out = Σ_i w[i]·(x_i − c)(x_i − c)ᵀ, full symmetric d×d written.
  void (*weighted_scatter)(const double* cols, std::size_t n, std::size_t ld, int d, const double* w,
                           const double* center, double* out);
};

const KernelTable& scalar_table() noexcept;

/// Null when the AVX2 translation unit was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// The table all library code uses.
const KernelTable& active() noexcept;

/// Test and CLI hook. Falls back to scalar if the requested ISA is unavailable; returns the ISA now active.
Isa select(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

}  // namespace gmpr::kernels
