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

#include "gmpr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace gmpr::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &detail::mahalanobis_sq_scalar, &detail::weighted_sum_scalar,
                              &detail::weighted_scatter_scalar};

#if GMPR_HAVE_AVX2
constexpr KernelTable kAvx2{Isa::Avx2, &detail::mahalanobis_sq_avx2, &detail::weighted_sum_avx2,
                            &detail::weighted_scatter_avx2};

bool cpu_has_avx2() noexcept {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("GMPR_ISA");
  if (env != nullptr && std::string_view(env) == "scalar") return &kScalar;
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if GMPR_HAVE_AVX2
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

Isa select(Isa isa) noexcept {
  const KernelTable* t = &kScalar;
  if (isa == Isa::Avx2 && avx2_table() != nullptr) t = avx2_table();
  current().store(t, std::memory_order_release);
  return t->isa;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace gmpr::kernels
