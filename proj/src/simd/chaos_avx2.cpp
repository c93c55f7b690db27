// Copyright 2026 The pptest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <stdexcept>

#include "pptest/simd/chaos.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace pptest::simd::detail {

// Per lane, the reference computes acc += (G[i][j] * e_i) * e_j. With
// e_i = +-1 and sign-symmetric rounding that equals
// e_i * ((e_i * acc) + G[i][j] * e_j), so each row is run on the flipped
// accumulator and flipped back. G * e_j is exact, so the FMA rounds once,
// same as the reference's add.
__attribute__((target("avx2,fma")))
void chaos_panel_avx2(const GramView& gram, const double* panel, double* out) {
  constexpr std::size_t W = kPanelWidth;
  constexpr std::size_t kVecs = 8;  // 32 lanes per pass
  const std::size_t n = gram.n;
  for (std::size_t half = 0; half < W; half += 4 * kVecs) {
    const double* base = panel + half;
    __m256d acc[kVecs];
    for (auto& a : acc) a = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      const double* ei = base + i * W;
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = _mm256_mul_pd(acc[k], _mm256_loadu_pd(ei + 4 * k));
      }
      const double* row = gram.values + i * n;
      const std::size_t lo = gram.band[2 * i];
      const std::size_t hi = gram.band[2 * i + 1];
      const std::size_t mid = i < hi ? i : hi;
      for (std::size_t j = lo; j < mid; ++j) {
        const __m256d g = _mm256_broadcast_sd(row + j);
        const double* ej = base + j * W;
        for (std::size_t k = 0; k < kVecs; ++k) {
          acc[k] = _mm256_fmadd_pd(g, _mm256_loadu_pd(ej + 4 * k), acc[k]);
        }
      }
      for (std::size_t j = (i + 1 > lo ? i + 1 : lo); j < hi; ++j) {
        const __m256d g = _mm256_broadcast_sd(row + j);
        const double* ej = base + j * W;
        for (std::size_t k = 0; k < kVecs; ++k) {
          acc[k] = _mm256_fmadd_pd(g, _mm256_loadu_pd(ej + 4 * k), acc[k]);
        }
      }
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = _mm256_mul_pd(acc[k], _mm256_loadu_pd(ei + 4 * k));
      }
    }
    const __m256d zero = _mm256_setzero_pd();
    for (std::size_t k = 0; k < kVecs; ++k) {
      _mm256_storeu_pd(out + half + 4 * k, _mm256_add_pd(acc[k], zero));
    }
  }
}

}  // namespace pptest::simd::detail

#else

namespace pptest::simd::detail {
void chaos_panel_avx2(const GramView&, const double*, double*) {
  throw std::runtime_error("avx2 chaos kernel not built for this target");
}
}  // namespace pptest::simd::detail

#endif
