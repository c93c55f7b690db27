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

#if defined(__x86_64__)
#include <immintrin.h>

namespace pptest::simd::detail {

// Same row-flip scheme as the AVX2 variant, one 64-lane pass.
__attribute__((target("avx512f")))
void chaos_panel_avx512(const GramView& gram, const double* panel, double* out) {
  constexpr std::size_t W = kPanelWidth;
  constexpr std::size_t kVecs = W / 8;
  const std::size_t n = gram.n;
  __m512d acc[kVecs];
  for (auto& a : acc) a = _mm512_setzero_pd();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ei = panel + i * W;
    for (std::size_t k = 0; k < kVecs; ++k) {
      acc[k] = _mm512_mul_pd(acc[k], _mm512_loadu_pd(ei + 8 * k));
    }
    const double* row = gram.values + i * n;
    const std::size_t lo = gram.band[2 * i];
    const std::size_t hi = gram.band[2 * i + 1];
    const std::size_t mid = i < hi ? i : hi;
    for (std::size_t j = lo; j < mid; ++j) {
      const __m512d g = _mm512_set1_pd(row[j]);
      const double* ej = panel + j * W;
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = _mm512_fmadd_pd(g, _mm512_loadu_pd(ej + 8 * k), acc[k]);
      }
    }
    for (std::size_t j = (i + 1 > lo ? i + 1 : lo); j < hi; ++j) {
      const __m512d g = _mm512_set1_pd(row[j]);
      const double* ej = panel + j * W;
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = _mm512_fmadd_pd(g, _mm512_loadu_pd(ej + 8 * k), acc[k]);
      }
    }
    for (std::size_t k = 0; k < kVecs; ++k) {
      acc[k] = _mm512_mul_pd(acc[k], _mm512_loadu_pd(ei + 8 * k));
    }
  }
  const __m512d zero = _mm512_setzero_pd();
  for (std::size_t k = 0; k < kVecs; ++k) {
    _mm512_storeu_pd(out + 8 * k, _mm512_add_pd(acc[k], zero));
  }
}

}  // namespace pptest::simd::detail

#else

namespace pptest::simd::detail {
void chaos_panel_avx512(const GramView&, const double*, double*) {
  throw std::runtime_error("avx512 chaos kernel not built for this target");
}
}  // namespace pptest::simd::detail

#endif
