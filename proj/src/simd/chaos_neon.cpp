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

#if defined(__aarch64__)
#include <arm_neon.h>

namespace pptest::simd::detail {

// Row-flip scheme of the x86 variants; 16 lanes per pass in 8 q-registers.
void chaos_panel_neon(const GramView& gram, const double* panel, double* out) {
  constexpr std::size_t W = kPanelWidth;
  constexpr std::size_t kVecs = 8;
  const std::size_t n = gram.n;
  for (std::size_t pass = 0; pass < W; pass += 2 * kVecs) {
    const double* base = panel + pass;
    float64x2_t acc[kVecs];
    for (auto& a : acc) a = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* ei = base + i * W;
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = vmulq_f64(acc[k], vld1q_f64(ei + 2 * k));
      }
      const double* row = gram.values + i * n;
      const std::size_t lo = gram.band[2 * i];
      const std::size_t hi = gram.band[2 * i + 1];
      const std::size_t mid = i < hi ? i : hi;
      for (std::size_t j = lo; j < mid; ++j) {
        const float64x2_t g = vdupq_n_f64(row[j]);
        const double* ej = base + j * W;
        for (std::size_t k = 0; k < kVecs; ++k) {
          acc[k] = vfmaq_f64(acc[k], g, vld1q_f64(ej + 2 * k));
        }
      }
      for (std::size_t j = (i + 1 > lo ? i + 1 : lo); j < hi; ++j) {
        const float64x2_t g = vdupq_n_f64(row[j]);
        const double* ej = base + j * W;
        for (std::size_t k = 0; k < kVecs; ++k) {
          acc[k] = vfmaq_f64(acc[k], g, vld1q_f64(ej + 2 * k));
        }
      }
      for (std::size_t k = 0; k < kVecs; ++k) {
        acc[k] = vmulq_f64(acc[k], vld1q_f64(ei + 2 * k));
      }
    }
    const float64x2_t zero = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < kVecs; ++k) {
      vst1q_f64(out + pass + 2 * k, vaddq_f64(acc[k], zero));
    }
  }
}

}  // namespace pptest::simd::detail

#else

namespace pptest::simd::detail {
void chaos_panel_neon(const GramView&, const double*, double*) {
  throw std::runtime_error("neon chaos kernel not built for this target");
}
}  // namespace pptest::simd::detail

#endif
