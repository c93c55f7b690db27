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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pptest/simd/chaos.hpp"

namespace pptest::simd {

SignPanels::SignPanels(std::size_t points, std::size_t replicates)
    : points_(points),
      replicates_(replicates),
      panels_((replicates + kPanelWidth - 1) / kPanelWidth),
      data_(panels_ * points * kPanelWidth, 1.0) {}

void SignPanels::set_replicate(std::size_t b, std::span<const std::uint64_t> words) {
  double* p = panel(b / kPanelWidth) + b % kPanelWidth;
  for (std::size_t i = 0; i < points_; ++i) {
    const bool bit = (words[i / 64] >> (i % 64)) & 1u;
    p[i * kPanelWidth] = bit ? 1.0 : -1.0;
  }
}

void chaos_panel_scalar(const GramView& gram, const double* panel, double* out) {
  const std::size_t n = gram.n;
  for (std::size_t lane = 0; lane < kPanelWidth; ++lane) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = panel[i * kPanelWidth + lane];
      const double* row = gram.values + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += (row[j] * ei) * panel[j * kPanelWidth + lane];
      }
    }
    out[lane] = acc + 0.0;
  }
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
#if defined(__x86_64__) || defined(__i386__)
    case Isa::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512:
      return __builtin_cpu_supports("avx512f");
#else
    case Isa::avx2:
    case Isa::avx512:
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("PPTEST_ISA")) {
      for (Isa isa : {Isa::scalar, Isa::avx2, Isa::avx512, Isa::neon}) {
        if (isa_name(isa) == env && isa_available(isa)) return isa;
      }
    }
    for (Isa isa : {Isa::avx512, Isa::avx2, Isa::neon}) {
      if (isa_available(isa)) return isa;
    }
    return Isa::scalar;
  }();
  return chosen;
}

void chaos_panel(Isa isa, const GramView& gram, const double* panel, double* out) {
  switch (isa) {
    case Isa::scalar: return chaos_panel_scalar(gram, panel, out);
    case Isa::avx2: return detail::chaos_panel_avx2(gram, panel, out);
    case Isa::avx512: return detail::chaos_panel_avx512(gram, panel, out);
    case Isa::neon: return detail::chaos_panel_neon(gram, panel, out);
  }
  throw std::logic_error("chaos_panel: bad isa");
}

}  // namespace pptest::simd
