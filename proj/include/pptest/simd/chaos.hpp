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

#pragma once

// Rademacher-chaos kernels: for each bootstrap replicate b, evaluate
//
//   T_b = sum_{i != j} G[i][j] e[i][b] e[j][b]
//
// with a single accumulator, rows in order, columns in order. Replicates
// are independent, so the vector variants put one replicate per lane and
// every lane performs exactly the scalar reference's operation sequence.
// Results are bit-identical across variants.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pptest::simd {

/// Replicates per panel. Panels are the unit of work for every variant.
inline constexpr std::size_t kPanelWidth = 64;

/// +-1.0 sign matrix for `replicates` vectors over `points` coordinates,
/// stored panel-major: element (point i, replicate b) lives at
/// data[((b / W) * points + i) * W + b % W] with W = kPanelWidth.
/// Padding lanes of the last panel hold +1.
class SignPanels {
 public:
  SignPanels() = default;
  SignPanels(std::size_t points, std::size_t replicates);

  std::size_t points() const { return points_; }
  std::size_t replicates() const { return replicates_; }
  std::size_t panels() const { return panels_; }

  double* panel(std::size_t p) { return data_.data() + p * points_ * kPanelWidth; }
  const double* panel(std::size_t p) const {
    return data_.data() + p * points_ * kPanelWidth;
  }
  double sign(std::size_t point, std::size_t replicate) const {
    return panel(replicate / kPanelWidth)[point * kPanelWidth + replicate % kPanelWidth];
  }
  /// Sets replicate b's signs from the low bits of `words` (bit i -> point i,
  /// 1 -> +1, 0 -> -1).
  void set_replicate(std::size_t b, std::span<const std::uint64_t> words);

 private:
  std::size_t points_ = 0;
  std::size_t replicates_ = 0;
  std::size_t panels_ = 0;
  std::vector<double> data_;
};

/// Dense symmetric Gram in row-major order plus per-row [begin, end) ranges
/// outside which off-diagonal entries are exactly zero.
struct GramView {
  const double* values;
  const std::size_t* band;  // 2 entries per row
  std::size_t n;
};

enum class Isa { scalar, avx2, avx512, neon };

std::string_view isa_name(Isa isa);

/// Whether a variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// The widest available variant. Override with PPTEST_ISA=scalar|avx2|...
Isa best_isa();

/// Writes kPanelWidth chaos values for panel `panel` to out.
void chaos_panel(Isa isa, const GramView& gram, const double* panel, double* out);

/// Reference: naive double loop over all ordered pairs, ignoring bands.
void chaos_panel_scalar(const GramView& gram, const double* panel, double* out);

namespace detail {
void chaos_panel_avx2(const GramView& gram, const double* panel, double* out);
void chaos_panel_avx512(const GramView& gram, const double* panel, double* out);
void chaos_panel_neon(const GramView& gram, const double* panel, double* out);
}  // namespace detail

}  // namespace pptest::simd
