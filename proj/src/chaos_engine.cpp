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

#include "pptest/chaos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pptest/random.hpp"
#include "pptest/single_test.hpp"

namespace pptest {

namespace {

constexpr std::size_t W = simd::kPanelWidth;

// Exact evaluation of projection kernels on the Haar basis. With A_l the
// signed sum of phi_l over the pool, the chaos statistic of sum_l phi_l x phi_l
// is sum_l A_l^2 - sum_i K(x_i, x_i). All quantities are integers times
// powers of two, so the result does not depend on summation order.
class HaarPass {
 public:
  HaarPass(std::span<const KernelSpec> kernels, std::span<const double> points)
      : kernels_(kernels), n_(points.size()) {
    for (const auto& k : kernels) {
      if (const auto* nested = std::get_if<HaarNested>(&k.variant())) {
        depth_ = std::max(depth_, nested->levels);
      } else {
        const auto& idx = std::get<HaarSingle>(k.variant()).index;
        if (!idx.is_scaling()) depth_ = std::max(depth_, idx.level + 1);
      }
    }
    cells_ = std::size_t{1} << depth_;
    cell_.resize(n_);
    cell_count_.assign(cells_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = points[i];
      if (x >= 0.0 && x < 1.0) {
        cell_[i] = static_cast<std::ptrdiff_t>(std::floor(std::ldexp(x, depth_)));
        cell_count_[static_cast<std::size_t>(cell_[i])] += 1.0;
      } else if (x == 1.0) {
        cell_[i] = kAtOne;
        ++at_one_;
      } else {
        cell_[i] = kOutside;
      }
    }
    // Level offsets into a flat per-lane buffer of cell sums, finest first.
    offsets_.resize(depth_ + 1);
    std::size_t off = 0;
    for (int l = depth_; l >= 0; --l) {
      offsets_[l] = off;
      off += std::size_t{1} << l;
    }
    total_cells_ = off;
  }

  // signs: coordinate i, lane l at signs[i * stride + l].
  void run(const double* signs, std::size_t stride, std::size_t lanes,
           double* out, std::size_t out_stride) const {
    std::vector<double> sums(total_cells_ * lanes, 0.0);
    std::vector<double> one(lanes, 0.0);
    double* finest = sums.data() + offsets_[depth_] * lanes;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* e = signs + i * stride;
      if (cell_[i] >= 0) {
        double* s = finest + static_cast<std::size_t>(cell_[i]) * lanes;
        for (std::size_t l = 0; l < lanes; ++l) s[l] += e[l];
      } else if (cell_[i] == kAtOne) {
        for (std::size_t l = 0; l < lanes; ++l) one[l] += e[l];
      }
    }
    for (int lev = depth_ - 1; lev >= 0; --lev) {
      const double* fine = sums.data() + offsets_[lev + 1] * lanes;
      double* coarse = sums.data() + offsets_[lev] * lanes;
      for (std::size_t c = 0; c < (std::size_t{1} << lev); ++c) {
        for (std::size_t l = 0; l < lanes; ++l) {
          coarse[c * lanes + l] = fine[2 * c * lanes + l] + fine[(2 * c + 1) * lanes + l];
        }
      }
    }
    // energy[j][l] = sum_k (S_{j+1,2k} - S_{j+1,2k+1})^2.
    std::vector<double> energy(static_cast<std::size_t>(depth_) * lanes, 0.0);
    for (int j = 0; j < depth_; ++j) {
      const double* fine = sums.data() + offsets_[j + 1] * lanes;
      double* en = energy.data() + static_cast<std::size_t>(j) * lanes;
      for (std::size_t k = 0; k < (std::size_t{1} << j); ++k) {
        for (std::size_t l = 0; l < lanes; ++l) {
          const double d = fine[2 * k * lanes + l] - fine[(2 * k + 1) * lanes + l];
          en[l] += d * d;
        }
      }
    }
    const double* root = sums.data() + offsets_[0] * lanes;
    const double inside = static_cast<double>(n_in_unit());
    for (std::size_t m = 0; m < kernels_.size(); ++m) {
      double* o = out + m * out_stride;
      if (const auto* nested = std::get_if<HaarNested>(&kernels_[m].variant())) {
        const int J = nested->levels;
        const double diag = std::ldexp(inside - at_one_, J) + at_one_;
        for (std::size_t l = 0; l < lanes; ++l) {
          const double a0 = root[l] + one[l];
          double s = a0 * a0;
          for (int j = 0; j < J; ++j) s += std::ldexp(energy[j * lanes + l], j);
          o[l] = s - diag;
        }
        continue;
      }
      const auto& idx = std::get<HaarSingle>(kernels_[m].variant()).index;
      if (idx.is_scaling()) {
        for (std::size_t l = 0; l < lanes; ++l) {
          const double a0 = root[l] + one[l];
          o[l] = a0 * a0 - inside;
        }
        continue;
      }
      const int j = idx.level;
      const auto k = static_cast<std::size_t>(idx.shift);
      const double* fine = sums.data() + offsets_[j + 1] * lanes;
      const double support = count_in_cell(j, k);
      for (std::size_t l = 0; l < lanes; ++l) {
        const double d = fine[2 * k * lanes + l] - fine[(2 * k + 1) * lanes + l];
        o[l] = std::ldexp(d * d - support, j);
      }
    }
  }

 private:
  static constexpr std::ptrdiff_t kAtOne = -1;
  static constexpr std::ptrdiff_t kOutside = -2;

  std::size_t n_in_unit() const {
    double s = at_one_;
    for (double c : cell_count_) s += c;
    return static_cast<std::size_t>(s);
  }
  double count_in_cell(int level, std::size_t k) const {
    const std::size_t width = std::size_t{1} << (depth_ - level);
    double s = 0.0;
    for (std::size_t c = k * width; c < (k + 1) * width; ++c) s += cell_count_[c];
    return s;
  }

  std::span<const KernelSpec> kernels_;
  std::size_t n_;
  int depth_ = 0;
  std::size_t cells_ = 1;
  std::vector<std::ptrdiff_t> cell_;
  std::vector<double> cell_count_;
  double at_one_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::size_t total_cells_ = 0;
};

void haar_into(std::span<const KernelSpec> kernels, std::span<const double> points,
               std::span<const Sign> marks, const simd::SignPanels& signs,
               double* observed, double* replicates, std::size_t count) {
  HaarPass pass(kernels, points);
  std::vector<double> marks_d(marks.begin(), marks.end());
  pass.run(marks_d.data(), 1, 1, observed, 1);
  std::vector<double> buf(kernels.size() * W);
  for (std::size_t p = 0; p < signs.panels(); ++p) {
    pass.run(signs.panel(p), W, W, buf.data(), W);
    const std::size_t base = p * W;
    const std::size_t take = std::min(W, count - base);
    for (std::size_t m = 0; m < kernels.size(); ++m) {
      std::copy_n(buf.data() + m * W, take, replicates + m * count + base);
    }
  }
}

}  // namespace

simd::SignPanels draw_sign_panels(std::size_t points, std::size_t replicates,
                                  std::uint64_t seed) {
  simd::SignPanels panels(points, replicates);
  const std::size_t words = (points + 63) / 64;
  std::vector<std::uint64_t> lane_words(W * std::max<std::size_t>(words, 1));
  for (std::size_t p = 0; p < panels.panels(); ++p) {
    const std::size_t lanes = std::min(W, replicates - p * W);
    for (std::size_t l = 0; l < lanes; ++l) {
      Stream rng(derive_seed(seed, p * W + l));
      for (std::size_t w = 0; w < words; ++w) lane_words[l * words + w] = rng();
    }
    double* dst = panels.panel(p);
    for (std::size_t i = 0; i < points; ++i) {
      const std::size_t w = i / 64;
      const unsigned shift = static_cast<unsigned>(i % 64);
      for (std::size_t l = 0; l < lanes; ++l) {
        dst[i * W + l] = ((lane_words[l * words + w] >> shift) & 1u) ? 1.0 : -1.0;
      }
    }
  }
  return panels;
}

std::vector<double> gram_replicates(const GramMatrix& gram, const simd::SignPanels& signs,
                                    simd::Isa isa) {
  if (gram.size() != signs.points()) {
    throw std::invalid_argument("gram_replicates: dimension mismatch");
  }
  const std::size_t count = signs.replicates();
  std::vector<double> out(count);
  std::vector<std::size_t> band(2 * gram.size());
  for (std::size_t i = 0; i < gram.size(); ++i) {
    band[2 * i] = gram.band_begin(i);
    band[2 * i + 1] = gram.band_end(i);
  }
  const simd::GramView view{gram.values().data(), band.data(), gram.size()};
  double buf[W];
  for (std::size_t p = 0; p < signs.panels(); ++p) {
    simd::chaos_panel(isa, view, signs.panel(p), buf);
    const std::size_t base = p * W;
    std::copy_n(buf, std::min(W, count - base), out.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return out;
}

ChaosTable evaluate_haar(std::span<const KernelSpec> kernels,
                         std::span<const double> points, std::span<const Sign> marks,
                         const simd::SignPanels& signs) {
  ChaosTable t;
  t.members = kernels.size();
  t.count = signs.replicates();
  t.observed.resize(t.members);
  t.replicates.resize(t.members * t.count);
  haar_into(kernels, points, marks, signs, t.observed.data(), t.replicates.data(), t.count);
  return t;
}

ChaosTable evaluate_chaos(std::span<const KernelSpec> kernels,
                          std::span<const double> points, std::span<const Sign> marks,
                          const simd::SignPanels& signs) {
  if (marks.size() != points.size() || signs.points() != points.size()) {
    throw std::invalid_argument("evaluate_chaos: dimension mismatch");
  }
  ChaosTable t;
  t.members = kernels.size();
  t.count = signs.replicates();
  t.observed.resize(t.members);
  t.replicates.resize(t.members * t.count);

  std::vector<KernelSpec> haar;
  std::vector<std::size_t> haar_slot;
  for (std::size_t m = 0; m < kernels.size(); ++m) {
    if (kernels[m].is_haar()) {
      haar.push_back(kernels[m]);
      haar_slot.push_back(m);
      continue;
    }
    const GramMatrix g = gram(kernels[m], points);
    t.observed[m] = statistic(g, marks);
    const auto reps = gram_replicates(g, signs, simd::best_isa());
    std::copy(reps.begin(), reps.end(),
              t.replicates.begin() + static_cast<std::ptrdiff_t>(m * t.count));
  }
  if (!haar.empty()) {
    const ChaosTable h = evaluate_haar(haar, points, marks, signs);
    for (std::size_t q = 0; q < haar.size(); ++q) {
      const std::size_t m = haar_slot[q];
      t.observed[m] = h.observed[q];
      std::copy_n(h.replicates.begin() + static_cast<std::ptrdiff_t>(q * t.count), t.count,
                  t.replicates.begin() + static_cast<std::ptrdiff_t>(m * t.count));
    }
  }
  return t;
}

}  // namespace pptest
