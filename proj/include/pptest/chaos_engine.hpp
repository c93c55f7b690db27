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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pptest/kernel.hpp"
#include "pptest/point_process.hpp"
#include "pptest/simd/chaos.hpp"

namespace pptest {

/// B sign vectors over `points` coordinates. Replicate r is drawn from
/// Stream(derive_seed(seed, r)), so any prefix of replicates is the same
/// whatever the total count.
simd::SignPanels draw_sign_panels(std::size_t points, std::size_t replicates,
                                  std::uint64_t seed);

/// Observed statistics and bootstrap replicates for a list of kernels on
/// one point set. replicates[m * count + b] is member m's replicate b.
struct ChaosTable {
  std::size_t members = 0;
  std::size_t count = 0;
  std::vector<double> observed;
  std::vector<double> replicates;

  std::span<const double> member(std::size_t m) const {
    return {replicates.data() + m * count, count};
  }
};

/// Computes a ChaosTable for `kernels` on `points` with the given marks and
/// sign draws. Haar kernels share one exact integer cell-sum pass; every
/// other kernel goes through its Gram matrix and the dispatched chaos kernel.
ChaosTable evaluate_chaos(std::span<const KernelSpec> kernels,
                          std::span<const double> points, std::span<const Sign> marks,
                          const simd::SignPanels& signs);

/// Replicates of a single dense Gram with an explicit variant.
std::vector<double> gram_replicates(const GramMatrix& gram, const simd::SignPanels& signs,
                                    simd::Isa isa);

/// Haar-only evaluation, exposed for equivalence tests against the Gram route.
ChaosTable evaluate_haar(std::span<const KernelSpec> kernels,
                         std::span<const double> points, std::span<const Sign> marks,
                         const simd::SignPanels& signs);

}  // namespace pptest
