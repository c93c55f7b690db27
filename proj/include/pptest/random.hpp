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
#include <limits>
#include <string_view>

namespace pptest {

/// SplitMix64 step; used both as a seeding expander and as the mixing
/// function behind derive_seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// Counter-based child seed: stream i of a master seed is
/// derive_seed(master, i). Independent of how many workers consume it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Stable 64-bit tag for a name (FNV-1a), for deriving named sub-streams.
std::uint64_t tag_of(std::string_view name);

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1); safe for log and quantiles.
  double uniform_open();

  /// Child stream keyed by `index`, drawn from this stream's next output.
  Stream split(std::uint64_t index);

 private:
  std::uint64_t s_[4];
};

/// Poisson(mean) count. Inversion by sequential search for mean <= 10,
/// Hormann's PTRS transformed rejection above. Both are exact.
std::uint64_t poisson(Stream& rng, double mean);

}  // namespace pptest
