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
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "pptest/intensity.hpp"
#include "pptest/random.hpp"

namespace pptest {

using Sign = std::int8_t;

/// One realisation of a Poisson process with intensity scale_n * f.
struct PointPattern {
  std::vector<double> points;
  double scale_n = 1.0;
};

/// Superposition of two patterns; marks[i] = +1 if points[i] came from the
/// first process and -1 otherwise.
struct MarkedPool {
  std::vector<double> points;
  std::vector<Sign> marks;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Joint permutation of (points, marks) into nondecreasing point order.
  MarkedPool sorted() const;
  /// Points labelled +1 and -1, in pool order.
  std::pair<std::vector<double>, std::vector<double>> split() const;
};

/// Poisson(n) count, then that many i.i.d. draws from the model.
PointPattern simulate(const IntensityModel& model, double n, Stream& rng);

MarkedPool pool(const PointPattern& first, const PointPattern& second);

/// `count` i.i.d. fair signs, 64 per generator output (low bit first).
std::vector<Sign> draw_rademacher(std::size_t count, Stream& rng);

void write_pattern_csv(std::ostream& out, const PointPattern& pattern);
void write_pool_csv(std::ostream& out, const MarkedPool& pool);
/// Reads `x,mark` rows. A single-column `x` file is read as all +1 marks.
MarkedPool read_pool_csv(std::istream& in);
PointPattern read_pattern_csv(std::istream& in, double scale_n);

}  // namespace pptest
