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

#include "pptest/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "internal/parse.hpp"

namespace pptest {

MarkedPool MarkedPool::sorted() const {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return points[a] < points[b];
  });
  MarkedPool out;
  out.points.reserve(points.size());
  out.marks.reserve(points.size());
  for (auto i : order) {
    out.points.push_back(points[i]);
    out.marks.push_back(marks[i]);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> MarkedPool::split() const {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    (marks[i] > 0 ? out.first : out.second).push_back(points[i]);
  }
  return out;
}

PointPattern simulate(const IntensityModel& model, double n, Stream& rng) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("simulate: n must be positive");
  }
  if (model.total_mass() != 1.0) {
    throw std::invalid_argument("simulate: model must have total mass 1");
  }
  PointPattern out;
  out.scale_n = n;
  const std::uint64_t count = poisson(rng, n * model.total_mass());
  out.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.points.push_back(model.sample(rng));
  return out;
}

MarkedPool pool(const PointPattern& first, const PointPattern& second) {
  if (first.scale_n != second.scale_n) {
    throw std::invalid_argument("pool: patterns must share the scale n");
  }
  MarkedPool out;
  out.points.reserve(first.points.size() + second.points.size());
  out.points = first.points;
  out.points.insert(out.points.end(), second.points.begin(), second.points.end());
  out.marks.assign(first.points.size(), Sign{1});
  out.marks.resize(out.points.size(), Sign{-1});
  return out;
}

std::vector<Sign> draw_rademacher(std::size_t count, Stream& rng) {
  std::vector<Sign> out(count);
  for (std::size_t i = 0; i < count; i += 64) {
    std::uint64_t bits = rng();
    const std::size_t end = std::min(count, i + 64);
    for (std::size_t k = i; k < end; ++k, bits >>= 1) {
      out[k] = (bits & 1u) ? Sign{1} : Sign{-1};
    }
  }
  return out;
}

void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
  out << "x\n";
  for (double x : pattern.points) out << format_double(x) << '\n';
}

void write_pool_csv(std::ostream& out, const MarkedPool& pool) {
  out << "x,mark\n";
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out << format_double(pool.points[i]) << ',' << static_cast<int>(pool.marks[i])
        << '\n';
  }
}

MarkedPool read_pool_csv(std::istream& in) {
  MarkedPool out;
  std::string line;
  std::size_t lineno = 0;
  bool with_marks = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = internal::trim(line);
    if (t.empty()) continue;
    const auto cols = internal::split(t, ',');
    if (lineno == 1 && (cols[0] == "x")) {
      with_marks = cols.size() > 1;
      continue;
    }
    try {
      out.points.push_back(internal::parse_double(cols[0]));
      if (with_marks) {
        if (cols.size() != 2) throw std::invalid_argument("expected x,mark");
        const int m = internal::parse_int(cols[1]);
        if (m != 1 && m != -1) throw std::invalid_argument("mark must be +1 or -1");
        out.marks.push_back(static_cast<Sign>(m));
      } else {
        out.marks.push_back(Sign{1});
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("pool csv line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  return out;
}

PointPattern read_pattern_csv(std::istream& in, double scale_n) {
  PointPattern out;
  out.scale_n = scale_n;
  out.points = read_pool_csv(in).points;
  return out;
}

}  // namespace pptest
