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

#include <algorithm>
#include <cmath>
#include <vector>

#include "pptest/kernel.hpp"
#include "pptest/point_process.hpp"
#include "pptest/random.hpp"

namespace pptest::testing {

/// Every kernel variant, with parameters that exercise dense and banded Grams.
inline std::vector<KernelSpec> all_variants() {
  return {KernelSpec::haar_nested(0),
          KernelSpec::haar_nested(3),
          KernelSpec::haar_single(HaarIndex::scaling()),
          KernelSpec::haar_single(HaarIndex::wavelet(2, 1)),
          KernelSpec::approximation(SmoothingBase::gaussian, 0.125),
          KernelSpec::approximation(SmoothingBase::epanechnikov, 0.1),
          KernelSpec::rkhs_gaussian(0.2)};
}

inline MarkedPool random_pool(Stream& rng, std::size_t size, double lo = 0.0,
                              double hi = 1.0) {
  MarkedPool p;
  for (std::size_t i = 0; i < size; ++i) {
    p.points.push_back(lo + (hi - lo) * rng.uniform());
    p.marks.push_back((rng() & 1) ? Sign{1} : Sign{-1});
  }
  return p;
}

inline double naive_statistic(const KernelSpec& spec, std::span<const double> x,
                              std::span<const Sign> e) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i != j) acc += (eval(spec, x[i], x[j]) * e[i]) * static_cast<double>(e[j]);
    }
  }
  return acc + 0.0;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

/// One-sample KS distance against a CDF.
template <typename Cdf>
double ks_one_sample(std::vector<double> x, Cdf&& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic one-sample KS critical value at level 0.001.
inline double ks_one_sample_crit_001(std::size_t n) {
  return 1.9495 / std::sqrt(static_cast<double>(n));
}

}  // namespace pptest::testing
