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

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pptest/random.hpp"

namespace pptest {

/// Location/height/width table of the wavelet-benchmark "blocks" and
/// "bumps" signals, as printed (11 entries each).
struct SpikeTable {
  static constexpr std::size_t kSize = 11;
  std::array<double, kSize> p;  // locations
  std::array<double, kSize> h;  // block jump heights
  std::array<double, kSize> g;  // bump heights
  std::array<double, kSize> w;  // bump widths

  static const SpikeTable& standard();
};

/// C2(eta): integral over [0,1] of 1 + eta * sum_j h_j 1{x > p_j}.
/// Throws std::invalid_argument for eta < 0.
double normalize_g2(double eta);

struct Window {
  double lo;
  double hi;
  bool bounded;  // false: the whole real line
};

/// Piecewise-constant density on consecutive intervals [breaks[i], breaks[i+1]).
struct StepFunction {
  std::vector<double> breaks;
  std::vector<double> heights;
  std::vector<double> cumulative;  // mass up to breaks[i + 1]

  StepFunction(std::vector<double> b, std::vector<double> v);
  double integral_to(double x) const;
  double inverse(double mass) const;
  double total() const { return cumulative.back(); }
};

/// A normalised benchmark intensity on a window. Immutable; cheap to copy.
class IntensityModel {
 public:
  static IntensityModel uniform();
  static IntensityModel beta(int a, int b);
  static IntensityModel laplace(double lambda);
  static IntensityModel blocks_local(double a, double eps);  // g1
  static IntensityModel blocks(double eta);                  // g2
  static IntensityModel bumps(double eps);                   // g3
  static IntensityModel gaussian(double mean, double sd);    // g4
  static IntensityModel piecewise(std::vector<double> breaks,
                                  std::vector<double> heights);

  /// Parses "f1", "beta:2:5", "laplace:7", "g1:0.25:1.0", "g2:15",
  /// "g3:0.5", "gauss:0.5:0.25" or "pc:0,0.5,1:3,1" (breaks:heights).
  static IntensityModel parse(std::string_view id);

  const std::string& name() const { return name_; }
  const Window& window() const { return window_; }
  const std::vector<double>& params() const { return params_; }
  double total_mass() const { return total_mass_; }

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  /// Integral of eval from -inf to x.
  double cdf(double x) const;
  double integral(double a, double b) const { return cdf(b) - cdf(a); }
  double sample(Stream& rng) const;

  /// Interval carrying all but a negligible (< 1e-15) part of the mass.
  std::pair<double, double> effective_support() const;
  /// Discontinuities and kinks, for splitting quadrature.
  std::vector<double> breakpoints() const;

  /// For g3: the printed normaliser divided by the exact bump integral,
  /// minus one. Zero for other families.
  double normalizer_discrepancy() const;

 private:
  struct Uniform {};
  struct Beta {
    int a, b;
    double inv_beta;
  };
  struct Laplace {
    double lambda;
  };
  struct BlocksLocal {
    double a, eps;
    StepFunction steps;
  };
  struct Blocks {
    double eta, c2;
    StepFunction steps;
  };
  struct Bumps {
    double eps, z;
    double bump_integral;
    std::array<double, SpikeTable::kSize> mass;  // per-bump mass on [0,1]
    std::vector<double> component_cdf;           // uniform, then bumps
  };
  struct Gaussian {
    double mean, sd;
  };
  struct Piecewise {
    StepFunction steps;
  };
  using Family = std::variant<Uniform, Beta, Laplace, BlocksLocal, Blocks,
                              Bumps, Gaussian, Piecewise>;

  IntensityModel(std::string name, Window window, std::vector<double> params,
                 Family family);

  std::string name_;
  Window window_;
  std::vector<double> params_;
  double total_mass_ = 1.0;
  Family family_;
};

/// The constant printed as the bump normaliser.
inline constexpr double kPrintedBumpNormalizer = 0.284;

/// Formats a double with the shortest round-tripping representation.
std::string format_double(double value);

}  // namespace pptest
