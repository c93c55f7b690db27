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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pptest {

/// Index of a Haar basis function on [0,1]: the scaling function phi_0
/// (level < 0) or the wavelet phi_(j,k) = 2^(j/2) psi(2^j x - k).
struct HaarIndex {
  int level = -1;
  long shift = 0;

  static HaarIndex scaling() { return {}; }
  static HaarIndex wavelet(int j, long k);
  bool is_scaling() const { return level < 0; }
  bool operator==(const HaarIndex&) const = default;
};

/// Projection onto span{phi_0} U {phi_(j,k) : j < levels}.
struct HaarNested {
  int levels = 0;
};
/// Projection onto a single Haar function.
struct HaarSingle {
  HaarIndex index;
};
enum class SmoothingBase { gaussian, epanechnikov };
/// (1/h) k((x - x') / h).
struct Approximation {
  SmoothingBase base = SmoothingBase::gaussian;
  double bandwidth = 1.0;
};
/// exp(-(x - x')^2 / (2 sigma^2)).
struct RkhsGaussian {
  double sigma = 1.0;
};

class KernelSpec {
 public:
  using Variant = std::variant<HaarNested, HaarSingle, Approximation, RkhsGaussian>;

  static KernelSpec haar_nested(int levels);
  static KernelSpec haar_single(HaarIndex index);
  static KernelSpec approximation(SmoothingBase base, double bandwidth);
  static KernelSpec rkhs_gaussian(double sigma);
  /// "haar:J=5", "haar1:j=3,k=2", "haar1:0", "gauss:h=0.125",
  /// "epan:h=0.25", "rkhs-gauss:sigma=0.2".
  static KernelSpec parse(std::string_view text);

  const Variant& variant() const { return v_; }
  bool is_haar() const {
    return std::holds_alternative<HaarNested>(v_) ||
           std::holds_alternative<HaarSingle>(v_);
  }
  /// Canonical string form; parse(name()) reproduces the spec.
  std::string name() const;

 private:
  explicit KernelSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

double haar_eval(HaarIndex index, double x);

double eval(const KernelSpec& spec, double x, double y);

/// haar_nested(levels) as the explicit sum over basis functions. Slow;
/// kept for cross-checking the same-cell closed form used by eval.
double haar_nested_basis_sum(int levels, double x, double y);

/// Dense symmetric kernel matrix on a point set. Row i's off-diagonal
/// nonzeros lie in [band_begin(i), band_end(i)); zeros outside are exact.
class GramMatrix {
 public:
  GramMatrix() = default;

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  std::span<const double> values() const { return values_; }
  std::size_t band_begin(std::size_t i) const { return band_[2 * i]; }
  std::size_t band_end(std::size_t i) const { return band_[2 * i + 1]; }

  friend GramMatrix gram(const KernelSpec& spec, std::span<const double> points);

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> band_;
};

GramMatrix gram(const KernelSpec& spec, std::span<const double> points);

/// Piecewise-constant function on the 2^level dyadic cells of [0,1).
struct DyadicStep {
  int level = 0;
  std::vector<double> values;

  double operator()(double x) const;
};

/// Orthogonal projection onto level-J piecewise constants, from the cell
/// integrals of s: value on cell c is 2^J * integral(c 2^-J, (c+1) 2^-J).
DyadicStep haar_project(const std::function<double(double, double)>& integral,
                        int levels);

}  // namespace pptest
