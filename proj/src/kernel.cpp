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

#include "pptest/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "internal/parse.hpp"
#include "pptest/intensity.hpp"

namespace pptest {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // (2 pi)^-1/2

double psi(double t) {
  if (t >= 0.0 && t < 0.5) return 1.0;
  if (t >= 0.5 && t < 1.0) return -1.0;
  return 0.0;
}

double scaling(double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; }

double wavelet_sign(HaarIndex idx, double x) {
  return psi(std::ldexp(x, idx.level) - static_cast<double>(idx.shift));
}

double haar_nested_cell_form(int levels, double x, double y) {
  if (scaling(x) == 0.0 || scaling(y) == 0.0) return 0.0;
  // Wavelets vanish at 1, leaving phi_0 only.
  if (x == 1.0 || y == 1.0) return 1.0;
  const double cx = std::floor(std::ldexp(x, levels));
  const double cy = std::floor(std::ldexp(y, levels));
  return cx == cy ? std::ldexp(1.0, levels) : 0.0;
}

std::string_view expect_key(std::string_view kv, std::string_view key,
                            std::string_view text) {
  const auto parts = internal::split(kv, '=');
  if (parts.size() != 2 || parts[0] != key) {
    throw std::invalid_argument("kernel '" + std::string(text) + "': expected " +
                                std::string(key) + "=<value>");
  }
  return parts[1];
}

}  // namespace

HaarIndex HaarIndex::wavelet(int j, long k) {
  if (j < 0 || j > 52 || k < 0 || k >= (1L << j)) {
    throw std::invalid_argument("haar index: need 0 <= k < 2^j");
  }
  return {j, k};
}

KernelSpec KernelSpec::haar_nested(int levels) {
  if (levels < 0 || levels > 52) {
    throw std::invalid_argument("haar_nested: levels must be in [0, 52]");
  }
  return KernelSpec(HaarNested{levels});
}

KernelSpec KernelSpec::haar_single(HaarIndex index) {
  if (!index.is_scaling()) index = HaarIndex::wavelet(index.level, index.shift);
  return KernelSpec(HaarSingle{index});
}

KernelSpec KernelSpec::approximation(SmoothingBase base, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("approximation kernel: bandwidth must be > 0");
  }
  return KernelSpec(Approximation{base, bandwidth});
}

KernelSpec KernelSpec::rkhs_gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("rkhs kernel: sigma must be > 0");
  }
  return KernelSpec(RkhsGaussian{sigma});
}

KernelSpec KernelSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("kernel '" + std::string(text) + "': missing ':'");
  }
  const auto head = internal::trim(text.substr(0, colon));
  const auto rest = internal::trim(text.substr(colon + 1));
  if (head == "haar") {
    return haar_nested(internal::parse_int(expect_key(rest, "J", text)));
  }
  if (head == "haar1") {
    if (rest == "0") return haar_single(HaarIndex::scaling());
    const auto kv = internal::split(rest, ',');
    if (kv.size() != 2) {
      throw std::invalid_argument("kernel '" + std::string(text) + "': expected j=,k=");
    }
    return haar_single(HaarIndex::wavelet(
        internal::parse_int(expect_key(kv[0], "j", text)),
        internal::parse_int<long>(expect_key(kv[1], "k", text))));
  }
  if (head == "gauss") {
    return approximation(SmoothingBase::gaussian,
                         internal::parse_double(expect_key(rest, "h", text)));
  }
  if (head == "epan") {
    return approximation(SmoothingBase::epanechnikov,
                         internal::parse_double(expect_key(rest, "h", text)));
  }
  if (head == "rkhs-gauss") {
    return rkhs_gaussian(internal::parse_double(expect_key(rest, "sigma", text)));
  }
  throw std::invalid_argument("unknown kernel '" + std::string(text) + "'");
}

std::string KernelSpec::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HaarNested>) {
          return "haar:J=" + std::to_string(k.levels);
        } else if constexpr (std::is_same_v<T, HaarSingle>) {
          if (k.index.is_scaling()) return "haar1:0";
          return "haar1:j=" + std::to_string(k.index.level) +
                 ",k=" + std::to_string(k.index.shift);
        } else if constexpr (std::is_same_v<T, Approximation>) {
          return (k.base == SmoothingBase::gaussian ? "gauss:h=" : "epan:h=") +
                 format_double(k.bandwidth);
        } else {
          return "rkhs-gauss:sigma=" + format_double(k.sigma);
        }
      },
      v_);
}

double haar_eval(HaarIndex index, double x) {
  if (index.is_scaling()) return scaling(x);
  const double amp = (index.level % 2 == 0)
                         ? std::ldexp(1.0, index.level / 2)
                         : std::ldexp(std::numbers::sqrt2, index.level / 2);
  return amp * wavelet_sign(index, x);
}

double eval(const KernelSpec& spec, double x, double y) {
  return std::visit(
      [x, y](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HaarNested>) {
          return haar_nested_cell_form(k.levels, x, y);
        } else if constexpr (std::is_same_v<T, HaarSingle>) {
          if (k.index.is_scaling()) return scaling(x) * scaling(y);
          // phi(x) phi(y) = 2^j psi(.) psi(.), without rounding sqrt(2)^2.
          return std::ldexp(wavelet_sign(k.index, x) * wavelet_sign(k.index, y),
                            k.index.level);
        } else if constexpr (std::is_same_v<T, Approximation>) {
          const double u = (x - y) / k.bandwidth;
          if (k.base == SmoothingBase::gaussian) {
            return kInvSqrt2Pi * std::exp(-0.5 * u * u) / k.bandwidth;
          }
          return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) / k.bandwidth : 0.0;
        } else {
          const double d = x - y;
          return std::exp(-(d * d) / (2.0 * k.sigma * k.sigma));
        }
      },
      spec.variant());
}

double haar_nested_basis_sum(int levels, double x, double y) {
  double s = haar_eval(HaarIndex::scaling(), x) * haar_eval(HaarIndex::scaling(), y);
  for (int j = 0; j < levels; ++j) {
    for (long k = 0; k < (1L << j); ++k) {
      const HaarIndex idx{j, k};
      s += haar_eval(idx, x) * haar_eval(idx, y);
    }
  }
  return s;
}

GramMatrix gram(const KernelSpec& spec, std::span<const double> points) {
  GramMatrix g;
  const std::size_t n = points.size();
  g.n_ = n;
  g.values_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = eval(spec, points[i], points[j]);
      g.values_[i * n + j] = v;
      g.values_[j * n + i] = v;
    }
  }
  g.band_.assign(2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = n, hi = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && g.values_[i * n + j] != 0.0) {
        lo = std::min(lo, j);
        hi = j + 1;
      }
    }
    if (hi > lo) {
      g.band_[2 * i] = lo;
      g.band_[2 * i + 1] = hi;
    }
  }
  return g;
}

double DyadicStep::operator()(double x) const {
  if (x < 0.0 || x >= 1.0) return 0.0;
  const auto c = static_cast<std::size_t>(std::floor(std::ldexp(x, level)));
  return values[c];
}

DyadicStep haar_project(const std::function<double(double, double)>& integral,
                        int levels) {
  if (levels < 0 || levels > 30) {
    throw std::invalid_argument("haar_project: levels must be in [0, 30]");
  }
  DyadicStep out;
  out.level = levels;
  const std::size_t cells = std::size_t{1} << levels;
  out.values.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = std::ldexp(static_cast<double>(c), -levels);
    const double b = std::ldexp(static_cast<double>(c + 1), -levels);
    out.values[c] = std::ldexp(integral(a, b), levels);
  }
  return out;
}

}  // namespace pptest
