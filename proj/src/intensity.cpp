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

#include "pptest/intensity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "internal/parse.hpp"

namespace pptest {

namespace {

constexpr double kLaplaceTail = 40.0;  // e^-40 ~ 4e-18
constexpr double kGaussTail = 9.0;   // < 1e-18 mass beyond

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Signed antiderivative of (1 + |t - p| / w)^-4, zero at t = p.
double bump_primitive(double t, double p, double w) {
  const double d = std::fabs(t - p);
  const double v = (w / 3.0) * (1.0 - std::pow(1.0 + d / w, -3.0));
  return t >= p ? v : -v;
}

double bump_inverse(double v, double p, double w) {
  if (v >= 0.0) return p + w * (std::pow(1.0 - 3.0 * v / w, -1.0 / 3.0) - 1.0);
  return p - w * (std::pow(1.0 + 3.0 * v / w, -1.0 / 3.0) - 1.0);
}

double bump_sum(double x) {
  const auto& t = SpikeTable::standard();
  double s = 0.0;
  for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
    s += t.g[j] * std::pow(1.0 + std::fabs(x - t.p[j]) / t.w[j], -4.0);
  }
  return s;
}

double gamma_integer_shape(Stream& rng, int shape) {
  double s = 0.0;
  for (int i = 0; i < shape; ++i) s -= std::log(rng.uniform_open());
  return s;
}

std::vector<double> unit_breaks() { return {0.0, 1.0}; }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

const SpikeTable& SpikeTable::standard() {
  static const SpikeTable table{
      {0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81},
      {4, -4, 3, -3, 5, -5, 2, 4, -4, 2, -3},
      {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2},
      {0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008,
       0.005}};
  return table;
}

double normalize_g2(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("normalize_g2: eta must be >= 0");
  }
  const auto& t = SpikeTable::standard();
  double s = 0.0;
  for (std::size_t j = 0; j < SpikeTable::kSize; ++j) s += t.h[j] * (1.0 - t.p[j]);
  return 1.0 + eta * s;
}

StepFunction::StepFunction(std::vector<double> b, std::vector<double> v)
    : breaks(std::move(b)), heights(std::move(v)) {
  if (breaks.size() != heights.size() + 1 || heights.empty()) {
    throw std::invalid_argument("step function: need k+1 breaks for k heights");
  }
  cumulative.reserve(heights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (breaks[i + 1] < breaks[i]) {
      throw std::invalid_argument("step function: breaks must be nondecreasing");
    }
    if (!(heights[i] >= 0.0)) {
      throw std::invalid_argument("step function: heights must be >= 0");
    }
    acc += heights[i] * (breaks[i + 1] - breaks[i]);
    cumulative.push_back(acc);
  }
}

double StepFunction::integral_to(double x) const {
  if (x <= breaks.front()) return 0.0;
  if (x >= breaks.back()) return cumulative.back();
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - breaks.begin()) - 1;
  const double before = i == 0 ? 0.0 : cumulative[i - 1];
  return before + heights[i] * (x - breaks[i]);
}

double StepFunction::inverse(double mass) const {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), mass);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  if (i >= heights.size()) i = heights.size() - 1;
  while (heights[i] == 0.0 && i > 0) --i;  // only reachable at mass == total
  const double before = i == 0 ? 0.0 : cumulative[i - 1];
  const double x = breaks[i] + (mass - before) / heights[i];
  return std::clamp(x, breaks[i], breaks[i + 1]);
}

IntensityModel::IntensityModel(std::string name, Window window,
                               std::vector<double> params, Family family)
    : name_(std::move(name)),
      window_(window),
      params_(std::move(params)),
      family_(std::move(family)) {}

IntensityModel IntensityModel::uniform() {
  return IntensityModel("f1", {0.0, 1.0, true}, {}, Uniform{});
}

IntensityModel IntensityModel::beta(int a, int b) {
  if (a < 1 || b < 1) {
    throw std::invalid_argument("beta model: shapes must be integers >= 1");
  }
  const double inv = factorial(a + b - 1) / (factorial(a - 1) * factorial(b - 1));
  return IntensityModel("beta:" + std::to_string(a) + ":" + std::to_string(b),
                        {0.0, 1.0, true},
                        {static_cast<double>(a), static_cast<double>(b)},
                        Beta{a, b, inv});
}

IntensityModel IntensityModel::laplace(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("laplace model: rate must be > 0");
  }
  return IntensityModel("laplace:" + format_double(lambda),
                        {-INFINITY, INFINITY, false}, {lambda}, Laplace{lambda});
}

IntensityModel IntensityModel::blocks_local(double a, double eps) {
  if (!(a > 0.0 && a <= 0.5)) {
    throw std::invalid_argument("g1 model: need 0 < a <= 1/2");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("g1 model: need 0 <= eps <= 1");
  }
  StepFunction steps({0.0, a, 2.0 * a, 1.0}, {1.0 + eps, 1.0 - eps, 1.0});
  return IntensityModel("g1:" + format_double(a) + ":" + format_double(eps),
                        {0.0, 1.0, true}, {a, eps},
                        BlocksLocal{a, eps, std::move(steps)});
}

IntensityModel IntensityModel::blocks(double eta) {
  const double c2 = normalize_g2(eta);
  const auto& t = SpikeTable::standard();
  std::vector<double> breaks{0.0};
  std::vector<double> heights;
  double level = 1.0;
  for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
    heights.push_back(level / c2);
    breaks.push_back(t.p[j]);
    level += eta * t.h[j];
  }
  heights.push_back(level / c2);
  breaks.push_back(1.0);
  return IntensityModel("g2:" + format_double(eta), {0.0, 1.0, true}, {eta},
                        Blocks{eta, c2, StepFunction(breaks, heights)});
}

IntensityModel IntensityModel::bumps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("g3 model: need 0 <= eps <= 1");
  }
  const auto& t = SpikeTable::standard();
  Bumps f{eps, 0.0, 0.0, {}, {}};
  for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
    f.mass[j] = t.g[j] * (bump_primitive(1.0, t.p[j], t.w[j]) -
                          bump_primitive(0.0, t.p[j], t.w[j]));
    f.bump_integral += f.mass[j];
  }
  // Printed density before renormalisation: (1-eps) + eps * bumps / 0.284.
  f.z = (1.0 - eps) + eps * f.bump_integral / kPrintedBumpNormalizer;
  double acc = (1.0 - eps) / f.z;
  f.component_cdf.push_back(acc);
  for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
    acc += eps * f.mass[j] / (kPrintedBumpNormalizer * f.z);
    f.component_cdf.push_back(acc);
  }
  return IntensityModel("g3:" + format_double(eps), {0.0, 1.0, true}, {eps},
                        std::move(f));
}

IntensityModel IntensityModel::gaussian(double mean, double sd) {
  if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
    throw std::invalid_argument("gauss model: need finite mean and sd > 0");
  }
  return IntensityModel("gauss:" + format_double(mean) + ":" + format_double(sd),
                        {-INFINITY, INFINITY, false}, {mean, sd},
                        Gaussian{mean, sd});
}

IntensityModel IntensityModel::piecewise(std::vector<double> breaks,
                                         std::vector<double> heights) {
  StepFunction raw(breaks, heights);
  if (!(raw.total() > 0.0)) {
    throw std::invalid_argument("pc model: total mass must be positive");
  }
  std::string name = "pc:";
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    name += (i ? "," : "") + format_double(breaks[i]);
  }
  name += ":";
  for (std::size_t i = 0; i < heights.size(); ++i) {
    name += (i ? "," : "") + format_double(heights[i]);
  }
  const double total = raw.total();
  std::vector<double> params = breaks;
  for (auto& v : heights) v /= total;
  params.insert(params.end(), heights.begin(), heights.end());
  const Window window{breaks.front(), breaks.back(), true};
  return IntensityModel(std::move(name), window, std::move(params),
                        Piecewise{StepFunction(std::move(breaks), std::move(heights))});
}

IntensityModel IntensityModel::parse(std::string_view id) {
  const auto parts = internal::split(id, ':');
  const std::string_view head = parts.front();
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) {
      throw std::invalid_argument("intensity '" + std::string(id) +
                                  "': wrong number of parameters");
    }
  };
  if (head == "f1" || head == "uniform") {
    expect(1);
    return uniform();
  }
  if (head == "beta") {
    expect(3);
    return beta(internal::parse_int(parts[1]), internal::parse_int(parts[2]));
  }
  if (head == "laplace") {
    expect(2);
    return laplace(internal::parse_double(parts[1]));
  }
  if (head == "g1") {
    expect(3);
    return blocks_local(internal::parse_double(parts[1]),
                        internal::parse_double(parts[2]));
  }
  if (head == "g2") {
    expect(2);
    return blocks(internal::parse_double(parts[1]));
  }
  if (head == "g3") {
    expect(2);
    return bumps(internal::parse_double(parts[1]));
  }
  if (head == "gauss" || head == "g4") {
    expect(3);
    return gaussian(internal::parse_double(parts[1]),
                    internal::parse_double(parts[2]));
  }
  if (head == "pc") {
    expect(3);
    std::vector<double> b, v;
    for (auto s : internal::split(parts[1], ',')) b.push_back(internal::parse_double(s));
    for (auto s : internal::split(parts[2], ',')) v.push_back(internal::parse_double(s));
    return piecewise(std::move(b), std::move(v));
  }
  throw std::invalid_argument("unknown intensity '" + std::string(id) + "'");
}

double IntensityModel::eval(double x) const {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Beta>) {
          if (x < 0.0 || x > 1.0) return 0.0;
          return f.inv_beta * std::pow(x, f.a - 1) * std::pow(1.0 - x, f.b - 1);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return 0.5 * f.lambda * std::exp(-f.lambda * std::fabs(x - 0.5));
        } else if constexpr (std::is_same_v<T, BlocksLocal>) {
          if (x >= 0.0 && x < f.a) return 1.0 + f.eps;
          if (x >= f.a && x < 2.0 * f.a) return 1.0 - f.eps;
          if (x >= 2.0 * f.a && x < 1.0) return 1.0;
          return 0.0;
        } else if constexpr (std::is_same_v<T, Blocks>) {
          if (x < 0.0 || x > 1.0) return 0.0;
          const auto& t = SpikeTable::standard();
          double s = 1.0;
          for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
            const double sgn = x > t.p[j] ? 1.0 : (x < t.p[j] ? -1.0 : 0.0);
            s += f.eta * (t.h[j] / 2.0) * (1.0 + sgn);
          }
          return s / f.c2;
        } else if constexpr (std::is_same_v<T, Bumps>) {
          if (x < 0.0 || x > 1.0) return 0.0;
          return ((1.0 - f.eps) + f.eps * bump_sum(x) / kPrintedBumpNormalizer) / f.z;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double u = (x - f.mean) / f.sd;
          return std::exp(-0.5 * u * u) / (f.sd * std::sqrt(2.0 * std::numbers::pi));
        } else {
          const auto& s = f.steps;
          if (x < s.breaks.front() || x >= s.breaks.back()) return 0.0;
          const auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), x);
          return s.heights[static_cast<std::size_t>(it - s.breaks.begin()) - 1];
        }
      },
      family_);
}

double IntensityModel::cdf(double x) const {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return std::clamp(x, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, Beta>) {
          if (x <= 0.0) return 0.0;
          if (x >= 1.0) return 1.0;
          return boost::math::ibeta(f.a, f.b, x);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double d = x - 0.5;
          return d < 0.0 ? 0.5 * std::exp(f.lambda * d)
                         : 1.0 - 0.5 * std::exp(-f.lambda * d);
        } else if constexpr (std::is_same_v<T, BlocksLocal> ||
                             std::is_same_v<T, Blocks> ||
                             std::is_same_v<T, Piecewise>) {
          return f.steps.integral_to(x);
        } else if constexpr (std::is_same_v<T, Bumps>) {
          const double c = std::clamp(x, 0.0, 1.0);
          const auto& t = SpikeTable::standard();
          double b = 0.0;
          for (std::size_t j = 0; j < SpikeTable::kSize; ++j) {
            b += t.g[j] * (bump_primitive(c, t.p[j], t.w[j]) -
                           bump_primitive(0.0, t.p[j], t.w[j]));
          }
          return ((1.0 - f.eps) * c + f.eps * b / kPrintedBumpNormalizer) / f.z;
        } else {
          return boost::math::cdf(boost::math::normal(f.mean, f.sd), x);
        }
      },
      family_);
}

double IntensityModel::sample(Stream& rng) const {
  if (total_mass_ != 1.0) {
    throw std::invalid_argument("sample: model '" + name_ + "' is not normalised");
  }
  return std::visit(
      [&rng](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return rng.uniform();
        } else if constexpr (std::is_same_v<T, Beta>) {
          const double ga = gamma_integer_shape(rng, f.a);
          const double gb = gamma_integer_shape(rng, f.b);
          return ga / (ga + gb);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double u = rng.uniform_open();
          return u < 0.5 ? 0.5 + std::log(2.0 * u) / f.lambda
                         : 0.5 - std::log(2.0 * (1.0 - u)) / f.lambda;
        } else if constexpr (std::is_same_v<T, BlocksLocal> ||
                             std::is_same_v<T, Blocks> ||
                             std::is_same_v<T, Piecewise>) {
          return f.steps.inverse(rng.uniform() * f.steps.total());
        } else if constexpr (std::is_same_v<T, Bumps>) {
          const double u = rng.uniform() * f.component_cdf.back();
          const auto it =
              std::upper_bound(f.component_cdf.begin(), f.component_cdf.end(), u);
          const auto c = static_cast<std::size_t>(it - f.component_cdf.begin());
          if (c == 0) return rng.uniform();
          const std::size_t j = std::min(c - 1, SpikeTable::kSize - 1);
          const auto& t = SpikeTable::standard();
          const double lo = bump_primitive(0.0, t.p[j], t.w[j]);
          const double hi = bump_primitive(1.0, t.p[j], t.w[j]);
          const double v = lo + rng.uniform() * (hi - lo);
          return std::clamp(bump_inverse(v, t.p[j], t.w[j]), 0.0, 1.0);
        } else {
          const boost::math::normal law(f.mean, f.sd);
          return boost::math::quantile(law, rng.uniform_open());
        }
      },
      family_);
}

std::pair<double, double> IntensityModel::effective_support() const {
  if (const auto* l = std::get_if<Laplace>(&family_)) {
    return {0.5 - kLaplaceTail / l->lambda, 0.5 + kLaplaceTail / l->lambda};
  }
  if (const auto* g = std::get_if<Gaussian>(&family_)) {
    return {g->mean - kGaussTail * g->sd, g->mean + kGaussTail * g->sd};
  }
  return {window_.lo, window_.hi};
}

std::vector<double> IntensityModel::breakpoints() const {
  return std::visit(
      [](const auto& f) -> std::vector<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BlocksLocal> || std::is_same_v<T, Blocks> ||
                      std::is_same_v<T, Piecewise>) {
          return f.steps.breaks;
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return {0.5};
        } else if constexpr (std::is_same_v<T, Bumps>) {
          std::vector<double> b{0.0};
          const auto& t = SpikeTable::standard();
          b.insert(b.end(), t.p.begin(), t.p.end());
          b.push_back(1.0);
          return b;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {f.mean};
        } else {
          return unit_breaks();
        }
      },
      family_);
}

double IntensityModel::normalizer_discrepancy() const {
  if (const auto* b = std::get_if<Bumps>(&family_)) {
    return kPrintedBumpNormalizer / b->bump_integral - 1.0;
  }
  return 0.0;
}

}  // namespace pptest
