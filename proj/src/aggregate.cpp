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

#include "pptest/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "internal/parse.hpp"
#include "json.hpp"
#include "pptest/single_test.hpp"

namespace pptest {

KernelCollection::KernelCollection(std::string name, std::vector<CollectionMember> members)
    : name_(std::move(name)), members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("kernel collection is empty");
  double mass = 0.0;
  for (const auto& m : members_) {
    if (!std::isfinite(m.weight) || m.weight < 0.0) {
      throw std::invalid_argument("collection weights must be finite and nonnegative");
    }
    mass += std::exp(-m.weight);
  }
  summable_ = mass <= 1.0 + 1e-12;
}

std::vector<KernelSpec> KernelCollection::kernels() const {
  std::vector<KernelSpec> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.kernel);
  return out;
}

std::vector<double> KernelCollection::weights() const {
  std::vector<double> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.weight);
  return out;
}

KernelCollection example1_nested(int j_bar) {
  if (j_bar < 1) throw std::invalid_argument("example1_nested: Jbar must be >= 1");
  const double c = std::log(std::numbers::pi / std::sqrt(6.0));
  std::vector<CollectionMember> members;
  for (int j = 0; j <= j_bar; ++j) {
    members.push_back({KernelSpec::haar_nested(j), 2.0 * (std::log(j + 1.0) + c)});
  }
  return {"Ne:Jbar=" + std::to_string(j_bar), std::move(members)};
}

KernelCollection example2_threshold(int j_tilde) {
  if (j_tilde < 1) throw std::invalid_argument("example2_threshold: Jtilde must be >= 1");
  if (j_tilde > 30) throw std::invalid_argument("example2_threshold: Jtilde too large");
  const double c = std::log(std::numbers::pi / std::sqrt(3.0));
  std::vector<CollectionMember> members;
  members.push_back({KernelSpec::haar_single(HaarIndex::scaling()), std::numbers::ln2});
  for (int j = 0; j < j_tilde; ++j) {
    const double w = j * std::numbers::ln2 + 2.0 * (std::log(j + 1.0) + c);
    for (long k = 0; k < (1L << j); ++k) {
      members.push_back({KernelSpec::haar_single(HaarIndex::wavelet(j, k)), w});
    }
  }
  return {"Th:Jtilde=" + std::to_string(j_tilde), std::move(members)};
}

KernelCollection example4_bandwidths(SmoothingBase base, std::vector<double> bandwidths,
                                     std::vector<double> weights) {
  if (bandwidths.size() != weights.size()) {
    throw std::invalid_argument("example4_bandwidths: length mismatch");
  }
  std::vector<CollectionMember> members;
  for (std::size_t i = 0; i < bandwidths.size(); ++i) {
    if (!(bandwidths[i] > 0.0) || !std::isfinite(bandwidths[i])) {
      throw std::invalid_argument("example4_bandwidths: bandwidths must be positive");
    }
    members.push_back({KernelSpec::approximation(base, bandwidths[i]), weights[i]});
  }
  return {base == SmoothingBase::gaussian ? "G" : "E", std::move(members)};
}

std::span<const double> standard_bandwidths() {
  static const double kBandwidths[] = {1.0 / 24, 1.0 / 16, 1.0 / 12, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  return kBandwidths;
}

namespace {

int parse_level_arg(std::string_view text, std::string_view key, int fallback) {
  if (text.empty()) return fallback;
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || internal::trim(text.substr(0, eq)) != key) {
    throw std::invalid_argument("expected " + std::string(key) + "=<int>");
  }
  return internal::parse_int<int>(text.substr(eq + 1));
}

}  // namespace

KernelCollection parse_collection(std::string_view text) {
  text = internal::trim(text);
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "Ne") return example1_nested(parse_level_arg(rest, "Jbar", 7));
  if (head == "Th") return example2_threshold(parse_level_arg(rest, "Jtilde", 6));
  if ((head == "G" || head == "E") && rest.empty()) {
    const auto bw = standard_bandwidths();
    std::vector<double> b(bw.begin(), bw.end());
    std::vector<double> w(b.size(), 1.0 / static_cast<double>(b.size()));
    return example4_bandwidths(head == "G" ? SmoothingBase::gaussian
                                           : SmoothingBase::epanechnikov,
                               std::move(b), std::move(w));
  }
  if (head == "single" && !rest.empty()) {
    KernelSpec k = KernelSpec::parse(rest);
    std::string name = "single:" + k.name();
    return {std::move(name), {{std::move(k), 0.0}}};
  }
  throw std::invalid_argument("unknown collection: " + std::string(text));
}

namespace {

/// First-half sorted replicates and second-half rows for the u-search.
class Calibrator {
 public:
  Calibrator(const ChaosTable& table, std::span<const double> weights)
      : members_(table.members), half_(table.count / 2), weights_(weights) {
    if (weights.size() != table.members) {
      throw std::invalid_argument("weights and members differ in number");
    }
    if (half_ < 1) throw std::invalid_argument("too few replicates to split");
    sorted_.resize(members_ * half_);
    held_.resize(members_ * half_);
    for (std::size_t m = 0; m < members_; ++m) {
      const auto reps = table.member(m);
      std::copy(reps.begin(), reps.begin() + static_cast<std::ptrdiff_t>(half_),
                sorted_.begin() + static_cast<std::ptrdiff_t>(m * half_));
      std::sort(sorted_.begin() + static_cast<std::ptrdiff_t>(m * half_),
                sorted_.begin() + static_cast<std::ptrdiff_t>((m + 1) * half_));
      // Held-out half stored replicate-major for the any-member scan.
      for (std::size_t b = 0; b < half_; ++b) held_[b * members_ + m] = reps[half_ + b];
    }
  }

  double quantile(std::size_t m, double u) const {
    const double level = 1.0 - u * std::exp(-weights_[m]);
    return sorted_[m * half_ + quantile_rank(half_, level) - 1];
  }

  double exceedance(double u) const {
    std::vector<double> q(members_);
    for (std::size_t m = 0; m < members_; ++m) q[m] = quantile(m, u);
    std::size_t hits = 0;
    for (std::size_t b = 0; b < half_; ++b) {
      const double* row = held_.data() + b * members_;
      for (std::size_t m = 0; m < members_; ++m) {
        if (row[m] > q[m]) {
          ++hits;
          break;
        }
      }
    }
    return static_cast<double>(hits) / static_cast<double>(half_);
  }

  /// With summable weights every grid point above alpha is a candidate and
  /// alpha itself is the floor; otherwise the whole grid is searched and the
  /// smallest grid point is the floor.
  double search(double alpha, double step, SearchMode mode) const {
    double mass = 0.0;
    for (double w : weights_) mass += std::exp(-w);
    const bool floor_at_alpha = mass <= 1.0 + 1e-12;
    const double top = std::floor(1.0 / step);
    double lo_k = floor_at_alpha ? std::floor(alpha / step) + 1.0 : 1.0;
    const double fallback = floor_at_alpha ? alpha : std::min(step, 1.0);
    if (lo_k > top) return fallback;
    const auto ok = [&](double k) { return exceedance(k * step) <= alpha; };
    if (mode == SearchMode::exhaustive) {
      double best = -1.0;
      for (double k = lo_k; k <= top; k += 1.0) {
        if (ok(k)) best = k;
      }
      return best < 0.0 ? fallback : best * step;
    }
    if (!ok(lo_k)) return fallback;
    double hi_k = top;
    if (ok(hi_k)) return hi_k * step;
    // Invariant: ok(lo_k) and !ok(hi_k).
    while (hi_k - lo_k > 1.0) {
      const double mid = std::floor((lo_k + hi_k) / 2.0);
      (ok(mid) ? lo_k : hi_k) = mid;
    }
    return lo_k * step;
  }

 private:
  std::size_t members_;
  std::size_t half_;
  std::span<const double> weights_;
  std::vector<double> sorted_;
  std::vector<double> held_;
};

void check_search_args(double alpha, double grid_step) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw std::invalid_argument("grid_step must be positive");
  }
}

void check_b(std::size_t b) {
  if (b < 4 || b % 2 != 0) throw std::invalid_argument("b must be even and >= 4");
}

}  // namespace

double search_u_alpha(const ChaosTable& table, std::span<const double> weights,
                      double alpha, double grid_step, SearchMode mode) {
  check_search_args(alpha, grid_step);
  return Calibrator(table, weights).search(alpha, grid_step, mode);
}

double family_wise_exceedance(const ChaosTable& table, std::span<const double> weights,
                              double u) {
  return Calibrator(table, weights).exceedance(u);
}

double estimate_u_alpha(std::span<const GramMatrix> grams, std::span<const double> weights,
                        double alpha, std::size_t b, double grid_step, Stream& rng) {
  check_search_args(alpha, grid_step);
  check_b(b);
  if (grams.empty()) throw std::invalid_argument("no grams to calibrate");
  const std::size_t n = grams.front().size();
  for (const auto& g : grams) {
    if (g.size() != n) throw std::invalid_argument("grams differ in size");
  }
  const auto signs = draw_sign_panels(n, b, rng());
  ChaosTable table;
  table.members = grams.size();
  table.count = b;
  table.observed.assign(grams.size(), 0.0);
  table.replicates.reserve(grams.size() * b);
  for (const auto& g : grams) {
    const auto reps = gram_replicates(g, signs, simd::best_isa());
    table.replicates.insert(table.replicates.end(), reps.begin(), reps.end());
  }
  return search_u_alpha(table, weights, alpha, grid_step);
}

AggregateReport run_multi_test(const KernelCollection& collection, const MarkedPool& pool,
                               double alpha, std::size_t b, Stream& rng, double grid_step) {
  check_search_args(alpha, grid_step);
  check_b(b);
  const MarkedPool sorted = pool.sorted();
  const auto signs = draw_sign_panels(sorted.size(), b, rng());
  const auto kernels = collection.kernels();
  const auto weights = collection.weights();
  const ChaosTable table = evaluate_chaos(kernels, sorted.points, sorted.marks, signs);
  const Calibrator cal(table, weights);

  AggregateReport r;
  r.collection = collection.name();
  r.alpha = alpha;
  r.b = b;
  r.summable = collection.summable();
  r.u_alpha = cal.search(alpha, grid_step, SearchMode::bisection);
  for (std::size_t m = 0; m < kernels.size(); ++m) {
    MemberOutcome o;
    o.kernel = kernels[m].name();
    o.weight = weights[m];
    o.statistic = table.observed[m];
    o.quantile = cal.quantile(m, r.u_alpha);
    o.exceeded = o.statistic > o.quantile;
    r.reject = r.reject || o.exceeded;
    r.per_member.push_back(std::move(o));
  }
  return r;
}

std::string to_json(const AggregateReport& r) {
  nlohmann::ordered_json j;
  j["collection"] = r.collection;
  j["alpha"] = r.alpha;
  j["b"] = r.b;
  j["summable"] = r.summable;
  j["u_alpha"] = r.u_alpha;
  j["reject"] = r.reject;
  auto members = nlohmann::ordered_json::array();
  for (const auto& m : r.per_member) {
    nlohmann::ordered_json e;
    e["kernel"] = m.kernel;
    e["weight"] = m.weight;
    e["statistic"] = m.statistic;
    e["quantile"] = m.quantile;
    e["exceeded"] = m.exceeded;
    members.push_back(std::move(e));
  }
  j["per_member"] = std::move(members);
  return j.dump(2);
}

}  // namespace pptest
