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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pptest/chaos_engine.hpp"
#include "pptest/kernel.hpp"
#include "pptest/point_process.hpp"
#include "pptest/random.hpp"

namespace pptest {

struct CollectionMember {
  KernelSpec kernel;
  double weight = 0.0;
};

/// Weighted family of kernels tested jointly.
class KernelCollection {
 public:
  /// Throws on an empty member list or a negative or non-finite weight.
  KernelCollection(std::string name, std::vector<CollectionMember> members);

  const std::string& name() const { return name_; }
  const std::vector<CollectionMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  std::vector<KernelSpec> kernels() const;
  std::vector<double> weights() const;
  /// Whether sum_m exp(-w_m) <= 1.
  bool summable() const { return summable_; }

 private:
  std::string name_;
  std::vector<CollectionMember> members_;
  bool summable_ = false;
};

/// haar_nested(J), J = 0..j_bar, w_J = 2 (ln(J + 1) + ln(pi / sqrt 6)).
KernelCollection example1_nested(int j_bar);

/// haar_single(0) with w = ln 2 and haar_single(j, k) for j < j_tilde,
/// k < 2^j, with w = j ln 2 + 2 (ln(j + 1) + ln(pi / sqrt 3)).
KernelCollection example2_threshold(int j_tilde);

/// Approximation kernels over a bandwidth list.
KernelCollection example4_bandwidths(SmoothingBase base, std::vector<double> bandwidths,
                                     std::vector<double> weights);

/// {1/24, 1/16, 1/12, 1/8, 1/4, 1/2}.
std::span<const double> standard_bandwidths();

/// "Ne" / "Ne:Jbar=7", "Th" / "Th:Jtilde=6", "G", "E" (standard bandwidths,
/// w = 1/6 each) or "single:<kernel>" (one member, w = 0).
KernelCollection parse_collection(std::string_view text);

inline constexpr double kDefaultGridStep = 0x1p-16;

enum class SearchMode { bisection, exhaustive };

/// Largest grid point u = k * grid_step <= 1 whose family-wise exceedance,
/// estimated on the second half of the replicates against quantiles from
/// the first half, is <= alpha. When sum_m exp(-w_m) <= 1 the Bonferroni
/// bound makes alpha a valid floor: only points above alpha are searched
/// and alpha is returned if none qualifies. Otherwise all grid points are
/// searched and grid_step is returned if none qualifies.
double search_u_alpha(const ChaosTable& table, std::span<const double> weights,
                      double alpha, double grid_step,
                      SearchMode mode = SearchMode::bisection);

/// Family-wise exceedance estimate at level u (exposed for tests).
double family_wise_exceedance(const ChaosTable& table, std::span<const double> weights,
                              double u);

/// Draws b shared sign vectors from one rng draw and calibrates u_alpha.
/// Throws unless b is even and >= 4, 0 < alpha < 1 and grid_step > 0.
double estimate_u_alpha(std::span<const GramMatrix> grams, std::span<const double> weights,
                        double alpha, std::size_t b, double grid_step, Stream& rng);

struct MemberOutcome {
  std::string kernel;
  double weight = 0.0;
  double statistic = 0.0;
  double quantile = 0.0;
  bool exceeded = false;
};

struct AggregateReport {
  std::string collection;
  double alpha = 0.05;
  std::size_t b = 0;
  bool summable = true;
  double u_alpha = 0.05;
  std::vector<MemberOutcome> per_member;
  bool reject = false;
};

/// Aggregated test: member m rejects when its statistic strictly exceeds
/// the first-half quantile at 1 - u_alpha exp(-w_m); the test rejects when
/// any member does.
AggregateReport run_multi_test(const KernelCollection& collection, const MarkedPool& pool,
                               double alpha, std::size_t b, Stream& rng,
                               double grid_step = kDefaultGridStep);

std::string to_json(const AggregateReport& report);

}  // namespace pptest
