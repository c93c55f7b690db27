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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pptest/aggregate.hpp"
#include "pptest/point_process.hpp"

namespace pptest {

/// Monte Carlo study settings. Test identifiers are "KS" or any collection
/// accepted by parse_collection ("Ne", "Th", "G", "E", "single:...").
struct StudyConfig {
  std::string f_model = "f1";
  std::string g_model = "f1";
  double n = 100.0;
  double alpha = 0.05;
  std::size_t n_sims = 1000;
  std::size_t b = 10000;
  std::vector<std::string> tests = {"Ne", "Th", "G", "E"};
  std::uint64_t master_seed = 1;
  double grid_step = kDefaultGridStep;
  /// Worker threads; has no effect on results.
  unsigned workers = 1;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Flat "key = value" text, one key per line, '#' comments. Keys are the
/// StudyConfig field names; tests is a comma-separated list. Unknown keys
/// are errors.
StudyConfig parse_study_config(std::string_view text);
StudyConfig read_study_config(const std::filesystem::path& path);
std::string to_config_text(const StudyConfig& config);

struct StudyRow {
  std::string test;
  std::size_t rejections = 0;
  std::size_t n_sims = 0;
  double proportion = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct StudyReport {
  StudyConfig config;
  std::vector<StudyRow> rows;
  double seconds = 0.0;
};

/// 99% interval p +- 2.576 sqrt(p (1 - p) / n), clamped to [0, 1].
StudyRow make_row(std::string test, std::size_t rejections, std::size_t n_sims);

/// Rejection rates under f = g. Throws when the models differ.
StudyReport level_study(const StudyConfig& config);
/// Rejection rates for arbitrary (f, g).
StudyReport power_study(const StudyConfig& config);

/// Per-simulation decisions, decisions[i * tests + t]; the building block
/// of both studies. Simulation i depends only on (master_seed, i).
std::vector<std::uint8_t> simulate_decisions(const StudyConfig& config);

/// Pool of simulation `index` of a study, exactly as the studies draw it.
MarkedPool study_pool(const StudyConfig& config, std::size_t index);

/// sup |F_a - F_b| over two samples (any order).
double ks_distance(std::span<const double> a, std::span<const double> b);
/// c(alpha) sqrt((n1 + n2) / (n1 n2)) with c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical(double alpha, std::size_t n1, std::size_t n2);
/// Two-sample KS between the +1 and -1 marked points; accepts when either
/// class is empty.
bool ks_baseline(const MarkedPool& pool, double alpha);

/// CSV (test,rejections,n_sims,proportion,ci_low,ci_high) at `path` and a
/// JSON sidecar with the configuration next to it (see sidecar_path).
void write_report(const StudyReport& report, const std::filesystem::path& path);
void write_report_csv(std::ostream& out, const StudyReport& report);
std::string report_json(const StudyReport& report);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

enum class Scale { desk, paper };
Scale parse_scale(std::string_view text);

/// Named experiments: "level-table", "fig1-left", "fig1-right",
/// "fig2-left", "fig2-right". One study per (f, g) case.
std::span<const std::string_view> experiment_names();
std::vector<StudyConfig> reproduce_plan(std::string_view experiment, Scale scale,
                                        std::uint64_t seed);
std::vector<StudyReport> reproduce(std::string_view experiment, Scale scale,
                                   std::uint64_t seed, unsigned workers);
/// One CSV for all cases: f,g followed by the write_report columns.
void write_reproduce_csv(std::ostream& out, std::span<const StudyReport> reports);
void write_reproduce(std::span<const StudyReport> reports, const std::filesystem::path& path);

}  // namespace pptest
