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

#include "pptest/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "internal/parse.hpp"
#include "json.hpp"
#include "pptest/intensity.hpp"

namespace pptest {

void StudyConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n_sims < 1) throw std::invalid_argument("n_sims must be >= 1");
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("n must be positive");
  if (b < 4 || b % 2 != 0) throw std::invalid_argument("b must be even and >= 4");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  IntensityModel::parse(f_model);
  IntensityModel::parse(g_model);
  for (const auto& t : tests) {
    if (t != "KS") parse_collection(t);
  }
}

StudyConfig parse_study_config(std::string_view text) {
  StudyConfig c;
  std::size_t line_no = 0;
  for (std::string_view line : internal::split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = internal::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const auto key = internal::trim(line.substr(0, eq));
    const auto value = internal::trim(line.substr(eq + 1));
    if (key == "f_model") {
      c.f_model = std::string(value);
    } else if (key == "g_model") {
      c.g_model = std::string(value);
    } else if (key == "n") {
      c.n = internal::parse_double(value);
    } else if (key == "alpha") {
      c.alpha = internal::parse_double(value);
    } else if (key == "n_sims") {
      c.n_sims = internal::parse_int<std::size_t>(value);
    } else if (key == "b") {
      c.b = internal::parse_int<std::size_t>(value);
    } else if (key == "tests") {
      c.tests.clear();
      for (auto t : internal::split(value, ',')) {
        t = internal::trim(t);
        if (!t.empty()) c.tests.emplace_back(t);
      }
    } else if (key == "master_seed") {
      c.master_seed = internal::parse_int<std::uint64_t>(value);
    } else if (key == "grid_step") {
      c.grid_step = internal::parse_double(value);
    } else if (key == "workers") {
      c.workers = internal::parse_int<unsigned>(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

StudyConfig read_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

std::string to_config_text(const StudyConfig& c) {
  std::ostringstream out;
  out << "f_model = " << c.f_model << '\n'
      << "g_model = " << c.g_model << '\n'
      << "n = " << format_double(c.n) << '\n'
      << "alpha = " << format_double(c.alpha) << '\n'
      << "n_sims = " << c.n_sims << '\n'
      << "b = " << c.b << '\n'
      << "tests = ";
  for (std::size_t i = 0; i < c.tests.size(); ++i) out << (i ? "," : "") << c.tests[i];
  out << '\n'
      << "master_seed = " << c.master_seed << '\n'
      << "grid_step = " << format_double(c.grid_step) << '\n';
  return out.str();
}

StudyRow make_row(std::string test, std::size_t rejections, std::size_t n_sims) {
  StudyRow r;
  r.test = std::move(test);
  r.rejections = rejections;
  r.n_sims = n_sims;
  const double p = n_sims ? static_cast<double>(rejections) / static_cast<double>(n_sims) : 0.0;
  const double half = n_sims ? 2.576 * std::sqrt(p * (1.0 - p) / static_cast<double>(n_sims))
                             : 0.0;
  r.proportion = p;
  r.ci_low = std::max(0.0, p - half);
  r.ci_high = std::min(1.0, p + half);
  return r;
}

namespace {

MarkedPool draw_pool(const IntensityModel& f, const IntensityModel& g, double n,
                     std::uint64_t seed) {
  Stream rf(derive_seed(seed, tag_of("f")));
  Stream rg(derive_seed(seed, tag_of("g")));
  const auto pf = simulate(f, n, rf);
  const auto pg = simulate(g, n, rg);
  return pool(pf, pg).sorted();
}

}  // namespace

MarkedPool study_pool(const StudyConfig& config, std::size_t index) {
  return draw_pool(IntensityModel::parse(config.f_model), IntensityModel::parse(config.g_model),
                   config.n, derive_seed(config.master_seed, index));
}

std::vector<std::uint8_t> simulate_decisions(const StudyConfig& config) {
  config.validate();
  const auto f = IntensityModel::parse(config.f_model);
  const auto g = IntensityModel::parse(config.g_model);
  const std::size_t t_count = config.tests.size();
  std::vector<std::optional<KernelCollection>> collections;
  for (const auto& t : config.tests) {
    if (t == "KS") {
      collections.emplace_back();
    } else {
      collections.emplace_back(parse_collection(t));
    }
  }
  std::vector<std::uint8_t> decisions(config.n_sims * t_count, 0);

  const auto run_one = [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(config.master_seed, i);
    const MarkedPool p = draw_pool(f, g, config.n, seed);
    for (std::size_t t = 0; t < t_count; ++t) {
      bool reject = false;
      if (!collections[t]) {
        reject = ks_baseline(p, config.alpha);
      } else {
        Stream rs(derive_seed(seed, tag_of(config.tests[t])));
        reject = run_multi_test(*collections[t], p, config.alpha, config.b, rs,
                                config.grid_step)
                     .reject;
      }
      decisions[i * t_count + t] = reject ? 1 : 0;
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.workers,
                                      static_cast<unsigned>(config.n_sims)));
  if (workers == 1) {
    for (std::size_t i = 0; i < config.n_sims; ++i) run_one(i);
    return decisions;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool_threads;
    for (unsigned w = 0; w < workers; ++w) {
      pool_threads.emplace_back([&] {
        for (std::size_t i = next++; i < config.n_sims; i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = config.n_sims;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return decisions;
}

namespace {

StudyReport run_study(const StudyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto decisions = simulate_decisions(config);
  StudyReport report;
  report.config = config;
  const std::size_t t_count = config.tests.size();
  for (std::size_t t = 0; t < t_count; ++t) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < config.n_sims; ++i) hits += decisions[i * t_count + t];
    report.rows.push_back(make_row(config.tests[t], hits, config.n_sims));
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

StudyReport level_study(const StudyConfig& config) {
  if (config.f_model != config.g_model) {
    throw std::invalid_argument("level_study needs f_model == g_model");
  }
  return run_study(config);
}

StudyReport power_study(const StudyConfig& config) { return run_study(config); }

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(double alpha, std::size_t n1, std::size_t n2) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return c * std::sqrt((a + b) / (a * b));
}

bool ks_baseline(const MarkedPool& pool, double alpha) {
  const auto [plus, minus] = pool.split();
  if (plus.empty() || minus.empty()) return false;
  return ks_distance(plus, minus) > ks_critical(alpha, plus.size(), minus.size());
}

namespace {

void write_rows(std::ostream& out, const StudyRow& r) {
  out << r.test << ',' << r.rejections << ',' << r.n_sims << ','
      << format_double(r.proportion) << ',' << format_double(r.ci_low) << ','
      << format_double(r.ci_high) << '\n';
}

nlohmann::ordered_json config_json(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["f_model"] = c.f_model;
  j["g_model"] = c.g_model;
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["n_sims"] = c.n_sims;
  j["b"] = c.b;
  j["tests"] = c.tests;
  j["master_seed"] = c.master_seed;
  j["grid_step"] = c.grid_step;
  return j;
}

nlohmann::ordered_json rows_json(const StudyReport& report) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json e;
    e["test"] = r.test;
    e["rejections"] = r.rejections;
    e["n_sims"] = r.n_sims;
    e["proportion"] = r.proportion;
    e["ci_low"] = r.ci_low;
    e["ci_high"] = r.ci_high;
    rows.push_back(std::move(e));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_report_csv(std::ostream& out, const StudyReport& report) {
  out << "test,rejections,n_sims,proportion,ci_low,ci_high\n";
  for (const auto& r : report.rows) write_rows(out, r);
}

std::string report_json(const StudyReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_json(report.config);
  j["rows"] = rows_json(report);
  return j.dump(2) + "\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  if (p.extension() == ".json") return p += ".json";
  return p.replace_extension(".json");
}

void write_report(const StudyReport& report, const std::filesystem::path& path) {
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(path, csv.str());
  write_file(sidecar_path(path), report_json(report));
}

Scale parse_scale(std::string_view text) {
  if (text == "desk") return Scale::desk;
  if (text == "paper") return Scale::paper;
  throw std::invalid_argument("scale must be desk or paper");
}

std::span<const std::string_view> experiment_names() {
  static constexpr std::string_view kNames[] = {"level-table", "fig1-left", "fig1-right",
                                                "fig2-left", "fig2-right"};
  return kNames;
}

std::vector<StudyConfig> reproduce_plan(std::string_view experiment, Scale scale,
                                        std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> cases;
  bool level = false;
  if (experiment == "level-table") {
    level = true;
    cases = {{"f1", "f1"}, {"beta:2:5", "beta:2:5"}, {"laplace:7", "laplace:7"}};
  } else if (experiment == "fig1-left") {
    cases = {{"f1", "g1:0.25:0.7"}, {"f1", "g1:0.25:0.9"},
             {"f1", "g1:0.25:1"},   {"f1", "g1:0.125:1"}};
  } else if (experiment == "fig1-right") {
    cases = {{"f1", "g2:4"}, {"f1", "g2:8"}, {"f1", "g2:15"}};
  } else if (experiment == "fig2-left") {
    cases = {{"f1", "g3:0.5"}, {"f1", "g3:1"}};
  } else if (experiment == "fig2-right") {
    cases = {{"laplace:7", "gauss:0.5:0.25"}, {"laplace:10", "gauss:0.5:0.25"}};
  } else {
    throw std::invalid_argument("unknown experiment: " + std::string(experiment));
  }
  std::vector<StudyConfig> plan;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    StudyConfig cfg;
    cfg.f_model = cases[c].first;
    cfg.g_model = cases[c].second;
    cfg.n = 100.0;
    cfg.alpha = 0.05;
    cfg.tests = level ? std::vector<std::string>{"Ne", "Th", "G", "E"}
                      : std::vector<std::string>{"KS", "Ne", "Th", "G", "E"};
    cfg.n_sims = scale == Scale::paper ? (level ? 5000 : 1000) : 1000;
    cfg.b = scale == Scale::paper ? 400000 : 10000;
    cfg.master_seed = derive_seed(seed, c);
    plan.push_back(std::move(cfg));
  }
  return plan;
}

std::vector<StudyReport> reproduce(std::string_view experiment, Scale scale,
                                   std::uint64_t seed, unsigned workers) {
  std::vector<StudyReport> reports;
  for (auto cfg : reproduce_plan(experiment, scale, seed)) {
    cfg.workers = workers;
    reports.push_back(experiment == "level-table" ? level_study(cfg) : power_study(cfg));
  }
  return reports;
}

void write_reproduce_csv(std::ostream& out, std::span<const StudyReport> reports) {
  out << "f,g,test,rejections,n_sims,proportion,ci_low,ci_high\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      out << rep.config.f_model << ',' << rep.config.g_model << ',';
      write_rows(out, r);
    }
  }
}

void write_reproduce(std::span<const StudyReport> reports, const std::filesystem::path& path) {
  std::ostringstream csv;
  write_reproduce_csv(csv, reports);
  write_file(path, csv.str());
  auto studies = nlohmann::ordered_json::array();
  for (const auto& rep : reports) {
    nlohmann::ordered_json j;
    j["config"] = config_json(rep.config);
    j["rows"] = rows_json(rep);
    studies.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["studies"] = std::move(studies);
  write_file(sidecar_path(path), j.dump(2) + "\n");
}

}  // namespace pptest
