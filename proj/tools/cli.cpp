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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "pptest/aggregate.hpp"
#include "pptest/experiments.hpp"
#include "pptest/intensity.hpp"
#include "pptest/single_test.hpp"

namespace pptest::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs `f`, reporting bad parameter values as usage errors.
template <typename F>
auto checked(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

struct PoolSource {
  std::string pool_path;
  std::string f_model;
  std::string g_model;
  double n = 100.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--pool", pool_path, "Pool CSV (x,mark) to test");
    cmd.add_option("--f-model", f_model, "First intensity when simulating inline");
    cmd.add_option("--g-model", g_model, "Second intensity when simulating inline");
    cmd.add_option("--n", n, "Scale n for inline simulation")->capture_default_str();
    cmd.add_option("--seed", seed, "Seed for inline pools and sign draws")
        ->capture_default_str();
  }

  MarkedPool load() const {
    if (!pool_path.empty()) {
      if (!f_model.empty() || !g_model.empty()) {
        throw UsageError("--pool excludes --f-model/--g-model");
      }
      std::ifstream in(pool_path);
      if (!in) throw std::runtime_error("cannot open pool " + pool_path);
      return read_pool_csv(in);
    }
    if (f_model.empty() || g_model.empty()) {
      throw UsageError("give --pool or both --f-model and --g-model");
    }
    const auto f = checked([&] { return IntensityModel::parse(f_model); });
    const auto g = checked([&] { return IntensityModel::parse(g_model); });
    checked([&] {
      if (!(n > 0.0)) throw std::invalid_argument("--n must be positive");
      return 0;
    });
    Stream rf(derive_seed(seed, tag_of("f")));
    Stream rg(derive_seed(seed, tag_of("g")));
    const auto pf = simulate(f, n, rf);
    const auto pg = simulate(g, n, rg);
    return pool(pf, pg);
  }

  Stream sign_stream() const { return Stream(derive_seed(seed, tag_of("signs"))); }
};

struct StudyFlags {
  std::string config_path;
  std::string model;
  std::string f_model;
  std::string g_model;
  std::optional<double> n;
  std::optional<double> alpha;
  std::optional<std::size_t> n_sims;
  std::optional<std::size_t> b;
  std::optional<std::string> tests;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  unsigned workers = 1;
  std::string out;

  void add_to(CLI::App& cmd, bool level) {
    cmd.add_option("--config", config_path, "Flat key = value study config");
    if (level) {
      cmd.add_option("--model", model, "Intensity under the null (f = g)");
    } else {
      cmd.add_option("--f-model", f_model, "First intensity");
      cmd.add_option("--g-model", g_model, "Second intensity");
    }
    cmd.add_option("--n", n, "Scale n (default 100)");
    cmd.add_option("--alpha", alpha, "Level (default 0.05)");
    cmd.add_option("--n-sims", n_sims, "Number of simulations (default 1000)");
    cmd.add_option("--b", b, "Bootstrap replicates, even (default 10000)");
    cmd.add_option("--tests", tests, "Comma-separated tests (default Ne,Th,G,E)");
    cmd.add_option("--seed", seed, "Master seed (default 1)");
    cmd.add_option("--grid-step", grid_step, "u_alpha grid step (default 2^-16)");
    cmd.add_option("--workers", workers, "Worker threads")->capture_default_str();
    cmd.add_option("--out", out, "CSV report path (JSON sidecar alongside)");
  }

  StudyConfig build() const {
    return checked([&] {
      StudyConfig c;
      if (!config_path.empty()) c = read_study_config(config_path);
      if (!model.empty()) c.f_model = c.g_model = model;
      if (!f_model.empty()) c.f_model = f_model;
      if (!g_model.empty()) c.g_model = g_model;
      if (n) c.n = *n;
      if (alpha) c.alpha = *alpha;
      if (n_sims) c.n_sims = *n_sims;
      if (b) c.b = *b;
      if (tests) {
        std::string text = "tests = " + *tests;
        c.tests = parse_study_config(text).tests;
      }
      if (seed) c.master_seed = *seed;
      if (grid_step) c.grid_step = *grid_step;
      c.workers = std::max(1u, workers);
      c.validate();
      return c;
    });
  }
};

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel two-sample tests for Poisson process intensities", "pptest"};
  app.require_subcommand(1);

  // simulate
  std::string sim_model;
  std::string sim_g_model;
  double sim_n = 100.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a pattern or a marked pool");
  simulate_cmd->add_option("--model", sim_model, "Intensity model")->required();
  simulate_cmd->add_option("--g-model", sim_g_model,
                           "Second intensity; writes a marked pool (x,mark)");
  simulate_cmd->add_option("--n", sim_n, "Scale n")->capture_default_str();
  simulate_cmd->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  simulate_cmd->add_option("--out", sim_out, "Output CSV (stdout if absent)");

  // test
  PoolSource test_src;
  std::string test_kernel;
  double test_alpha = 0.05;
  std::size_t test_b = 10000;
  auto* test_cmd = app.add_subcommand("test", "Single kernel test");
  test_cmd->add_option("--kernel", test_kernel, "Kernel, e.g. gauss:h=0.125")->required();
  test_cmd->add_option("--alpha", test_alpha, "Level")->capture_default_str();
  test_cmd->add_option("--b", test_b, "Bootstrap replicates")->capture_default_str();
  test_src.add_to(*test_cmd);

  // multi-test
  PoolSource multi_src;
  std::string multi_collection;
  double multi_alpha = 0.05;
  std::size_t multi_b = 10000;
  double multi_step = kDefaultGridStep;
  auto* multi_cmd = app.add_subcommand("multi-test", "Aggregated test over a collection");
  multi_cmd->add_option("--collection", multi_collection, "Ne, Th, G, E or single:<kernel>")
      ->required();
  multi_cmd->add_option("--alpha", multi_alpha, "Level")->capture_default_str();
  multi_cmd->add_option("--b", multi_b, "Bootstrap replicates, even")->capture_default_str();
  multi_cmd->add_option("--grid-step", multi_step, "u_alpha grid step")->capture_default_str();
  multi_src.add_to(*multi_cmd);

  // level-study / power-study
  StudyFlags level_flags;
  auto* level_cmd = app.add_subcommand("level-study", "Rejection rates under f = g");
  level_flags.add_to(*level_cmd, true);
  StudyFlags power_flags;
  auto* power_cmd = app.add_subcommand("power-study", "Rejection rates under (f, g)");
  power_flags.add_to(*power_cmd, false);

  // reproduce
  std::string experiment;
  std::string scale = "desk";
  std::uint64_t rep_seed = 1;
  unsigned rep_workers = 1;
  std::string rep_out;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run a named experiment");
  std::vector<std::string> names(experiment_names().begin(), experiment_names().end());
  reproduce_cmd->add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(names));
  reproduce_cmd->add_option("--scale", scale, "desk or paper")
      ->capture_default_str()
      ->check(CLI::IsMember({"desk", "paper"}));
  reproduce_cmd->add_option("--seed", rep_seed, "Master seed")->capture_default_str();
  reproduce_cmd->add_option("--workers", rep_workers, "Worker threads")->capture_default_str();
  reproduce_cmd->add_option("--out", rep_out, "CSV path (default <experiment>.csv)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) {
      const auto f = checked([&] { return IntensityModel::parse(sim_model); });
      if (!(sim_n > 0.0)) throw UsageError("--n must be positive");
      std::optional<IntensityModel> g;
      if (!sim_g_model.empty()) g = checked([&] { return IntensityModel::parse(sim_g_model); });
      Stream rf(derive_seed(sim_seed, tag_of("f")));
      const auto pf = simulate(f, sim_n, rf);
      std::ostringstream csv;
      if (g) {
        Stream rg(derive_seed(sim_seed, tag_of("g")));
        const auto pg = simulate(*g, sim_n, rg);
        write_pool_csv(csv, pool(pf, pg));
      } else {
        write_pattern_csv(csv, pf);
      }
      if (sim_out.empty()) {
        out << csv.str();
      } else {
        std::ofstream file(sim_out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + sim_out + " for writing");
        file << csv.str();
        if (!file.flush()) throw std::runtime_error("write failed: " + sim_out);
      }
    } else if (test_cmd->parsed()) {
      check_alpha(test_alpha);
      if (test_b < 1) throw UsageError("--b must be >= 1");
      const auto kernel = checked([&] { return KernelSpec::parse(test_kernel); });
      const auto p = test_src.load();
      Stream rs = test_src.sign_stream();
      out << to_json(run_single_test(kernel, p, test_alpha, test_b, rs)) << '\n';
    } else if (multi_cmd->parsed()) {
      check_alpha(multi_alpha);
      if (multi_b < 4 || multi_b % 2 != 0) throw UsageError("--b must be even and >= 4");
      if (!(multi_step > 0.0)) throw UsageError("--grid-step must be positive");
      const auto coll = checked([&] { return parse_collection(multi_collection); });
      if (!coll.summable()) {
        err << "note: weights of " << coll.name() << " have sum exp(-w) > 1\n";
      }
      const auto p = multi_src.load();
      Stream rs = multi_src.sign_stream();
      out << to_json(run_multi_test(coll, p, multi_alpha, multi_b, rs, multi_step)) << '\n';
    } else if (level_cmd->parsed() || power_cmd->parsed()) {
      const bool level = level_cmd->parsed();
      const StudyFlags& flags = level ? level_flags : power_flags;
      const StudyConfig cfg = flags.build();
      if (level && cfg.f_model != cfg.g_model) {
        throw UsageError("level-study needs f_model == g_model");
      }
      const StudyReport report = level ? level_study(cfg) : power_study(cfg);
      if (!flags.out.empty()) write_report(report, flags.out);
      out << report_json(report);
      err << "elapsed " << report.seconds << " s\n";
    } else if (reproduce_cmd->parsed()) {
      const Scale s = checked([&] { return parse_scale(scale); });
      const auto reports = reproduce(experiment, s, rep_seed, std::max(1u, rep_workers));
      const std::string path = rep_out.empty() ? experiment + ".csv" : rep_out;
      write_reproduce(reports, path);
      write_reproduce_csv(out, reports);
      double seconds = 0.0;
      for (const auto& r : reports) seconds += r.seconds;
      err << "wrote " << path << " in " << seconds << " s\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace pptest::cli
