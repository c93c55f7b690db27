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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = pptest::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pptest_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"simulate"}).code == 2);
    CHECK(run({"simulate", "--model", "f1", "--bogus", "1"}).code == 2);
    CHECK(run({"simulate", "--model", "nope"}).code == 2);
    CHECK(run({"test", "--kernel", "zz", "--f-model", "f1", "--g-model", "f1"}).code == 2);
    CHECK(run({"test", "--kernel", "haar:J=2"}).code == 2);
    CHECK(run({"multi-test", "--collection", "E", "--alpha", "2", "--f-model", "f1",
               "--g-model", "f1"})
              .code == 2);
    CHECK(run({"multi-test", "--collection", "E", "--b", "7", "--f-model", "f1", "--g-model",
               "f1"})
              .code == 2);
    CHECK(run({"reproduce", "fig9"}).code == 2);
    CHECK(run({"reproduce", "level-table", "--scale", "huge"}).code == 2);
    CHECK(run({"level-study", "--model", "f1", "--tests", "XX"}).code == 2);
  }

  TEST_CASE("help lists the flags") {
    const auto r = run({"multi-test", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--collection", "--alpha", "--b", "--grid-step", "--pool",
                             "--seed", "--f-model", "--g-model", "--n"}) {
      CHECK(r.out.find(flag) != std::string::npos);
    }
    const auto top = run({"--help"});
    CHECK(top.code == 0);
    for (const char* sub : {"simulate", "test", "multi-test", "level-study", "power-study",
                            "reproduce"}) {
      CHECK(top.out.find(sub) != std::string::npos);
    }
  }

  TEST_CASE("runtime failures exit with 1") {
    CHECK(run({"test", "--kernel", "haar:J=2", "--pool", scratch("absent.csv").string()})
              .code == 1);
  }

  TEST_CASE("simulate writes patterns and pools") {
    const auto a = run({"simulate", "--model", "f1", "--n", "100", "--seed", "7"});
    CHECK(a.code == 0);
    CHECK(a.out.rfind("x\n", 0) == 0);
    const auto path = scratch("pool.csv");
    const auto b = run({"simulate", "--model", "f1", "--g-model", "g2:15", "--seed", "7",
                        "--out", path.string()});
    CHECK(b.code == 0);
    CHECK(slurp(path).rfind("x,mark\n", 0) == 0);
  }

  TEST_CASE("file round trip gives the in-memory decision") {
    const auto path = scratch("rt.csv");
    REQUIRE(run({"simulate", "--model", "f1", "--g-model", "g1:0.25:0.9", "--seed", "11",
                 "--out", path.string()})
                .code == 0);
    for (const std::string cmd : {"test", "multi-test"}) {
      std::vector<std::string> base{cmd};
      if (cmd == "test") {
        base.insert(base.end(), {"--kernel", "gauss:h=0.125"});
      } else {
        base.insert(base.end(), {"--collection", "E"});
      }
      base.insert(base.end(), {"--b", "2000", "--seed", "11"});
      auto from_file = base;
      from_file.insert(from_file.end(), {"--pool", path.string()});
      auto inline_args = base;
      inline_args.insert(inline_args.end(), {"--f-model", "f1", "--g-model", "g1:0.25:0.9"});
      const auto x = run(from_file);
      const auto y = run(inline_args);
      CHECK(x.code == 0);
      CHECK(x.out == y.out);
      const auto j = nlohmann::json::parse(x.out);
      CHECK(j.contains("reject"));
    }
  }

  TEST_CASE("flag order does not matter") {
    const auto a = run({"test", "--kernel", "haar:J=3", "--b", "500", "--seed", "4",
                        "--f-model", "f1", "--g-model", "g2:8"});
    const auto b = run({"test", "--g-model", "g2:8", "--seed", "4", "--f-model", "f1",
                        "--b", "500", "--kernel", "haar:J=3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("multi-test prints an aggregate report") {
    const auto r = run({"multi-test", "--collection", "Th", "--alpha", "0.05", "--b", "1000",
                        "--f-model", "f1", "--g-model", "g1:0.125:1", "--seed", "2"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["per_member"].size() == 64);
    CHECK(j["u_alpha"].get<double>() >= 0.05);
  }

  TEST_CASE("studies write csv reports") {
    const auto out = scratch("level.csv");
    const auto r = run({"level-study", "--model", "f1", "--tests", "KS,Ne", "--n-sims", "5",
                        "--b", "200", "--seed", "3", "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(slurp(out).rfind("test,rejections,n_sims,proportion,ci_low,ci_high\n", 0) == 0);
    CHECK(std::filesystem::exists(scratch("level.json")));

    const auto cfg = scratch("power.cfg");
    std::ofstream(cfg) << "f_model = f1\ng_model = g2:15\nn_sims = 4\nb = 200\ntests = KS,E\n";
    const auto p = run({"power-study", "--config", cfg.string(), "--workers", "2"});
    CHECK(p.code == 0);
    const auto j = nlohmann::json::parse(p.out);
    CHECK(j["config"]["g_model"] == "g2:15");
    CHECK(j["rows"].size() == 2);
    CHECK(run({"level-study", "--config", cfg.string()}).code == 2);
  }
}
