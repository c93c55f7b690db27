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

#include <cstring>
#include <vector>

#include "doctest.h"
#include "pptest/chaos_engine.hpp"
#include "pptest/intensity.hpp"
#include "pptest/simd/chaos.hpp"
#include "pptest/single_test.hpp"
#include "support.hpp"

using namespace pptest;

namespace {

const simd::Isa kAll[] = {simd::Isa::scalar, simd::Isa::avx2, simd::Isa::avx512,
                          simd::Isa::neon};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar variant is always available") {
    CHECK(simd::isa_available(simd::Isa::scalar));
    CHECK(simd::isa_available(simd::best_isa()));
    MESSAGE("best variant: " << simd::isa_name(simd::best_isa()));
  }

  TEST_CASE("sign panels hold +-1 and pad with +1") {
    const auto s = draw_sign_panels(7, 70, 3);
    CHECK(s.points() == 7);
    CHECK(s.replicates() == 70);
    CHECK(s.panels() == 2);
    for (std::size_t b = 0; b < 128; ++b) {
      for (std::size_t i = 0; i < 7; ++i) {
        const double v = s.sign(i, b);
        if (b >= 70) {
          CHECK(v == 1.0);
        } else {
          CHECK_UNARY(v == 1.0 || v == -1.0);
        }
      }
    }
  }

  TEST_CASE("sign draws are prefix stable") {
    const auto a = draw_sign_panels(30, 100, 9);
    const auto b = draw_sign_panels(30, 1000, 9);
    for (std::size_t r = 0; r < 100; ++r) {
      for (std::size_t i = 0; i < 30; ++i) CHECK(a.sign(i, r) == b.sign(i, r));
    }
  }

  TEST_CASE("every variant matches the scalar reference bit for bit") {
    Stream rng(4);
    const std::size_t sizes[] = {0, 1, 2, 3, 7, 8, 15, 16, 17, 31, 33, 64, 65, 129, 203};
    for (const auto& k : testing::all_variants()) {
      for (std::size_t n : sizes) {
        CAPTURE(k.name());
        CAPTURE(n);
        const auto p = testing::random_pool(rng, n, -0.05, 1.05).sorted();
        const auto g = gram(k, p.points);
        const auto signs = draw_sign_panels(n, 150, rng());
        const auto ref = gram_replicates(g, signs, simd::Isa::scalar);
        for (auto isa : kAll) {
          if (!simd::isa_available(isa)) continue;
          CAPTURE(simd::isa_name(isa));
          CHECK(same_bits(gram_replicates(g, signs, isa), ref));
        }
      }
    }
  }

  TEST_CASE("replicates equal the naive statistic under each sign vector") {
    Stream rng(5);
    for (const auto& k : testing::all_variants()) {
      const auto p = testing::random_pool(rng, 40).sorted();
      const auto g = gram(k, p.points);
      const auto signs = draw_sign_panels(40, 70, 77);
      const auto reps = gram_replicates(g, signs, simd::best_isa());
      for (std::size_t b = 0; b < 70; ++b) {
        std::vector<Sign> e(40);
        for (std::size_t i = 0; i < 40; ++i) e[i] = signs.sign(i, b) > 0 ? 1 : -1;
        CHECK(reps[b] == statistic(g, e));
      }
    }
  }

  TEST_CASE("unavailable variants refuse to run") {
    for (auto isa : kAll) {
      if (simd::isa_available(isa)) continue;
      const auto g = gram(KernelSpec::haar_nested(1), std::vector<double>{0.1, 0.2});
      const auto signs = draw_sign_panels(2, 4, 1);
      CHECK_THROWS(gram_replicates(g, signs, isa));
    }
  }

  TEST_CASE("haar cell-sum path equals the gram path exactly") {
    std::vector<KernelSpec> ks;
    for (int j = 0; j <= 7; ++j) ks.push_back(KernelSpec::haar_nested(j));
    ks.push_back(KernelSpec::haar_single(HaarIndex::scaling()));
    for (int j = 0; j < 6; ++j) {
      for (long k = 0; k < (1L << j); ++k) {
        ks.push_back(KernelSpec::haar_single(HaarIndex::wavelet(j, k)));
      }
    }
    Stream rng(6);
    for (const char* model : {"f1", "laplace:7", "g2:15"}) {
      CAPTURE(model);
      const auto f = IntensityModel::parse(model);
      auto p = pool(simulate(f, 60.0, rng), simulate(f, 60.0, rng));
      // Boundary points: 1.0 feeds only the scaling function; points
      // outside [0,1] feed nothing.
      p.points.push_back(1.0);
      p.marks.push_back(1);
      p.points.push_back(0.5);
      p.marks.push_back(-1);
      p.points.push_back(0.0);
      p.marks.push_back(1);
      p = p.sorted();
      const auto signs = draw_sign_panels(p.size(), 130, rng());
      const auto fast = evaluate_haar(ks, p.points, p.marks, signs);
      for (std::size_t m = 0; m < ks.size(); ++m) {
        CAPTURE(ks[m].name());
        const auto g = gram(ks[m], p.points);
        CHECK(fast.observed[m] == statistic(g, p.marks));
        const auto reps = gram_replicates(g, signs, simd::Isa::scalar);
        const auto got = fast.member(m);
        CHECK(same_bits(std::vector<double>(got.begin(), got.end()), reps));
      }
    }
  }

  TEST_CASE("mixed collections route each kernel consistently") {
    Stream rng(7);
    const auto p = testing::random_pool(rng, 50).sorted();
    const auto ks = testing::all_variants();
    const auto signs = draw_sign_panels(50, 64, 5);
    const auto table = evaluate_chaos(ks, p.points, p.marks, signs);
    CHECK(table.members == ks.size());
    CHECK(table.count == 64);
    for (std::size_t m = 0; m < ks.size(); ++m) {
      const auto g = gram(ks[m], p.points);
      CHECK(table.observed[m] == statistic(g, p.marks));
      const auto reps = gram_replicates(g, signs, simd::Isa::scalar);
      const auto got = table.member(m);
      CHECK(same_bits(std::vector<double>(got.begin(), got.end()), reps));
    }
  }
}
