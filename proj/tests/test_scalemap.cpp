// Copyright (c) 2026 The S2AP Authors. All Rights Reserved.
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

#include <doctest.h>

#include <cmath>
#include <random>

#include "s2ap/error.hpp"
#include "s2ap/scalemap.hpp"

using namespace s2ap;

TEST_CASE("size_to_bin") {
  BinEstimate e = size_to_bin(std::exp2(6.5), 1024);
  CHECK(e.bin == 25);
  CHECK(e.raw == doctest::Approx(25.0));
  CHECK_FALSE(e.clamped);

  CHECK(size_to_bin(1024, 1024).bin == 60);

  e = size_to_bin(16, 1024);
  CHECK(e.raw == doctest::Approx(0.0));
  CHECK(e.bin == 1);
  CHECK(e.clamped);

  e = size_to_bin(4096, 1024);
  CHECK(e.bin == 60);
  CHECK(e.clamped);
  CHECK(e.raw == doctest::Approx(80.0));

  // Half the long side: the same face is twice as large relative to it.
  CHECK(size_to_bin(std::exp2(5.5), 512).bin == 25);

  CHECK_THROWS_AS(size_to_bin(0.0, 1024), Error);
  CHECK_THROWS_AS(size_to_bin(10.0, -1.0), Error);
}

TEST_CASE("bin_to_size") {
  CHECK(bin_to_size(25, 1024) == doctest::Approx(90.50966799187808));
  CHECK(bin_to_size(60, 1024) == doctest::Approx(1024.0));
  CHECK(bin_to_size(25, 512) == doctest::Approx(45.25483399593904));
  CHECK_THROWS_AS(bin_to_size(0, 1024), Error);
  CHECK_THROWS_AS(bin_to_size(61, 1024), Error);
}

TEST_CASE("zoom_target_length") {
  CHECK(zoom_target_length(std::exp2(6.5), 1024) == doctest::Approx(1024.0));
  CHECK(zoom_target_length(std::exp2(7.5), 1024) == doctest::Approx(512.0));
  CHECK(zoom_target_length(std::exp2(5.5), 1000) == doctest::Approx(2000.0));
  CHECK_THROWS_AS(zoom_target_length(0.0, 1024), Error);
  CHECK_THROWS_AS(zoom_target_length(10.0, 0.0), Error);
}

TEST_CASE("config validation") {
  ScaleMapConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.num_bins = 59;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.anchor_log2 = 7.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.s_max = 2048;
  cfg.num_bins = 70;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bin round trip for every bin and long side") {
  for (double l_max : {256.0, 512.0, 1024.0, 2048.0}) {
    for (int b = 1; b <= 60; ++b) CHECK(size_to_bin(bin_to_size(b, l_max), l_max).bin == b);
  }
}

TEST_CASE("size_to_bin is monotone and shifts one octave per doubling") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> log_size(3.0, 11.0);
  for (int i = 0; i < 500; ++i) {
    const double a = std::exp2(log_size(rng));
    const double b = std::exp2(log_size(rng));
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(size_to_bin(lo, 1024).bin <= size_to_bin(hi, 1024).bin);
    CHECK(size_to_bin(2 * a, 1024).raw - size_to_bin(a, 1024).raw == doctest::Approx(10.0));
  }
}

TEST_CASE("integer bin estimates still land inside the anchor range") {
  // The true size sits anywhere inside its bin, so an integer estimate off by
  // delta bins lands within one extra bin of the real-valued guarantee.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_size(4.5, 9.5);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp2(log_size(rng));
    const int b = size_to_bin(x, 1024).bin;
    for (int delta = -4; delta <= 4; ++delta) {
      if (b + delta < 1 || b + delta > 60) continue;
      const double zoomed = x * zoom_target_length(bin_to_size(b + delta, 1024), 1024) / 1024;
      CHECK(zoomed >= 64.0 * (1 - 1e-12));
      CHECK(zoomed <= 128.0 * (1 + 1e-12));
    }
  }
}
