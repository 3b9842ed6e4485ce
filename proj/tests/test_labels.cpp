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

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "s2ap/error.hpp"
#include "s2ap/labels.hpp"

using namespace s2ap;

namespace {

BBox centered_box(double cx, double cy, double size) {
  return {cx - size / 2, cy - size / 2, cx + size / 2, cy + size / 2};
}

}  // namespace

TEST_CASE("attention_center") {
  AttentionCenter c = attention_center({0, 0, 64, 64}, 16, 1024, 1024);
  CHECK(c.u == 2);
  CHECK(c.v == 2);

  c = attention_center({0, 0, 640, 480}, 480, 480, 640);
  CHECK(c.u == 0);
  CHECK(c.v == 0);

  c = attention_center({100, 100, 200, 200}, 10, 1024, 1024);
  CHECK(c.u == 15);
  CHECK(c.v == 15);
  CHECK(c.bin == size_to_bin(100, 1024).bin);

  // Partially outside: located by the clipped box.
  c = attention_center({-40, 0, 40, 80}, 10, 100, 100);
  CHECK(c.u == 2);
  CHECK(c.v == 4);

  try {
    attention_center({200, 200, 300, 300}, 10, 100, 100);
    FAIL("expected out-of-bounds");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOutOfBounds);
  }
}

TEST_CASE("render_labels") {
  SUBCASE("no boxes") {
    const AttentionMaps f = render_labels({}, 64, 48, 8);
    CHECK(f.maps.channels == 60);
    CHECK(f.maps.height == 8);
    CHECK(f.maps.width == 6);
    CHECK(std::all_of(f.maps.data.begin(), f.maps.data.end(), [](float v) { return v == 0; }));
  }

  SUBCASE("one face at bin 25") {
    const AttentionMaps f =
        render_labels({centered_box(512, 512, std::exp2(6.5))}, 1024, 1024, 16);
    const float expected[9] = {0.0625f, 0.125f, 0.25f, 0.5f, 1.0f, 0.5f, 0.25f, 0.125f, 0.0625f};
    for (int b = 1; b <= 60; ++b) {
      const float want = (b >= 21 && b <= 29) ? expected[b - 21] : 0.0f;
      CHECK(f.at(b, 32, 32) == want);
    }
    double total = 0;
    for (float v : f.maps.data) total += v;
    CHECK(total == doctest::Approx(1 + 2 * (0.5 + 0.25 + 0.125 + 0.0625)));
  }

  SUBCASE("overlapping spreads accumulate then clip") {
    // Same center cell, sizes in bins 25 and 26.
    const double s25 = std::exp2(6.5);
    const double s26 = std::exp2(6.6);
    const AttentionMaps f = render_labels(
        {centered_box(512, 512, s25), centered_box(512, 512, s26)}, 1024, 1024, 16);
    CHECK(f.at(25, 32, 32) == 1.0f);
    CHECK(f.at(26, 32, 32) == 1.0f);
    CHECK(f.at(27, 32, 32) == 0.75f);
    CHECK(f.at(24, 32, 32) == 0.75f);  // 0.5 + 0.25
    CHECK(f.at(30, 32, 32) == 0.0625f);
  }

  SUBCASE("spread is dropped past the end bins") {
    const AttentionMaps f = render_labels({centered_box(512, 512, 1024)}, 1024, 1024, 16);
    CHECK(f.at(60, 32, 32) == 1.0f);
    CHECK(f.at(56, 32, 32) == 0.0625f);
  }
}

TEST_CASE("render_labels properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0, 900), size(16, 300);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BBox> boxes;
    for (int i = 0; i < 4; ++i) {
      const double s = size(rng);
      const double x = std::min(pos(rng), 1024 - s), y = std::min(pos(rng), 1024 - s);
      boxes.push_back({x, y, x + s, y + s});
    }
    const AttentionMaps f = render_labels(boxes, 1024, 1024, 16);
    for (float v : f.maps.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    for (const BBox& b : boxes) {
      const AttentionCenter c = attention_center(b, 16, 1024, 1024);
      CHECK(f.at(c.bin, c.v, c.u) == 1.0f);
    }
    std::vector<BBox> shuffled = boxes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(render_labels(shuffled, 1024, 1024, 16).maps == f.maps);

    // An isolated face has a symmetric profile across bins.
    const AttentionMaps one = render_labels({boxes[0]}, 1024, 1024, 16);
    const AttentionCenter c = attention_center(boxes[0], 16, 1024, 1024);
    for (int i = 1; i <= 4; ++i) {
      if (c.bin - i >= 1 && c.bin + i <= 60) {
        CHECK(one.at(c.bin - i, c.v, c.u) == one.at(c.bin + i, c.v, c.u));
      }
    }
  }
}

TEST_CASE("loss values") {
  AttentionMaps gt = empty_attention(8, 8, 4, {});
  LogitMaps<double> logits(60, 2, 2, -50.0);
  CHECK(loss(logits, gt) <= 1e-9);

  std::fill(logits.data.begin(), logits.data.end(), 0.0);
  CHECK(loss(logits, gt) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  ScaleMapConfig tiny;
  tiny.num_bins = 1;
  AttentionMaps gt4 = empty_attention(2, 2, 1, tiny);
  gt4.maps.data = {1, 0, 0, 0};
  LogitMaps<double> z(1, 2, 2, -50.0);
  z.data[0] = 0.0;
  CHECK(loss(z, gt4) == doctest::Approx(std::log(2.0) / 4).epsilon(1e-9));

  // Large-magnitude logits stay finite.
  z.data = {1e4, -1e4, 1e4, -1e4};
  CHECK(std::isfinite(loss(z, gt4)));

  CHECK_THROWS_AS(loss(LogitMaps<double>(60, 3, 2), gt), Error);
  CHECK_THROWS_AS(loss_grad(LogitMaps<double>(59, 2, 2), gt), Error);
}

TEST_CASE("loss_grad closed forms") {
  ScaleMapConfig tiny;
  tiny.num_bins = 1;
  AttentionMaps half = empty_attention(2, 2, 1, tiny);
  std::fill(half.maps.data.begin(), half.maps.data.end(), 0.5f);
  for (double g : loss_grad(LogitMaps<double>(1, 2, 2, 0.0), half).data) CHECK(g == 0.0);

  AttentionMaps one = empty_attention(1, 1, 1, tiny);
  one.maps.data = {1.0f};
  CHECK(loss_grad(LogitMaps<double>(1, 1, 1, 0.0), one).data[0] == doctest::Approx(-0.5));
}

TEST_CASE("loss_grad matches central finite differences") {
  std::mt19937_64 rng(99);
  ScaleMapConfig three;
  three.num_bins = 3;
  for (int trial = 0; trial < 20; ++trial) {
    AttentionMaps gt = empty_attention(4, 4, 1, three);
    std::uniform_int_distribution<int> level(0, 4);
    for (auto& v : gt.maps.data) v = level(rng) / 4.0f;
    LogitMaps<double> z = testing::random_tensor<double>(rng, 3, 4, 4, -3.0, 3.0);
    const LogitMaps<double> g = loss_grad(z, gt);
    for (std::size_t i = 0; i < z.data.size(); ++i) {
      const double fd =
          testing::central_difference(z.data, i, 1e-3, [&] { return loss(z, gt); });
      CHECK(testing::relative_error(g.data[i], fd) <= 1e-4);
    }
  }
}

TEST_CASE("loss has a positive floor on soft targets") {
  AttentionMaps gt = render_labels({{0, 0, 90.5, 90.5}}, 128, 128, 16);
  LogitMaps<double> best(60, gt.maps.height, gt.maps.width);
  // Optimal logits equal logit(p); saturate the 0/1 cells.
  for (std::size_t i = 0; i < best.data.size(); ++i) {
    const double p = gt.maps.data[i];
    best.data[i] = p == 0 ? -60.0 : p == 1 ? 60.0 : std::log(p / (1 - p));
  }
  const double floor = loss(best, gt);
  CHECK(floor > 0.0);
  LogitMaps<double> worse = best;
  std::size_t soft = 0;
  while (gt.maps.data[soft] == 0.0f || gt.maps.data[soft] == 1.0f) ++soft;
  worse.data[soft] += 1.0;
  CHECK(loss(worse, gt) > floor);
}
