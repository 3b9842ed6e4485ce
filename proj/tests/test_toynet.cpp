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
#include "s2ap/scenes.hpp"
#include "s2ap/toynet.hpp"

using namespace s2ap;

namespace {

NetworkSpec two_layer(int bins) {
  NetworkSpec net;
  net.layers = {{{3, 4, 3, 2, 1}, Activation::kRelu}, {{4, bins, 3, 1, 1}, Activation::kNone}};
  return net;
}

// Marks the layer-(k-1) cells read by any active cell of layer k, walking
// back from the head; returns per-layer "fully supported" flags.
std::vector<BinaryGrid> supported_cells(const NetworkSpec& net, const std::vector<ConvMask>& masks,
                                        int in_h, int in_w) {
  // ok[k] marks layer-k outputs whose value equals the unmasked value.
  std::vector<BinaryGrid> ok;
  int h = in_h, w = in_w;
  BinaryGrid prev_ok;  // empty: the image itself is always exact
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const ConvSpec& s = net.layers[k].conv;
    const int oh = s.out_height(h), ow = s.out_width(w);
    BinaryGrid cur(oh, ow);
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        if (!masks[k].at(y, x)) continue;
        bool all = true;
        for (int ky = 0; ky < s.kernel && all; ++ky)
          for (int kx = 0; kx < s.kernel && all; ++kx) {
            const int iy = y * s.stride - s.padding + ky;
            const int ix = x * s.stride - s.padding + kx;
            if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
            if (k > 0 && !prev_ok.at(iy, ix)) all = false;
          }
        cur.at(y, x) = all;
      }
    ok.push_back(cur);
    prev_ok = cur;
    h = oh;
    w = ow;
  }
  return ok;
}

std::vector<Sample> fixture(int count, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.height = 64;
  cfg.width = 64;
  cfg.min_faces = 1;
  cfg.max_faces = 2;
  cfg.min_size = 12;
  cfg.max_size = 28;
  cfg.label_stride = 4;
  std::vector<Sample> data;
  for (const Scene& s : gen_scenes(count, cfg, seed)) {
    data.push_back({render_scene(s), render_labels(s.boxes(), 64, 64, 4)});
  }
  return data;
}

}  // namespace

TEST_CASE("standard network spec") {
  const NetworkSpec net = NetworkSpec::standard();
  CHECK(net.stride() == 4);
  CHECK_NOTHROW(net.validate(60));
  CHECK_THROWS_AS(net.validate(59), Error);
  NetworkSpec bad = net;
  bad.layers[1].conv.c_in = 7;
  CHECK_THROWS_AS(bad.validate(60), Error);
  bad = net;
  bad.layers.back().activation = Activation::kRelu;
  CHECK_THROWS_AS(bad.validate(60), Error);
}

TEST_CASE("forward") {
  const NetworkSpec net = NetworkSpec::standard();
  std::mt19937_64 rng(1);
  const Tensor image = testing::random_tensor<float>(rng, 3, 32, 24, 0.0, 1.0);

  Parameters zero = init_parameters<float>(net, 0);
  for (auto& w : zero.weights) std::fill(w.data.begin(), w.data.end(), 0.0f);
  for (auto& b : zero.biases) std::fill(b.begin(), b.end(), 0.0f);
  for (int o = 0; o < 60; ++o) zero.biases[2][o] = 0.01f * o;
  const LogitMaps<float> z = forward(net, zero, image);
  CHECK(z.channels == 60);
  CHECK(z.height == 8);
  CHECK(z.width == 6);
  for (int o = 0; o < 60; ++o)
    for (std::size_t r = 0; r < z.plane(); ++r) CHECK(z.data[o * z.plane() + r] == 0.01f * o);

  const Parameters p = init_parameters<float>(net, 42);
  const LogitMaps<float> dense = forward(net, p, image);
  const auto full = network_masks(net, BinaryGrid(16, 12, 1), 2);
  CHECK(forward(net, p, image, &full) == dense);

  std::vector<ConvMask> wrong = full;
  wrong.pop_back();
  CHECK_THROWS_AS(forward(net, p, image, &wrong), Error);
}

TEST_CASE("masked forward is exact where the receptive field is active") {
  const NetworkSpec net = NetworkSpec::standard();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor image = testing::random_tensor<float>(rng, 3, 40, 48, 0.0, 1.0);
    const Parameters p = init_parameters<float>(net, trial);
    BinaryGrid base(20, 24);
    std::uniform_int_distribution<int> y(0, 10), x(0, 14);
    for (int blob = 0; blob < 3; ++blob) {
      const int y0 = y(rng), x0 = x(rng);
      for (int dy = 0; dy < 10; ++dy)
        for (int dx = 0; dx < 10; ++dx) base.at(std::min(19, y0 + dy), std::min(23, x0 + dx)) = 1;
    }
    const auto masks = network_masks(net, base, 2);
    const auto ok = supported_cells(net, masks, 40, 48);
    const LogitMaps<float> dense = forward(net, p, image);
    const LogitMaps<float> masked = forward(net, p, image, &masks);
    std::size_t checked = 0;
    for (int o = 0; o < 60; ++o)
      for (int yy = 0; yy < dense.height; ++yy)
        for (int xx = 0; xx < dense.width; ++xx) {
          if (!ok.back().at(yy, xx)) continue;
          CHECK(masked.at(o, yy, xx) == dense.at(o, yy, xx));
          ++checked;
        }
    CHECK(checked > 0);
  }
}

TEST_CASE("mask_downsample") {
  CHECK(mask_downsample(BinaryGrid(6, 5, 1), 2) == BinaryGrid(3, 3, 1));
  CHECK(mask_downsample(BinaryGrid(6, 5, 0), 2) == BinaryGrid(3, 3, 0));
  BinaryGrid one(8, 8);
  one.at(5, 3) = 1;
  const ConvMask d = mask_downsample(one, 2);
  CHECK(d.count() == 1);
  CHECK(d.at(2, 1) == 1);
  CHECK(mask_downsample(one, 1) == one);
  CHECK_THROWS_AS(mask_downsample(one, 0), Error);
}

TEST_CASE("end-to-end gradients match finite differences") {
  ScaleMapConfig cfg;
  std::mt19937_64 rng(3);
  const NetworkSpec net = two_layer(cfg.num_bins);
  for (int trial = 0; trial < 3; ++trial) {
    const auto image = testing::random_tensor<double>(rng, 3, 8, 8, 0.0, 1.0);
    const AttentionMaps gt = render_labels({{1, 1, 7, 7}}, 8, 8, 2, {});
    auto params = init_parameters<double>(net, 100 + trial);
    for (auto& b : params.biases[0]) b = 0.1;
    const auto [value, grads] = loss_and_gradients(net, params, image, gt);
    CHECK(value == doctest::Approx(loss(forward(net, params, image), gt)));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
      for (std::size_t i = 0; i < params.weights[k].data.size(); i += 7) {
        const double fd = testing::central_difference(params.weights[k].data, i, 1e-5, [&] {
          return loss(forward(net, params, image), gt);
        });
        CHECK(testing::relative_error(grads.weights[k].data[i], fd) <= 1e-3);
      }
      for (std::size_t i = 0; i < params.biases[k].size(); ++i) {
        const double fd = testing::central_difference(params.biases[k], i, 1e-5, [&] {
          return loss(forward(net, params, image), gt);
        });
        CHECK(testing::relative_error(grads.biases[k][i], fd) <= 1e-3);
      }
    }
  }
}

TEST_CASE("train") {
  const NetworkSpec net = NetworkSpec::standard();
  const auto start = init_parameters<float>(net, 5);
  const auto data = fixture(2, 9);

  TrainConfig cfg;
  cfg.iterations = 0;
  CHECK(train(net, start, data, cfg).params == start);

  SUBCASE("all-zero labels push the head bias negative") {
    std::vector<Sample> blank = {{data[0].image, empty_attention(64, 64, 4)}};
    cfg.iterations = 30;
    cfg.learning_rate = 0.5;
    const auto r = train(net, start, blank, cfg);
    CHECK(r.loss_trace.back() < r.loss_trace.front());
    for (std::size_t i = 1; i < r.loss_trace.size(); ++i) CHECK(r.loss_trace[i] <= r.loss_trace[i - 1]);
    double mean_bias = 0;
    for (float b : r.params.biases.back()) mean_bias += b / 60.0;
    CHECK(mean_bias < 0.0);
  }

  SUBCASE("seeded runs are identical") {
    cfg.iterations = 5;
    cfg.batch_size = 1;
    cfg.seed = 77;
    const auto a = train(net, start, data, cfg);
    const auto b = train(net, start, data, cfg);
    CHECK(a.params == b.params);
    CHECK(a.loss_trace == b.loss_trace);
  }

  SUBCASE("divergence is reported") {
    cfg.iterations = 50;
    cfg.learning_rate = 1e30;
    try {
      train(net, start, data, cfg);
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kTrainingDiverged);
    }
  }

  cfg.learning_rate = -1;
  CHECK_THROWS_AS(train(net, start, data, cfg), Error);
}
