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

#include <bit>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "s2ap/error.hpp"
#include "s2ap/maskconv.hpp"

using namespace s2ap;
using testing::random_mask;
using testing::random_matrix;
using testing::random_tensor;

TEST_CASE("im2col") {
  Tensor one(1, 1, 1, 5.0f);
  BasicMatrix<float> m = im2col(one, {1, 1, 1, 1, 0});
  CHECK(m.rows == 1);
  CHECK(m.cols == 1);
  CHECK(m.at(0, 0) == 5.0f);

  Tensor ones(1, 3, 3, 1.0f);
  m = im2col(ones, {1, 1, 3, 1, 1});
  REQUIRE(m.rows == 9);
  REQUIRE(m.cols == 9);
  for (int k = 0; k < 9; ++k) CHECK(m.at(4, k) == 1.0f);
  for (int corner : {0, 2, 6, 8}) {
    int n = 0;
    for (int k = 0; k < 9; ++k) n += m.at(corner, k) == 1.0f;
    CHECK(n == 4);
  }
  // Top-left window: the taps at ky = 0 or kx = 0 fall outside.
  CHECK(m.at(0, 0) == 0.0f);
  CHECK(m.at(0, 8) == 1.0f);

  Tensor wide(2, 7, 9, 1.0f);
  const ConvSpec s2{2, 4, 3, 2, 1};
  m = im2col(wide, s2);
  CHECK(m.rows == s2.out_height(7) * s2.out_width(9));
  CHECK(m.rows == 4 * 5);
  CHECK(m.cols == 18);

  CHECK_THROWS_AS(im2col(wide, {3, 4, 3, 1, 1}), Error);
  CHECK_THROWS_AS(im2col(wide, {2, 4, 2, 1, 1}), Error);
  CHECK_THROWS_AS(im2col(Tensor(1, 2, 2), {1, 1, 5, 1, 0}), Error);
}

TEST_CASE("dense_conv") {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor<float>(rng, 1, 6, 7);
  WeightMatrix id(1, 1, 1.0f);
  CHECK(dense_conv(x, id, {1, 1, 1, 1, 0}) == x);

  const Tensor ones(1, 5, 5, 1.0f);
  const Tensor y = dense_conv(ones, WeightMatrix(1, 9, 1.0f), {1, 1, 3, 1, 1});
  CHECK(y.at(0, 2, 2) == 9.0f);
  CHECK(y.at(0, 0, 2) == 6.0f);
  CHECK(y.at(0, 2, 0) == 6.0f);
  CHECK(y.at(0, 0, 0) == 4.0f);
  CHECK(y.at(0, 4, 4) == 4.0f);

  const Tensor z = dense_conv(random_tensor<float>(rng, 3, 8, 8), WeightMatrix(4, 27), {3, 4, 3, 2, 1});
  for (float v : z.data) CHECK(v == 0.0f);

  CHECK_THROWS_AS(dense_conv(ones, WeightMatrix(2, 9), {1, 1, 3, 1, 1}), Error);
}

TEST_CASE("dense_conv agrees with direct convolution") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const ConvSpec s{1 + trial % 4, 1 + trial % 5, trial % 2 ? 3 : 5, 1 + trial % 3, trial % 3};
    const auto x = random_tensor<double>(rng, s.c_in, 9 + trial % 4, 11);
    const auto w = random_matrix<double>(rng, s.c_out, s.columns());
    const auto y = dense_conv(x, w, s);
    const auto ref = testing::naive_conv(x, w, s);
    REQUIRE(y.same_shape(ref));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("masked_conv") {
  std::mt19937_64 rng(3);
  const ConvSpec s{3, 5, 3, 1, 1};
  const Tensor x = random_tensor<float>(rng, 3, 12, 10);
  const WeightMatrix w = random_matrix<float>(rng, 5, 27);
  const Tensor dense = dense_conv(x, w, s);

  CHECK(masked_conv(x, w, s, ConvMask(12, 10, 1)) == dense);

  const Tensor empty = masked_conv(x, w, s, ConvMask(12, 10, 0));
  for (float v : empty.data) CHECK(v == 0.0f);

  CHECK_THROWS_AS(masked_conv(x, w, s, ConvMask(11, 10, 1)), Error);
}

TEST_CASE("masked_conv equals the masked dense output bitwise") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cin(1, 8), cout(1, 16), dim(1, 32), k(0, 2), st(1, 2);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int kernel = 1 + 2 * k(rng);
    const ConvSpec s{cin(rng), cout(rng), kernel, st(rng), kernel / 2};
    const Tensor x = random_tensor<float>(rng, s.c_in, dim(rng), dim(rng));
    const WeightMatrix w = random_matrix<float>(rng, s.c_out, s.columns());
    const int oh = s.out_height(x.height), ow = s.out_width(x.width);
    const ConvMask mask = random_mask(rng, oh, ow, p(rng));
    const Tensor dense = dense_conv(x, w, s);
    const Tensor masked = masked_conv(x, w, s, mask, 1 + trial % 3);
    for (int o = 0; o < s.c_out; ++o)
      for (int y = 0; y < oh; ++y)
        for (int xx = 0; xx < ow; ++xx) {
          const float want = mask.at(y, xx) ? dense.at(o, y, xx) : 0.0f;
          CHECK(std::bit_cast<std::uint32_t>(masked.at(o, y, xx)) ==
                std::bit_cast<std::uint32_t>(want));
        }
  }
}

TEST_CASE("convolution is linear") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ConvSpec s{2, 3, 3, 1 + trial % 2, 1};
    const Tensor a = random_tensor<float>(rng, 2, 10, 9);
    const Tensor b = random_tensor<float>(rng, 2, 10, 9);
    const WeightMatrix w = random_matrix<float>(rng, 3, 18);
    const float alpha = 0.75f, beta = -1.5f;
    Tensor mix = a;
    for (std::size_t i = 0; i < mix.size(); ++i) mix.data[i] = alpha * a.data[i] + beta * b.data[i];
    const Tensor lhs = dense_conv(mix, w, s);
    const Tensor ya = dense_conv(a, w, s), yb = dense_conv(b, w, s);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = alpha * ya.data[i] + beta * yb.data[i];
      CHECK(std::abs(lhs.data[i] - rhs) <= 1e-5 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(6);
  const ConvSpec s{4, 8, 3, 1, 1};
  const Tensor x = random_tensor<float>(rng, 4, 33, 29);
  const WeightMatrix w = random_matrix<float>(rng, 8, 36);
  const ConvMask mask = random_mask(rng, 33, 29, 0.3);
  const Tensor d1 = dense_conv(x, w, s, 1);
  const Tensor m1 = masked_conv(x, w, s, mask, 1);
  for (int workers : {2, 3, 7}) {
    CHECK(dense_conv(x, w, s, workers) == d1);
    CHECK(masked_conv(x, w, s, mask, workers) == m1);
  }
}

TEST_CASE("flops") {
  FlopCount f = flops({8, 16, 3, 1, 1}, 64, 64);
  CHECK(f.dense == 4718592);
  CHECK(f.masked == 4718592);

  ConvMask quarter(64, 64);
  for (int i = 0; i < 1024; ++i) quarter.cells[i] = 1;
  f = flops({8, 16, 3, 1, 1}, 64, 64, &quarter);
  CHECK(f.masked == 1179648);
  CHECK(f.density() == 0.25);
  CHECK(f.masked * 4 == f.dense);

  const ConvMask none(64, 64);
  CHECK(flops({8, 16, 3, 1, 1}, 64, 64, &none).masked == 0);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const ConvMask m = random_mask(rng, 17, 23, 0.4);
    const FlopCount g = flops({3, 7, 5, 1, 2}, 17, 23, &m);
    CHECK(g.masked * g.positions == g.active * g.dense);
  }
}

TEST_CASE("conv_backward") {
  std::mt19937_64 rng(9);
  {
    const ConvSpec s{2, 3, 3, 1, 1};
    const auto x = random_tensor<double>(rng, 2, 5, 5);
    const auto w = random_matrix<double>(rng, 3, 18);
    const auto g = conv_backward(x, w, s, BasicTensor<double>(3, 5, 5));
    for (double v : g.weights.data) CHECK(v == 0.0);
    for (double v : g.input.data) CHECK(v == 0.0);
  }
  {
    BasicTensor<double> x(1, 1, 1, 3.0);
    BasicMatrix<double> w(1, 1, 2.0);
    BasicTensor<double> dy(1, 1, 1, 0.5);
    const auto g = conv_backward(x, w, {1, 1, 1, 1, 0}, dy);
    CHECK(g.weights.data[0] == 1.5);
    CHECK(g.input.data[0] == 1.0);
  }
  CHECK_THROWS_AS(conv_backward(BasicTensor<double>(1, 4, 4), BasicMatrix<double>(1, 9),
                                ConvSpec{1, 1, 3, 1, 1}, BasicTensor<double>(1, 3, 4)),
                  Error);
}

TEST_CASE("conv_backward matches finite differences") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const ConvSpec s{2, 3, 3, 1 + trial % 2, 1};
    auto x = random_tensor<double>(rng, 2, 5, 5);
    auto w = random_matrix<double>(rng, 3, 18);
    const auto dy = random_tensor<double>(rng, 3, s.out_height(5), s.out_width(5));
    // Scalar objective <dy, conv(x, w)> has gradient conv_backward(.., dy).
    auto objective = [&] {
      const auto y = dense_conv(x, w, s);
      double acc = 0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += y.data[i] * dy.data[i];
      return acc;
    };
    const auto g = conv_backward(x, w, s, dy);
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      const double fd = testing::central_difference(w.data, i, 1e-3, objective);
      CHECK(testing::relative_error(g.weights.data[i], fd) <= 1e-3);
    }
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      const double fd = testing::central_difference(x.data, i, 1e-3, objective);
      CHECK(testing::relative_error(g.input.data[i], fd) <= 1e-3);
    }
  }
}
