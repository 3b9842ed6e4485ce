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

#include "s2ap/labels.hpp"

#include <algorithm>
#include <cmath>

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

constexpr int kSpread = 4;
constexpr float kSpreadBase = 0.5f;

void check_shapes(int channels, int h, int w, const AttentionMaps& gt) {
  check_input(channels == gt.maps.channels && h == gt.maps.height && w == gt.maps.width,
              "logit and label shapes differ");
}

}  // namespace

AttentionMaps empty_attention(int image_height, int image_width, int stride,
                              const ScaleMapConfig& cfg) {
  check_input(image_height > 0 && image_width > 0, "image dims must be positive");
  check_input(stride > 0, "attention stride must be positive");
  AttentionMaps f;
  f.maps = Tensor(cfg.num_bins, ceil_div(image_height, stride), ceil_div(image_width, stride));
  f.stride = stride;
  f.image_height = image_height;
  f.image_width = image_width;
  return f;
}

AttentionCenter attention_center(const BBox& box, int stride, int image_height,
                                 int image_width, const ScaleMapConfig& cfg) {
  check_input(box.valid(), "attention_center needs a valid box");
  check_input(stride > 0 && image_height > 0 && image_width > 0,
              "stride and image dims must be positive");
  const BBox clipped{std::max(box.x_tl, 0.0), std::max(box.y_tl, 0.0),
                     std::min(box.x_dr, static_cast<double>(image_width)),
                     std::min(box.y_dr, static_cast<double>(image_height))};
  if (!clipped.valid()) {
    throw Error(ErrorKind::kOutOfBounds, "box lies entirely outside the image");
  }
  const int cells_w = ceil_div(image_width, stride);
  const int cells_h = ceil_div(image_height, stride);
  AttentionCenter c;
  c.u = static_cast<int>(std::floor((clipped.x_tl + clipped.x_dr) / (2.0 * stride)));
  c.v = static_cast<int>(std::floor((clipped.y_tl + clipped.y_dr) / (2.0 * stride)));
  c.u = std::clamp(c.u, 0, cells_w - 1);
  c.v = std::clamp(c.v, 0, cells_h - 1);
  const double l_max = std::max(image_height, image_width);
  c.bin = size_to_bin(face_size(box), l_max, cfg).bin;
  return c;
}

AttentionMaps render_labels(const std::vector<BBox>& boxes, int image_height,
                            int image_width, int stride, const ScaleMapConfig& cfg) {
  AttentionMaps f = empty_attention(image_height, image_width, stride, cfg);
  const int m = cfg.num_bins;
  for (const BBox& box : boxes) {
    const AttentionCenter c = attention_center(box, stride, image_height, image_width, cfg);
    for (int i = -kSpread; i <= kSpread; ++i) {
      const int bin = c.bin + i;
      if (bin < 1 || bin > m) continue;
      // Powers of 1/2 are exact in float, so the sum is order independent.
      f.maps.at(bin - 1, c.v, c.u) += std::pow(kSpreadBase, std::abs(i));
    }
  }
  for (float& v : f.maps.data) v = std::min(v, 1.0f);
  return f;
}

template <typename T>
double loss(const LogitMaps<T>& logits, const AttentionMaps& gt) {
  check_shapes(logits.channels, logits.height, logits.width, gt);
  check_input(!logits.data.empty(), "loss over an empty map");
  double total = 0.0;
  for (std::size_t n = 0; n < logits.data.size(); ++n) {
    const double z = static_cast<double>(logits.data[n]);
    const double p = gt.maps.data[n];
    // -[p log s(z) + (1-p) log(1-s(z))] without overflow for large |z|.
    total += std::max(z, 0.0) - z * p + std::log1p(std::exp(-std::abs(z)));
  }
  return total / static_cast<double>(logits.data.size());
}

template <typename T>
LogitMaps<T> loss_grad(const LogitMaps<T>& logits, const AttentionMaps& gt) {
  check_shapes(logits.channels, logits.height, logits.width, gt);
  LogitMaps<T> grad(logits.channels, logits.height, logits.width);
  const double inv_n = 1.0 / static_cast<double>(logits.data.size());
  for (std::size_t n = 0; n < logits.data.size(); ++n) {
    const double z = static_cast<double>(logits.data[n]);
    const double s = 1.0 / (1.0 + std::exp(-z));
    grad.data[n] = static_cast<T>((s - gt.maps.data[n]) * inv_n);
  }
  return grad;
}

template <typename T>
AttentionMaps sigmoid_maps(const LogitMaps<T>& logits, const AttentionMaps& like) {
  check_shapes(logits.channels, logits.height, logits.width, like);
  AttentionMaps out = like;
  for (std::size_t n = 0; n < logits.data.size(); ++n) {
    const double z = static_cast<double>(logits.data[n]);
    out.maps.data[n] = static_cast<float>(1.0 / (1.0 + std::exp(-z)));
  }
  return out;
}

template double loss(const LogitMaps<float>&, const AttentionMaps&);
template double loss(const LogitMaps<double>&, const AttentionMaps&);
template LogitMaps<float> loss_grad(const LogitMaps<float>&, const AttentionMaps&);
template LogitMaps<double> loss_grad(const LogitMaps<double>&, const AttentionMaps&);
template AttentionMaps sigmoid_maps(const LogitMaps<float>&, const AttentionMaps&);
template AttentionMaps sigmoid_maps(const LogitMaps<double>&, const AttentionMaps&);

}  // namespace s2ap
