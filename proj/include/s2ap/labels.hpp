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

#pragma once

#include <vector>

#include "s2ap/geometry.hpp"
#include "s2ap/scalemap.hpp"
#include "s2ap/tensor.hpp"

namespace s2ap {

/// Scale/spatial response maps: channel b-1 holds scale bin b. Cell (u, v)
/// covers image pixels [u*stride, (u+1)*stride) horizontally.
struct AttentionMaps {
  Tensor maps;
  int stride = 1;
  int image_height = 0;
  int image_width = 0;

  int num_bins() const { return maps.channels; }
  double l_max() const { return image_height > image_width ? image_height : image_width; }
  float at(int bin, int v, int u) const { return maps.at(bin - 1, v, u); }
};

struct AttentionCenter {
  int bin = 1;
  int u = 0;  // column
  int v = 0;  // row
};

/// Pre-sigmoid network output, same layout as AttentionMaps::maps.
template <typename T>
using LogitMaps = BasicTensor<T>;

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

AttentionMaps empty_attention(int image_height, int image_width, int stride,
                              const ScaleMapConfig& cfg = {});

/// The cell holding a face's box center and the bin of its size. A box
/// sticking out of the image is clipped for locating; its size is not.
AttentionCenter attention_center(const BBox& box, int stride, int image_height,
                                 int image_width, const ScaleMapConfig& cfg = {});

/// Ground-truth maps: 1 at each face's center and bin, (1/2)^|i| at bins
/// b+i for 0 < |i| <= 4, summed over faces and clipped to 1.
AttentionMaps render_labels(const std::vector<BBox>& boxes, int image_height,
                            int image_width, int stride, const ScaleMapConfig& cfg = {});

/// Mean sigmoid cross-entropy over every cell of every channel.
template <typename T>
double loss(const LogitMaps<T>& logits, const AttentionMaps& gt);

/// d loss / d logit = (sigmoid(z) - p) / N.
template <typename T>
LogitMaps<T> loss_grad(const LogitMaps<T>& logits, const AttentionMaps& gt);

template <typename T>
AttentionMaps sigmoid_maps(const LogitMaps<T>& logits, const AttentionMaps& like);

}  // namespace s2ap
