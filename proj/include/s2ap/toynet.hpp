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

#include <cstdint>
#include <utility>
#include <vector>

#include "s2ap/labels.hpp"
#include "s2ap/maskconv.hpp"
#include "s2ap/tensor.hpp"

namespace s2ap {

enum class Activation { kRelu, kNone };

struct LayerSpec {
  ConvSpec conv;
  Activation activation = Activation::kRelu;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;

  /// Product of layer strides: input pixels per output cell.
  int stride() const;
  /// Checks channel chaining and that the head is a linear m-channel layer.
  void validate(int num_bins) const;

  /// conv3x3(3->8, s2) relu, conv3x3(8->16, s2) relu, conv3x3(16->m, s1).
  static NetworkSpec standard(int num_bins = 60);
};

template <typename T>
struct BasicParameters {
  std::vector<BasicWeights<T>> weights;
  std::vector<std::vector<T>> biases;

  bool operator==(const BasicParameters&) const = default;
};
using Parameters = BasicParameters<float>;

/// Fan-in uniform init in [-s, s], s = sqrt(1 / (c_in * K^2)); zero biases.
template <typename T>
BasicParameters<T> init_parameters(const NetworkSpec& net, std::uint64_t seed);

template <typename To, typename From>
BasicParameters<To> cast_parameters(const BasicParameters<From>& p);

/// Runs the network. With `masks` (one per layer, each sized like that
/// layer's output) only active positions are evaluated; the rest are zero.
template <typename T>
LogitMaps<T> forward(const NetworkSpec& net, const BasicParameters<T>& params,
                     const BasicTensor<T>& image,
                     const std::vector<ConvMask>* masks = nullptr, int workers = 1);

/// Loss and parameter gradients for one (image, labels) pair.
template <typename T>
std::pair<double, BasicParameters<T>> loss_and_gradients(const NetworkSpec& net,
                                                         const BasicParameters<T>& params,
                                                         const BasicTensor<T>& image,
                                                         const AttentionMaps& gt);

/// Max-pool style reduction: an output cell is set when any covered cell is.
ConvMask mask_downsample(const BinaryGrid& mask, int factor);

/// Per-layer masks for a stride chain, derived from a mask at `base_stride`
/// pixels per cell. Each layer stride must be a multiple of base_stride.
std::vector<ConvMask> network_masks(const NetworkSpec& net, const BinaryGrid& base_mask,
                                    int base_stride);

struct TrainConfig {
  double learning_rate = 0.05;
  int iterations = 1000;
  std::uint64_t seed = 0;
  int batch_size = 0;  // 0 means the full dataset
  double lr_decay = 1.0;  // multiply the rate by this every decay_every steps
  int decay_every = 10000;
};

struct Sample {
  Tensor image;
  AttentionMaps labels;
};

template <typename T>
struct TrainResult {
  BasicParameters<T> params;
  std::vector<double> loss_trace;  // batch loss before each update
};

/// Plain SGD on the sigmoid cross-entropy. Throws kTrainingDiverged if the
/// loss stops being finite.
template <typename T>
TrainResult<T> train(const NetworkSpec& net, BasicParameters<T> params,
                     const std::vector<Sample>& dataset, const TrainConfig& cfg);

}  // namespace s2ap
