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
#include <optional>

#include "s2ap/tensor.hpp"

namespace s2ap {

struct ConvSpec {
  int c_in = 1;
  int c_out = 1;
  int kernel = 3;
  int stride = 1;
  int padding = 1;

  int columns() const { return c_in * kernel * kernel; }
  int out_height(int h) const { return (h + 2 * padding - kernel) / stride + 1; }
  int out_width(int w) const { return (w + 2 * padding - kernel) / stride + 1; }
  void validate() const;
};

/// c_out x (c_in * K * K) filter matrix, inner order (c, ky, kx).
template <typename T>
using BasicWeights = BasicMatrix<T>;
using WeightMatrix = BasicWeights<float>;

/// One entry per output position; 1 means "evaluate the window centred here".
using ConvMask = BinaryGrid;

template <typename T>
struct ConvGradients {
  BasicWeights<T> weights;
  BasicTensor<T> input;
};

/// Multiply-accumulate counts. One MAC is one unit.
struct FlopCount {
  std::uint64_t dense = 0;
  std::uint64_t masked = 0;
  std::uint64_t active = 0;   // nnz(mask)
  std::uint64_t positions = 0;  // H_out * W_out

  double density() const {
    return positions == 0 ? 0.0 : static_cast<double>(active) / positions;
  }
};

/// Unrolls sliding windows into a (H_out * W_out) x (c_in * K^2) matrix.
/// Out-of-bounds taps read as zero.
template <typename T>
BasicMatrix<T> im2col(const BasicTensor<T>& input, const ConvSpec& spec);

template <typename T>
BasicTensor<T> dense_conv(const BasicTensor<T>& input, const BasicWeights<T>& weights,
                          const ConvSpec& spec, int workers = 1);

/// Gathers only the masked im2col rows, multiplies, and scatters back.
/// Active outputs are bitwise equal to dense_conv; inactive ones are zero.
template <typename T>
BasicTensor<T> masked_conv(const BasicTensor<T>& input, const BasicWeights<T>& weights,
                           const ConvSpec& spec, const ConvMask& mask, int workers = 1);

/// Gradients of dense_conv with respect to weights and input.
template <typename T>
ConvGradients<T> conv_backward(const BasicTensor<T>& input,
                               const BasicWeights<T>& weights, const ConvSpec& spec,
                               const BasicTensor<T>& output_grad);

FlopCount flops(const ConvSpec& spec, int out_height, int out_width,
                const ConvMask* mask = nullptr);

extern template BasicMatrix<float> im2col(const BasicTensor<float>&, const ConvSpec&);
extern template BasicMatrix<double> im2col(const BasicTensor<double>&, const ConvSpec&);
extern template BasicTensor<float> dense_conv(const BasicTensor<float>&,
                                              const BasicWeights<float>&,
                                              const ConvSpec&, int);
extern template BasicTensor<double> dense_conv(const BasicTensor<double>&,
                                               const BasicWeights<double>&,
                                               const ConvSpec&, int);
extern template BasicTensor<float> masked_conv(const BasicTensor<float>&,
                                               const BasicWeights<float>&,
                                               const ConvSpec&, const ConvMask&, int);
extern template BasicTensor<double> masked_conv(const BasicTensor<double>&,
                                                const BasicWeights<double>&,
                                                const ConvSpec&, const ConvMask&, int);
extern template ConvGradients<float> conv_backward(const BasicTensor<float>&,
                                                   const BasicWeights<float>&,
                                                   const ConvSpec&,
                                                   const BasicTensor<float>&);
extern template ConvGradients<double> conv_backward(const BasicTensor<double>&,
                                                    const BasicWeights<double>&,
                                                    const ConvSpec&,
                                                    const BasicTensor<double>&);

}  // namespace s2ap
