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

#include "s2ap/maskconv.hpp"

#include <algorithm>
#include <vector>

#include "s2ap/error.hpp"
#include "s2ap/parallel.hpp"

namespace s2ap {

void ConvSpec::validate() const {
  check_input(c_in > 0 && c_out > 0, "conv channels must be positive");
  check_input(kernel > 0 && kernel % 2 == 1, "conv kernel must be odd");
  check_input(stride >= 1, "conv stride must be >= 1");
  check_input(padding >= 0, "conv padding must be >= 0");
}

namespace {

template <typename T>
void check_conv_input(const BasicTensor<T>& input, const ConvSpec& spec) {
  spec.validate();
  check_input(input.channels == spec.c_in, "input channels do not match conv spec");
  check_input(input.size() == input.plane() * input.channels, "tensor data size mismatch");
  check_input(spec.out_height(input.height) > 0 && spec.out_width(input.width) > 0,
              "input too small for kernel");
}

template <typename T>
void check_weights(const BasicWeights<T>& weights, const ConvSpec& spec) {
  check_input(weights.rows == spec.c_out && weights.cols == spec.columns(),
              "weight matrix does not match conv spec");
}

// Writes the (c, ky, kx) window centred on output (oy, ox) into row.
template <typename T>
void unroll_window(const BasicTensor<T>& input, const ConvSpec& spec, int oy, int ox,
                   T* row) {
  const int y0 = oy * spec.stride - spec.padding;
  const int x0 = ox * spec.stride - spec.padding;
  for (int c = 0; c < spec.c_in; ++c) {
    for (int ky = 0; ky < spec.kernel; ++ky) {
      const int y = y0 + ky;
      const bool row_ok = y >= 0 && y < input.height;
      for (int kx = 0; kx < spec.kernel; ++kx) {
        const int x = x0 + kx;
        *row++ = (row_ok && x >= 0 && x < input.width) ? input.at(c, y, x) : T{0};
      }
    }
  }
}

// Shared by the dense and masked paths: the accumulation order here is what
// makes the two bitwise comparable.
template <typename T>
T dot(const T* a, const T* b, int n) {
  T acc{0};
  for (int k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace

template <typename T>
BasicMatrix<T> im2col(const BasicTensor<T>& input, const ConvSpec& spec) {
  check_conv_input(input, spec);
  const int out_h = spec.out_height(input.height);
  const int out_w = spec.out_width(input.width);
  BasicMatrix<T> cols(out_h * out_w, spec.columns());
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      unroll_window(input, spec, oy, ox, cols.row(oy * out_w + ox));
    }
  }
  return cols;
}

template <typename T>
BasicTensor<T> dense_conv(const BasicTensor<T>& input, const BasicWeights<T>& weights,
                          const ConvSpec& spec, int workers) {
  check_conv_input(input, spec);
  check_weights(weights, spec);
  const int out_h = spec.out_height(input.height);
  const int out_w = spec.out_width(input.width);
  const int n = spec.columns();
  BasicTensor<T> out(spec.c_out, out_h, out_w);
  const std::size_t plane = out.plane();
  parallel_for(plane, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<T> row(n);
    for (std::size_t r = begin; r < end; ++r) {
      const int oy = static_cast<int>(r) / out_w;
      const int ox = static_cast<int>(r) % out_w;
      unroll_window(input, spec, oy, ox, row.data());
      for (int o = 0; o < spec.c_out; ++o) {
        out.data[o * plane + r] = dot(row.data(), weights.row(o), n);
      }
    }
  });
  return out;
}

template <typename T>
BasicTensor<T> masked_conv(const BasicTensor<T>& input, const BasicWeights<T>& weights,
                           const ConvSpec& spec, const ConvMask& mask, int workers) {
  check_conv_input(input, spec);
  check_weights(weights, spec);
  const int out_h = spec.out_height(input.height);
  const int out_w = spec.out_width(input.width);
  check_input(mask.height == out_h && mask.width == out_w,
              "mask dims must equal convolution output dims");
  const int n = spec.columns();

  std::vector<int> active;
  active.reserve(mask.count());
  for (int r = 0; r < out_h * out_w; ++r) {
    if (mask.cells[r]) active.push_back(r);
  }

  // D_m: one im2col row per active output position.
  BasicMatrix<T> gathered(static_cast<int>(active.size()), n);
  BasicMatrix<T> product(static_cast<int>(active.size()), spec.c_out);
  parallel_for(active.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int r = active[i];
      T* row = gathered.row(static_cast<int>(i));
      unroll_window(input, spec, r / out_w, r % out_w, row);
      T* dst = product.row(static_cast<int>(i));
      for (int o = 0; o < spec.c_out; ++o) dst[o] = dot(row, weights.row(o), n);
    }
  });

  BasicTensor<T> out(spec.c_out, out_h, out_w);
  const std::size_t plane = out.plane();
  for (std::size_t i = 0; i < active.size(); ++i) {
    const T* src = product.row(static_cast<int>(i));
    for (int o = 0; o < spec.c_out; ++o) out.data[o * plane + active[i]] = src[o];
  }
  return out;
}

template <typename T>
ConvGradients<T> conv_backward(const BasicTensor<T>& input,
                               const BasicWeights<T>& weights, const ConvSpec& spec,
                               const BasicTensor<T>& output_grad) {
  check_conv_input(input, spec);
  check_weights(weights, spec);
  const int out_h = spec.out_height(input.height);
  const int out_w = spec.out_width(input.width);
  check_input(output_grad.channels == spec.c_out && output_grad.height == out_h &&
                  output_grad.width == out_w,
              "output gradient does not match conv output dims");
  const int n = spec.columns();
  const std::size_t plane = output_grad.plane();

  ConvGradients<T> grads{BasicWeights<T>(spec.c_out, n),
                         BasicTensor<T>(input.channels, input.height, input.width)};
  std::vector<T> row(n);
  std::vector<T> row_grad(n);
  for (std::size_t r = 0; r < plane; ++r) {
    const int oy = static_cast<int>(r) / out_w;
    const int ox = static_cast<int>(r) % out_w;
    unroll_window(input, spec, oy, ox, row.data());
    std::fill(row_grad.begin(), row_grad.end(), T{0});
    for (int o = 0; o < spec.c_out; ++o) {
      const T g = output_grad.data[o * plane + r];
      if (g == T{0}) continue;
      T* dw = grads.weights.row(o);
      const T* w = weights.row(o);
      for (int k = 0; k < n; ++k) {
        dw[k] += g * row[k];
        row_grad[k] += g * w[k];
      }
    }
    // col2im: scatter the row gradient back onto the input taps.
    const int y0 = oy * spec.stride - spec.padding;
    const int x0 = ox * spec.stride - spec.padding;
    int k = 0;
    for (int c = 0; c < spec.c_in; ++c) {
      for (int ky = 0; ky < spec.kernel; ++ky) {
        for (int kx = 0; kx < spec.kernel; ++kx, ++k) {
          const int y = y0 + ky;
          const int x = x0 + kx;
          if (y >= 0 && y < input.height && x >= 0 && x < input.width) {
            grads.input.at(c, y, x) += row_grad[k];
          }
        }
      }
    }
  }
  return grads;
}

FlopCount flops(const ConvSpec& spec, int out_height, int out_width, const ConvMask* mask) {
  check_input(out_height >= 0 && out_width >= 0, "output dims must be non-negative");
  FlopCount f;
  f.positions = static_cast<std::uint64_t>(out_height) * out_width;
  const std::uint64_t per_position =
      static_cast<std::uint64_t>(spec.c_in) * spec.kernel * spec.kernel * spec.c_out;
  f.dense = f.positions * per_position;
  if (mask == nullptr) {
    f.active = f.positions;
  } else {
    check_input(mask->height == out_height && mask->width == out_width,
                "mask dims must equal convolution output dims");
    f.active = mask->count();
  }
  f.masked = f.active * per_position;
  return f;
}

template BasicMatrix<float> im2col(const BasicTensor<float>&, const ConvSpec&);
template BasicMatrix<double> im2col(const BasicTensor<double>&, const ConvSpec&);
template BasicTensor<float> dense_conv(const BasicTensor<float>&, const BasicWeights<float>&,
                                       const ConvSpec&, int);
template BasicTensor<double> dense_conv(const BasicTensor<double>&,
                                        const BasicWeights<double>&, const ConvSpec&, int);
template BasicTensor<float> masked_conv(const BasicTensor<float>&, const BasicWeights<float>&,
                                        const ConvSpec&, const ConvMask&, int);
template BasicTensor<double> masked_conv(const BasicTensor<double>&,
                                         const BasicWeights<double>&, const ConvSpec&,
                                         const ConvMask&, int);
template ConvGradients<float> conv_backward(const BasicTensor<float>&,
                                            const BasicWeights<float>&, const ConvSpec&,
                                            const BasicTensor<float>&);
template ConvGradients<double> conv_backward(const BasicTensor<double>&,
                                             const BasicWeights<double>&, const ConvSpec&,
                                             const BasicTensor<double>&);

}  // namespace s2ap
