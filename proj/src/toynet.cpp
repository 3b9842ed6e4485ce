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

#include "s2ap/toynet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "s2ap/error.hpp"

namespace s2ap {

int NetworkSpec::stride() const {
  int s = 1;
  for (const auto& l : layers) s *= l.conv.stride;
  return s;
}

void NetworkSpec::validate(int num_bins) const {
  check_input(!layers.empty(), "network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].conv.validate();
    if (i > 0) {
      check_input(layers[i].conv.c_in == layers[i - 1].conv.c_out,
                  "layer channels do not chain");
    }
  }
  check_input(layers.back().conv.c_out == num_bins, "head must output one channel per bin");
  check_input(layers.back().activation == Activation::kNone, "head must be linear");
}

NetworkSpec NetworkSpec::standard(int num_bins) {
  NetworkSpec net;
  net.layers = {
      {{3, 8, 3, 2, 1}, Activation::kRelu},
      {{8, 16, 3, 2, 1}, Activation::kRelu},
      {{16, num_bins, 3, 1, 1}, Activation::kNone},
  };
  return net;
}

template <typename T>
BasicParameters<T> init_parameters(const NetworkSpec& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BasicParameters<T> p;
  for (const auto& layer : net.layers) {
    const ConvSpec& c = layer.conv;
    const double s = std::sqrt(1.0 / c.columns());
    std::uniform_real_distribution<double> dist(-s, s);
    BasicWeights<T> w(c.c_out, c.columns());
    for (auto& v : w.data) v = static_cast<T>(dist(rng));
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(c.c_out, T{0});
  }
  return p;
}

template <typename To, typename From>
BasicParameters<To> cast_parameters(const BasicParameters<From>& p) {
  BasicParameters<To> out;
  for (const auto& w : p.weights) {
    BasicWeights<To> c(w.rows, w.cols);
    std::transform(w.data.begin(), w.data.end(), c.data.begin(),
                   [](From v) { return static_cast<To>(v); });
    out.weights.push_back(std::move(c));
  }
  for (const auto& b : p.biases) out.biases.emplace_back(b.begin(), b.end());
  return out;
}

namespace {

template <typename T>
void check_params(const NetworkSpec& net, const BasicParameters<T>& params) {
  check_input(params.weights.size() == net.layers.size() &&
                  params.biases.size() == net.layers.size(),
              "parameter count does not match network");
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const ConvSpec& c = net.layers[i].conv;
    check_input(params.weights[i].rows == c.c_out && params.weights[i].cols == c.columns(),
                "weight shape does not match layer");
    check_input(static_cast<int>(params.biases[i].size()) == c.c_out,
                "bias length does not match layer");
  }
}

template <typename T>
struct Trace {
  std::vector<BasicTensor<T>> inputs;  // input to each layer
  std::vector<BasicTensor<T>> pre;     // pre-activation output of each layer
};

template <typename T>
BasicTensor<T> run_layers(const NetworkSpec& net, const BasicParameters<T>& params,
                          const BasicTensor<T>& image, const std::vector<ConvMask>* masks,
                          int workers, Trace<T>* trace) {
  check_params(net, params);
  if (masks != nullptr) {
    check_input(masks->size() == net.layers.size(), "need one mask per layer");
  }
  BasicTensor<T> x = image;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    BasicTensor<T> y =
        masks ? masked_conv(x, params.weights[i], layer.conv, (*masks)[i], workers)
              : dense_conv(x, params.weights[i], layer.conv, workers);
    const std::size_t plane = y.plane();
    for (int o = 0; o < y.channels; ++o) {
      const T b = params.biases[i][o];
      T* dst = y.data.data() + o * plane;
      for (std::size_t r = 0; r < plane; ++r) {
        if (masks && !(*masks)[i].cells[r]) continue;
        dst[r] += b;
      }
    }
    if (trace) {
      trace->inputs.push_back(std::move(x));
      trace->pre.push_back(y);
    }
    if (layer.activation == Activation::kRelu) {
      for (auto& v : y.data) v = std::max(v, T{0});
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

template <typename T>
LogitMaps<T> forward(const NetworkSpec& net, const BasicParameters<T>& params,
                     const BasicTensor<T>& image, const std::vector<ConvMask>* masks,
                     int workers) {
  return run_layers<T>(net, params, image, masks, workers, nullptr);
}

template <typename T>
std::pair<double, BasicParameters<T>> loss_and_gradients(const NetworkSpec& net,
                                                         const BasicParameters<T>& params,
                                                         const BasicTensor<T>& image,
                                                         const AttentionMaps& gt) {
  Trace<T> trace;
  const BasicTensor<T> logits = run_layers<T>(net, params, image, nullptr, 1, &trace);
  const double value = loss(logits, gt);
  BasicTensor<T> grad = loss_grad(logits, gt);

  BasicParameters<T> grads;
  grads.weights.resize(net.layers.size());
  grads.biases.resize(net.layers.size());
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const LayerSpec& layer = net.layers[k];
    if (layer.activation == Activation::kRelu) {
      const auto& pre = trace.pre[k].data;
      for (std::size_t n = 0; n < grad.data.size(); ++n) {
        if (!(pre[n] > T{0})) grad.data[n] = T{0};
      }
    }
    const std::size_t plane = grad.plane();
    grads.biases[k].assign(grad.channels, T{0});
    for (int o = 0; o < grad.channels; ++o) {
      const T* g = grad.data.data() + o * plane;
      T acc{0};
      for (std::size_t r = 0; r < plane; ++r) acc += g[r];
      grads.biases[k][o] = acc;
    }
    ConvGradients<T> cg = conv_backward(trace.inputs[k], params.weights[k], layer.conv, grad);
    grads.weights[k] = std::move(cg.weights);
    grad = std::move(cg.input);
  }
  return {value, std::move(grads)};
}

ConvMask mask_downsample(const BinaryGrid& mask, int factor) {
  check_input(factor >= 1, "downsample factor must be >= 1");
  ConvMask out(ceil_div(mask.height, factor), ceil_div(mask.width, factor));
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(y, x)) out.at(y / factor, x / factor) = 1;
    }
  }
  return out;
}

std::vector<ConvMask> network_masks(const NetworkSpec& net, const BinaryGrid& base_mask,
                                    int base_stride) {
  check_input(base_stride >= 1, "base stride must be >= 1");
  std::vector<ConvMask> masks;
  int stride = 1;
  for (const auto& layer : net.layers) {
    stride *= layer.conv.stride;
    check_input(stride % base_stride == 0,
                "layer stride is finer than the mask stride");
    masks.push_back(mask_downsample(base_mask, stride / base_stride));
  }
  return masks;
}

template <typename T>
TrainResult<T> train(const NetworkSpec& net, BasicParameters<T> params,
                     const std::vector<Sample>& dataset, const TrainConfig& cfg) {
  check_input(cfg.learning_rate > 0.0, "learning rate must be positive");
  check_input(cfg.iterations >= 0, "iteration count must be non-negative");
  check_params(net, params);
  TrainResult<T> result;
  if (cfg.iterations == 0) {
    result.params = std::move(params);
    return result;
  }
  check_input(!dataset.empty(), "training needs at least one sample");
  for (const Sample& s : dataset) {
    check_input(s.image.same_shape(dataset.front().image), "samples differ in image dims");
  }

  std::vector<BasicTensor<T>> images;
  images.reserve(dataset.size());
  for (const Sample& s : dataset) {
    BasicTensor<T> img(s.image.channels, s.image.height, s.image.width);
    std::transform(s.image.data.begin(), s.image.data.end(), img.data.begin(),
                   [](float v) { return static_cast<T>(v); });
    images.push_back(std::move(img));
  }

  const std::size_t n = dataset.size();
  const std::size_t batch =
      cfg.batch_size <= 0 ? n : std::min<std::size_t>(n, static_cast<std::size_t>(cfg.batch_size));
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double rate = cfg.learning_rate;
  result.loss_trace.reserve(cfg.iterations);
  for (int it = 0; it < cfg.iterations; ++it) {
    if (it > 0 && cfg.decay_every > 0 && it % cfg.decay_every == 0) rate *= cfg.lr_decay;
    if (batch < n) std::shuffle(order.begin(), order.end(), rng);

    double batch_loss = 0.0;
    BasicParameters<T> total;
    for (std::size_t j = 0; j < batch; ++j) {
      const std::size_t idx = order[j];
      auto [value, grads] = loss_and_gradients(net, params, images[idx], dataset[idx].labels);
      batch_loss += value;
      if (j == 0) {
        total = std::move(grads);
        continue;
      }
      for (std::size_t k = 0; k < total.weights.size(); ++k) {
        auto& tw = total.weights[k].data;
        const auto& gw = grads.weights[k].data;
        for (std::size_t i = 0; i < tw.size(); ++i) tw[i] += gw[i];
        auto& tb = total.biases[k];
        for (std::size_t i = 0; i < tb.size(); ++i) tb[i] += grads.biases[k][i];
      }
    }
    batch_loss /= static_cast<double>(batch);
    if (!std::isfinite(batch_loss)) {
      throw Error(ErrorKind::kTrainingDiverged,
                  "training loss became non-finite at iteration " + std::to_string(it));
    }
    result.loss_trace.push_back(batch_loss);

    const T step = static_cast<T>(rate / static_cast<double>(batch));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
      auto& w = params.weights[k].data;
      const auto& g = total.weights[k].data;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * g[i];
      auto& b = params.biases[k];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] -= step * total.biases[k][i];
    }
  }
  result.params = std::move(params);
  return result;
}

template BasicParameters<float> init_parameters(const NetworkSpec&, std::uint64_t);
template BasicParameters<double> init_parameters(const NetworkSpec&, std::uint64_t);
template BasicParameters<float> cast_parameters(const BasicParameters<double>&);
template BasicParameters<double> cast_parameters(const BasicParameters<float>&);
template LogitMaps<float> forward(const NetworkSpec&, const BasicParameters<float>&,
                                  const BasicTensor<float>&, const std::vector<ConvMask>*, int);
template LogitMaps<double> forward(const NetworkSpec&, const BasicParameters<double>&,
                                   const BasicTensor<double>&, const std::vector<ConvMask>*,
                                   int);
template std::pair<double, BasicParameters<float>> loss_and_gradients(
    const NetworkSpec&, const BasicParameters<float>&, const BasicTensor<float>&,
    const AttentionMaps&);
template std::pair<double, BasicParameters<double>> loss_and_gradients(
    const NetworkSpec&, const BasicParameters<double>&, const BasicTensor<double>&,
    const AttentionMaps&);
template TrainResult<float> train(const NetworkSpec&, BasicParameters<float>,
                                  const std::vector<Sample>&, const TrainConfig&);
template TrainResult<double> train(const NetworkSpec&, BasicParameters<double>,
                                   const std::vector<Sample>&, const TrainConfig&);

}  // namespace s2ap
