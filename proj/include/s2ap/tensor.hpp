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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace s2ap {

/// Dense C x H x W array, channel-major then row-major.
template <typename T>
struct BasicTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  BasicTensor() = default;
  BasicTensor(int c, int h, int w, T fill = T{0})
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height + y) * width + x;
  }
  T& at(int c, int y, int x) { return data[index(c, y, x)]; }
  const T& at(int c, int y, int x) const { return data[index(c, y, x)]; }

  bool same_shape(const BasicTensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  bool operator==(const BasicTensor&) const = default;
};

using Tensor = BasicTensor<float>;

template <typename T>
struct BasicMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  BasicMatrix() = default;
  BasicMatrix(int r, int c, T fill = T{0})
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  T& at(int r, int c) { return row(r)[c]; }
  const T& at(int r, int c) const { return row(r)[c]; }
  bool operator==(const BasicMatrix&) const = default;
};

/// Binary H x W grid; used for convolution masks and spatial attention masks.
struct BinaryGrid {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> cells;

  BinaryGrid() = default;
  BinaryGrid(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), cells(static_cast<std::size_t>(h) * w, fill) {}

  std::uint8_t& at(int y, int x) { return cells[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int y, int x) const { return cells[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;
  double density() const;
  bool operator==(const BinaryGrid&) const = default;
};

inline std::size_t BinaryGrid::count() const {
  std::size_t n = 0;
  for (auto c : cells) n += c != 0;
  return n;
}

inline double BinaryGrid::density() const {
  return cells.empty() ? 0.0 : static_cast<double>(count()) / cells.size();
}

}  // namespace s2ap
