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

namespace s2ap {

/// Logarithmic face-size binning. With the defaults, sizes 2^4..2^10 at a
/// long side of s_max fall into bins 1..60, ten per octave.
struct ScaleMapConfig {
  double s_max = 1024.0;
  int num_bins = 60;
  int bins_per_octave = 10;
  int base_exponent = 4;
  double anchor_log2 = 6.5;

  /// Throws kInvalidInput unless num_bins spans exactly base_exponent up to
  /// log2(s_max) and the anchor lies in [2^6, 2^7].
  void validate() const;
};

struct BinEstimate {
  int bin = 1;        // clamped to [1, num_bins]
  double raw = 0.0;   // unquantized value, may lie outside the bin range
  bool clamped = false;
};

BinEstimate size_to_bin(double face_size, double l_max, const ScaleMapConfig& cfg = {});

/// Inverse of the size mapping at an integer bin.
double bin_to_size(int bin, double l_max, const ScaleMapConfig& cfg = {});

/// Inverse of the size mapping at a real-valued bin coordinate.
double raw_bin_to_size(double raw_bin, double l_max, const ScaleMapConfig& cfg = {});

/// Long side to resize an image to so a face of `face_size` lands at the
/// anchor center size 2^anchor_log2.
double zoom_target_length(double face_size, double l_max, const ScaleMapConfig& cfg = {});

}  // namespace s2ap
