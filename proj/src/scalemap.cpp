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

#include "s2ap/scalemap.hpp"

#include <algorithm>
#include <cmath>

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

// Absorbs the last-ulp noise of log2(exp2(k)) so bin boundaries land on the
// intended side of the ceiling.
constexpr double kBinSlack = 1e-9;

}  // namespace

void ScaleMapConfig::validate() const {
  check_input(s_max > 0.0, "s_max must be positive");
  check_input(bins_per_octave > 0, "bins_per_octave must be positive");
  const double top = std::log2(s_max);
  const double expected = bins_per_octave * (top - base_exponent);
  check_input(std::abs(expected - num_bins) < 1e-9,
              "num_bins must equal bins_per_octave * (log2(s_max) - base_exponent)");
  check_input(anchor_log2 >= 6.0 && anchor_log2 <= 7.0,
              "anchor must lie in [2^6, 2^7]");
}

BinEstimate size_to_bin(double face_size, double l_max, const ScaleMapConfig& cfg) {
  check_input(face_size > 0.0 && std::isfinite(face_size), "face size must be positive");
  check_input(l_max > 0.0 && std::isfinite(l_max), "l_max must be positive");
  BinEstimate est;
  est.raw = cfg.bins_per_octave *
            (std::log2(face_size * cfg.s_max / l_max) - cfg.base_exponent);
  const double q = std::ceil(est.raw - kBinSlack);
  const double clamped = std::clamp(q, 1.0, static_cast<double>(cfg.num_bins));
  est.clamped = clamped != q;
  est.bin = static_cast<int>(clamped);
  return est;
}

double raw_bin_to_size(double raw_bin, double l_max, const ScaleMapConfig& cfg) {
  check_input(l_max > 0.0, "l_max must be positive");
  return (l_max / cfg.s_max) *
         std::exp2(raw_bin / cfg.bins_per_octave + cfg.base_exponent);
}

double bin_to_size(int bin, double l_max, const ScaleMapConfig& cfg) {
  check_input(bin >= 1 && bin <= cfg.num_bins, "scale bin out of range");
  return raw_bin_to_size(static_cast<double>(bin), l_max, cfg);
}

double zoom_target_length(double face_size, double l_max, const ScaleMapConfig& cfg) {
  check_input(face_size > 0.0, "face size must be positive");
  check_input(l_max > 0.0, "l_max must be positive");
  return std::exp2(cfg.anchor_log2) / face_size * l_max;
}

}  // namespace s2ap
