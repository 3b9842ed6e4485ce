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

#include "s2ap/sscu.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

constexpr int kLocationSpread = 4;

}  // namespace

ScaleVector scale_vector(const AttentionMaps& f) {
  ScaleVector s;
  s.values.assign(f.maps.channels, 0.0);
  const std::size_t plane = f.maps.plane();
  for (int c = 0; c < f.maps.channels; ++c) {
    const float* p = f.maps.data.data() + c * plane;
    float best = 0.0f;
    for (std::size_t i = 0; i < plane; ++i) best = std::max(best, p[i]);
    s.values[c] = best;
  }
  return s;
}

ScaleVector smooth(const ScaleVector& s, int window) {
  check_input(window >= 1 && window % 2 == 1, "smoothing window must be odd and >= 1");
  const int n = s.size();
  const int half = window / 2;
  ScaleVector out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += s.values[j];
    out.values[i] = sum / (hi - lo + 1);
  }
  return out;
}

std::vector<ScaleProposal> nms_1d(const ScaleVector& s, int radius, double threshold) {
  check_input(radius >= 0, "nms radius must be non-negative");
  const int n = s.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s.values[a] > s.values[b]; });
  std::vector<bool> suppressed(n, false);
  std::vector<ScaleProposal> out;
  for (int i : order) {
    if (s.values[i] < threshold) break;
    if (suppressed[i]) continue;
    out.push_back({i + 1, s.values[i]});
    for (int j = std::max(0, i - radius); j <= std::min(n - 1, i + radius); ++j) {
      suppressed[j] = true;
    }
  }
  return out;
}

std::vector<RegionProposal> decode_locations(const AttentionMaps& f, int bin,
                                             double threshold, const ScaleMapConfig& cfg) {
  const int m = f.maps.channels;
  check_input(bin >= 1 && bin <= m, "scale bin out of range");
  const int h = f.maps.height;
  const int w = f.maps.width;
  const std::size_t plane = f.maps.plane();

  std::vector<float> response(plane, 0.0f);
  for (int b = std::max(1, bin - kLocationSpread); b <= std::min(m, bin + kLocationSpread);
       ++b) {
    const float* p = f.maps.data.data() + (b - 1) * plane;
    for (std::size_t i = 0; i < plane; ++i) response[i] = std::max(response[i], p[i]);
  }

  const double side = bin_to_size(bin, f.l_max(), cfg);
  std::vector<int> label(plane, -1);
  std::vector<int> stack;
  std::vector<RegionProposal> out;
  for (std::size_t start = 0; start < plane; ++start) {
    if (label[start] >= 0 || !(response[start] > threshold)) continue;
    const int id = static_cast<int>(out.size());
    std::size_t peak = start;
    label[start] = id;
    stack.assign(1, static_cast<int>(start));
    while (!stack.empty()) {
      const int cell = stack.back();
      stack.pop_back();
      if (response[cell] > response[peak] ||
          (response[cell] == response[peak] && static_cast<std::size_t>(cell) < peak)) {
        peak = cell;
      }
      const int cy = cell / w;
      const int cx = cell % w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int y = cy + dy;
          const int x = cx + dx;
          if (y < 0 || y >= h || x < 0 || x >= w) continue;
          const int nb = y * w + x;
          if (label[nb] >= 0 || !(response[nb] > threshold)) continue;
          label[nb] = id;
          stack.push_back(nb);
        }
      }
    }
    RegionProposal r;
    r.cell_u = static_cast<int>(peak) % w;
    r.cell_v = static_cast<int>(peak) / w;
    r.center = {std::min((r.cell_u + 0.5) * f.stride, static_cast<double>(f.image_width)),
                std::min((r.cell_v + 0.5) * f.stride, static_cast<double>(f.image_height))};
    r.side = side;
    r.bin = bin;
    r.score = response[peak];
    out.push_back(r);
  }
  return out;
}

std::pair<int, int> resized_dims(int image_height, int image_width, double target_length) {
  check_input(image_height > 0 && image_width > 0, "image dims must be positive");
  check_input(target_length > 0.0, "target length must be positive");
  const double r = target_length / std::max(image_height, image_width);
  return {std::max(1, static_cast<int>(std::lround(image_height * r))),
          std::max(1, static_cast<int>(std::lround(image_width * r)))};
}

SpatialMask build_mask(const std::vector<RegionProposal>& regions, int image_height,
                       int image_width, double target_length, int mask_stride,
                       int context_stride) {
  check_input(mask_stride > 0, "mask stride must be positive");
  check_input(context_stride >= 0, "context stride must be non-negative");
  const auto [th, tw] = resized_dims(image_height, image_width, target_length);
  SpatialMask mask;
  mask.stride = mask_stride;
  mask.target_height = th;
  mask.target_width = tw;
  mask.grid = BinaryGrid(ceil_div(th, mask_stride), ceil_div(tw, mask_stride));
  const double r = target_length / std::max(image_height, image_width);
  const double step = mask_stride;
  for (const RegionProposal& region : regions) {
    const double half = (region.side * r + 2.0 * context_stride) / 2.0;
    const double cx = region.center.x * r;
    const double cy = region.center.y * r;
    // Cell j has center (j + 0.5) * step; keep those within [c - half, c + half].
    const int x0 = std::max(0, static_cast<int>(std::ceil((cx - half) / step - 0.5)));
    const int x1 = std::min(mask.grid.width - 1,
                            static_cast<int>(std::floor((cx + half) / step - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil((cy - half) / step - 0.5)));
    const int y1 = std::min(mask.grid.height - 1,
                            static_cast<int>(std::floor((cy + half) / step - 0.5)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) mask.grid.at(y, x) = 1;
    }
  }
  return mask;
}

PyramidPlan plan_pyramid(const std::vector<ScaleProposal>& proposals,
                         const AttentionMaps& f, const DecodeParams& params) {
  const double l_max = f.l_max();
  PyramidPlan plan;
  for (const ScaleProposal& p : proposals) {
    const double size = bin_to_size(p.bin, l_max, params.scale);
    const double target = zoom_target_length(size, l_max, params.scale);
    std::vector<RegionProposal> regions =
        decode_locations(f, p.bin, params.location_threshold, params.scale);

    auto same = std::find_if(plan.levels.begin(), plan.levels.end(), [&](const auto& lv) {
      return std::abs(std::lround(lv.target_length) - std::lround(target)) <= 1;
    });
    if (same != plan.levels.end()) {
      same->regions.insert(same->regions.end(), regions.begin(), regions.end());
      same->mask = build_mask(same->regions, f.image_height, f.image_width,
                              same->target_length, params.mask_stride,
                              params.context_stride);
      continue;
    }
    PyramidLevel level;
    level.target_length = target;
    std::tie(level.image_height, level.image_width) =
        resized_dims(f.image_height, f.image_width, target);
    level.proposal = p;
    level.regions = std::move(regions);
    level.mask = build_mask(level.regions, f.image_height, f.image_width, target,
                            params.mask_stride, params.context_stride);
    plan.levels.push_back(std::move(level));
  }
  std::stable_sort(plan.levels.begin(), plan.levels.end(), [](const auto& a, const auto& b) {
    return a.target_length > b.target_length;
  });
  return plan;
}

DecodeResult decode(const AttentionMaps& f, const DecodeParams& params) {
  DecodeResult r;
  r.raw = scale_vector(f);
  r.smoothed = smooth(r.raw, params.smooth_window);
  r.proposals = nms_1d(r.smoothed, params.nms_radius, params.scale_threshold);
  r.plan = plan_pyramid(r.proposals, f, params);
  return r;
}

}  // namespace s2ap
