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
#include "s2ap/labels.hpp"
#include "s2ap/scalemap.hpp"
#include "s2ap/tensor.hpp"

namespace s2ap {

/// values[b - 1] is the strongest response anywhere in channel b.
struct ScaleVector {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double at(int bin) const { return values[bin - 1]; }
};

struct ScaleProposal {
  int bin = 1;
  double score = 0.0;
  bool operator==(const ScaleProposal&) const = default;
};

/// A square face region in the coordinates of the decoded image.
struct RegionProposal {
  Point2 center;
  double side = 0.0;
  int bin = 1;
  double score = 0.0;
  int cell_u = 0;
  int cell_v = 0;

  BBox box() const {
    return {center.x - side / 2, center.y - side / 2, center.x + side / 2,
            center.y + side / 2};
  }
};

/// Binary mask over a resized image, one cell per `stride` pixels.
struct SpatialMask {
  BinaryGrid grid;
  int stride = 1;
  int target_height = 0;
  int target_width = 0;
};

struct PyramidLevel {
  double target_length = 0.0;  // long side after resizing
  int image_height = 0;
  int image_width = 0;
  ScaleProposal proposal;
  std::vector<RegionProposal> regions;
  SpatialMask mask;
};

/// Levels sorted by target_length, largest first.
struct PyramidPlan {
  std::vector<PyramidLevel> levels;
};

struct DecodeParams {
  int smooth_window = 3;
  int nms_radius = 4;
  double scale_threshold = 0.5;
  double location_threshold = 0.5;
  int mask_stride = 2;      // detector cell size the mask is rasterized at
  int context_stride = 16;  // regions grow by twice this after zooming
  ScaleMapConfig scale{};
};

ScaleVector scale_vector(const AttentionMaps& f);

/// Centered moving average; windows are truncated at the ends.
ScaleVector smooth(const ScaleVector& s, int window);

/// Greedy fixed-radius suppression over bins. Candidates must reach
/// `threshold`; ties go to the smaller bin.
std::vector<ScaleProposal> nms_1d(const ScaleVector& s, int radius, double threshold);

/// Thresholds C_b = max_{|i|<=4} F_{b+i} (strictly above `threshold`),
/// groups cells by 8-connectivity and emits one region per component peak.
std::vector<RegionProposal> decode_locations(const AttentionMaps& f, int bin,
                                             double threshold,
                                             const ScaleMapConfig& cfg = {});

/// Rasterizes regions into the image resized from `proposal_l_max` to
/// `target_length`, each grown by 2 * context_stride. A cell is set when its
/// center lies inside (or on the edge of) some grown region.
SpatialMask build_mask(const std::vector<RegionProposal>& regions, int image_height,
                       int image_width, double target_length, int mask_stride,
                       int context_stride);

PyramidPlan plan_pyramid(const std::vector<ScaleProposal>& proposals,
                         const AttentionMaps& f, const DecodeParams& params);

struct DecodeResult {
  ScaleVector raw;
  ScaleVector smoothed;
  std::vector<ScaleProposal> proposals;
  PyramidPlan plan;
};

/// scale_vector -> smooth -> nms_1d -> plan_pyramid.
DecodeResult decode(const AttentionMaps& f, const DecodeParams& params);

/// Resized dims for an image whose long side becomes `target_length`.
std::pair<int, int> resized_dims(int image_height, int image_width, double target_length);

}  // namespace s2ap
