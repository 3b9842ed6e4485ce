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

#include <array>
#include <vector>

namespace s2ap {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr int kNumLandmarks = 5;

/// Five facial landmarks in image pixels, ordered: left eye, right eye,
/// nose, left mouth corner, right mouth corner.
struct LandmarkSet {
  std::array<Point2, kNumLandmarks> points{};
};

/// Landmarks expressed relative to a labelled box, roughly in [0, 1].
struct NormalizedLandmarks {
  std::array<Point2, kNumLandmarks> points{};
};

struct MeanShape {
  std::array<Point2, kNumLandmarks> points{};

  /// A frontal-face template used when no mean shape is configured.
  static MeanShape standard();
};

struct BBox {
  double x_tl = 0.0;
  double y_tl = 0.0;
  double x_dr = 0.0;
  double y_dr = 0.0;

  double width() const { return x_dr - x_tl; }
  double height() const { return y_dr - y_tl; }
  bool valid() const;
};

/// Four-parameter similarity p -> scale * R(rotation) * p + translation.
/// Maps image coordinates onto the normalized landmark frame.
struct SimilarityTransform {
  double scale = 1.0;
  double rotation = 0.0;  // radians
  double tx = 0.0;
  double ty = 0.0;

  Point2 apply(Point2 p) const;
  SimilarityTransform inverse() const;
  /// Row-major 3x3 homogeneous matrix acting on column vectors.
  std::array<double, 9> matrix() const;
};

struct SimilarityFit {
  SimilarityTransform transform;
  double residual = 0.0;  // sum of squared distances after alignment
};

NormalizedLandmarks normalize_landmarks(const LandmarkSet& landmarks,
                                        const BBox& manual_box);

MeanShape compute_mean_shape(const std::vector<NormalizedLandmarks>& samples);

/// Closed-form least-squares similarity (no reflection) taking `landmarks`
/// onto `mean_shape`. Throws kSingularFit when either point set collapses.
SimilarityFit fit_similarity(const LandmarkSet& landmarks,
                             const MeanShape& mean_shape);

/// The unit square of the normalized frame pulled back to the image, as an
/// axis-aligned box spanned by the two mapped corners.
BBox bbox_from_landmarks(const LandmarkSet& landmarks,
                         const MeanShape& mean_shape);

/// Geometric mean of box width and height.
double face_size(const BBox& box);

/// Landmarks a face would carry if its consistent box were `box`.
LandmarkSet landmarks_in_box(const MeanShape& mean_shape, const BBox& box);

double iou(const BBox& a, const BBox& b);

}  // namespace s2ap
