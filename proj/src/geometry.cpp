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

#include "s2ap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

using Complex = std::complex<double>;

Complex as_complex(Point2 p) { return {p.x, p.y}; }

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

MeanShape MeanShape::standard() {
  return MeanShape{{{{0.30, 0.35},
                     {0.70, 0.35},
                     {0.50, 0.55},
                     {0.35, 0.75},
                     {0.65, 0.75}}}};
}

bool BBox::valid() const {
  return std::isfinite(x_tl) && std::isfinite(y_tl) && std::isfinite(x_dr) &&
         std::isfinite(y_dr) && x_dr > x_tl && y_dr > y_tl;
}

Point2 SimilarityTransform::apply(Point2 p) const {
  const Complex a = std::polar(scale, rotation);
  const Complex r = a * as_complex(p) + Complex(tx, ty);
  return {r.real(), r.imag()};
}

SimilarityTransform SimilarityTransform::inverse() const {
  check_input(scale > 0.0, "similarity transform has non-positive scale");
  const Complex a_inv = 1.0 / std::polar(scale, rotation);
  const Complex t = -a_inv * Complex(tx, ty);
  return {1.0 / scale, std::arg(a_inv), t.real(), t.imag()};
}

std::array<double, 9> SimilarityTransform::matrix() const {
  const double a = scale * std::cos(rotation);
  const double b = scale * std::sin(rotation);
  return {a, -b, tx, b, a, ty, 0.0, 0.0, 1.0};
}

NormalizedLandmarks normalize_landmarks(const LandmarkSet& landmarks,
                                        const BBox& manual_box) {
  check_input(manual_box.valid(), "manual box must have positive width and height");
  const double w = manual_box.width();
  const double h = manual_box.height();
  NormalizedLandmarks out;
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Point2 p = landmarks.points[i];
    check_input(finite(p), "landmark coordinates must be finite");
    out.points[i] = {(p.x - manual_box.x_tl) / w, (p.y - manual_box.y_tl) / h};
  }
  return out;
}

MeanShape compute_mean_shape(const std::vector<NormalizedLandmarks>& samples) {
  check_input(!samples.empty(), "mean shape needs at least one sample");
  MeanShape mean;
  for (const auto& s : samples) {
    for (int i = 0; i < kNumLandmarks; ++i) {
      mean.points[i].x += s.points[i].x;
      mean.points[i].y += s.points[i].y;
    }
  }
  const double n = static_cast<double>(samples.size());
  for (auto& p : mean.points) {
    p.x /= n;
    p.y /= n;
  }
  return mean;
}

SimilarityFit fit_similarity(const LandmarkSet& landmarks,
                             const MeanShape& mean_shape) {
  Complex src_c{0.0, 0.0};
  Complex dst_c{0.0, 0.0};
  for (int i = 0; i < kNumLandmarks; ++i) {
    check_input(finite(landmarks.points[i]) && finite(mean_shape.points[i]),
                "landmark coordinates must be finite");
    src_c += as_complex(landmarks.points[i]);
    dst_c += as_complex(mean_shape.points[i]);
  }
  src_c /= static_cast<double>(kNumLandmarks);
  dst_c /= static_cast<double>(kNumLandmarks);

  // With points as complex numbers the 4-DOF fit is a single complex
  // coefficient a = scale * e^{i*rotation}: a = <src, dst> / |src|^2.
  Complex cross{0.0, 0.0};
  double src_norm = 0.0;
  double dst_norm = 0.0;
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Complex s = as_complex(landmarks.points[i]) - src_c;
    const Complex d = as_complex(mean_shape.points[i]) - dst_c;
    cross += std::conj(s) * d;
    src_norm += std::norm(s);
    dst_norm += std::norm(d);
  }
  const double src_ref = std::norm(src_c) + 1.0;
  const double dst_ref = std::norm(dst_c) + 1.0;
  if (src_norm <= 1e-24 * src_ref || dst_norm <= 1e-24 * dst_ref) {
    throw Error(ErrorKind::kSingularFit, "landmark configuration is degenerate");
  }
  const Complex a = cross / src_norm;
  if (std::abs(a) == 0.0) {
    throw Error(ErrorKind::kSingularFit, "fitted similarity has zero scale");
  }
  const Complex t = dst_c - a * src_c;

  SimilarityFit fit;
  fit.transform = {std::abs(a), std::arg(a), t.real(), t.imag()};
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Complex r =
        a * as_complex(landmarks.points[i]) + t - as_complex(mean_shape.points[i]);
    fit.residual += std::norm(r);
  }
  return fit;
}

BBox bbox_from_landmarks(const LandmarkSet& landmarks,
                         const MeanShape& mean_shape) {
  const SimilarityTransform inv = fit_similarity(landmarks, mean_shape).transform.inverse();
  const Point2 p0 = inv.apply({0.0, 0.0});
  const Point2 p1 = inv.apply({1.0, 1.0});
  BBox box{std::min(p0.x, p1.x), std::min(p0.y, p1.y), std::max(p0.x, p1.x),
           std::max(p0.y, p1.y)};
  check_input(box.valid(), "derived box is degenerate (face rotated by 45 degrees?)");
  return box;
}

double face_size(const BBox& box) {
  check_input(box.valid(), "face_size needs a valid box");
  return std::sqrt(box.width() * box.height());
}

LandmarkSet landmarks_in_box(const MeanShape& mean_shape, const BBox& box) {
  LandmarkSet out;
  for (int i = 0; i < kNumLandmarks; ++i) {
    out.points[i] = {box.x_tl + mean_shape.points[i].x * box.width(),
                     box.y_tl + mean_shape.points[i].y * box.height()};
  }
  return out;
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_dr, b.x_dr) - std::max(a.x_tl, b.x_tl);
  const double ih = std::min(a.y_dr, b.y_dr) - std::max(a.y_tl, b.y_tl);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.width() * a.height() + b.width() * b.height() - inter);
}

}  // namespace s2ap
