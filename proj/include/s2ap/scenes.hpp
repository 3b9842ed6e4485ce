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
#include <vector>

#include "s2ap/geometry.hpp"
#include "s2ap/io.hpp"
#include "s2ap/scalemap.hpp"
#include "s2ap/tensor.hpp"

namespace s2ap {

struct Face {
  BBox box;
  LandmarkSet landmarks;
};

struct Scene {
  int height = 0;
  int width = 0;
  std::vector<Face> faces;
  std::uint64_t seed = 0;

  std::vector<BBox> boxes() const;
  double l_max() const { return height > width ? height : width; }
};

struct SceneConfig {
  int height = 512;
  int width = 512;
  int min_faces = 1;
  int max_faces = 3;
  double min_size = 32.0;   // face size in image pixels
  double max_size = 256.0;
  /// Distinct faces get equal bins or bins more than 4 apart.
  bool conforming = true;
  /// When positive, each scene draws its faces from at most this many of
  /// the octaves [2^k, 2^(k+1)) (sizes measured at s_max).
  int max_octaves = 0;
  /// Face centers must fall in cells at least two apart at this stride.
  int label_stride = 8;
  int retries = 2000;
  MeanShape mean_shape = MeanShape::standard();
  ScaleMapConfig scale{};

  void validate() const;
};

/// Deterministic in (cfg, count, seed). Faces within a scene never overlap.
/// Throws kGeneration when a face cannot be placed within `retries` draws.
std::vector<Scene> gen_scenes(int count, const SceneConfig& cfg, std::uint64_t seed);

/// 3-channel image: uniform noise plus one Gaussian blob per face whose
/// width follows the face size.
Tensor render_scene(const Scene& scene);

Json to_json(const Scene& scene);
Scene scene_from_json(const Json& j);
Json scenes_to_json(const std::vector<Scene>& scenes);
std::vector<Scene> scenes_from_json(const Json& j);

}  // namespace s2ap
