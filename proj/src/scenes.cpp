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

#include "s2ap/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "s2ap/error.hpp"
#include "s2ap/labels.hpp"

namespace s2ap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SizeRange {
  double lo;
  double hi;
};

bool boxes_overlap(const BBox& a, const BBox& b) {
  return a.x_tl < b.x_dr && b.x_tl < a.x_dr && a.y_tl < b.y_dr && b.y_tl < a.y_dr;
}

}  // namespace

std::vector<BBox> Scene::boxes() const {
  std::vector<BBox> out;
  out.reserve(faces.size());
  for (const Face& f : faces) out.push_back(f.box);
  return out;
}

void SceneConfig::validate() const {
  check_input(height > 0 && width > 0, "scene dims must be positive");
  check_input(min_faces >= 0 && max_faces >= min_faces, "invalid faces-per-scene range");
  check_input(min_size > 0.0 && max_size >= min_size, "invalid face size range");
  check_input(min_size <= std::min(height, width) && max_size <= std::min(height, width),
              "faces must fit inside the image");
  const double to_canonical = scale.s_max / std::max(height, width);
  const double lo = std::exp2(scale.base_exponent);
  check_input(min_size * to_canonical >= lo * (1 - 1e-12) &&
                  max_size * to_canonical <= scale.s_max * (1 + 1e-12),
              "face sizes must map into [2^4, 2^10] at s_max");
  check_input(label_stride > 0, "label stride must be positive");
  check_input(retries > 0, "retries must be positive");
  check_input(max_octaves >= 0, "max_octaves must be non-negative");
}

std::vector<Scene> gen_scenes(int count, const SceneConfig& cfg, std::uint64_t seed) {
  check_input(count >= 0, "scene count must be non-negative");
  cfg.validate();
  const double l_max = std::max(cfg.height, cfg.width);
  const double to_canonical = cfg.scale.s_max / l_max;

  // Octaves intersecting the size range, as image-pixel size ranges.
  std::vector<SizeRange> octaves;
  const int top = static_cast<int>(std::lround(std::log2(cfg.scale.s_max)));
  for (int k = cfg.scale.base_exponent; k < top; ++k) {
    const double lo = std::max(cfg.min_size, std::exp2(k) / to_canonical);
    const double hi = std::min(cfg.max_size, std::exp2(k + 1) / to_canonical);
    if (lo < hi) octaves.push_back({lo, hi});
  }
  if (octaves.empty()) octaves.push_back({cfg.min_size, cfg.max_size});

  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (int i = 0; i < count; ++i) {
    Scene scene;
    scene.height = cfg.height;
    scene.width = cfg.width;
    scene.seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i)));
    std::mt19937_64 rng(scene.seed);

    std::vector<SizeRange> ranges = octaves;
    if (cfg.max_octaves > 0 && static_cast<int>(ranges.size()) > cfg.max_octaves) {
      std::shuffle(ranges.begin(), ranges.end(), rng);
      ranges.resize(cfg.max_octaves);
    } else if (cfg.max_octaves == 0) {
      ranges.assign(1, {cfg.min_size, cfg.max_size});
    }

    const int n = std::uniform_int_distribution<int>(cfg.min_faces, cfg.max_faces)(rng);
    std::vector<AttentionCenter> centers;
    for (int f = 0; f < n; ++f) {
      bool placed = false;
      for (int attempt = 0; attempt < cfg.retries && !placed; ++attempt) {
        const SizeRange r =
            ranges[std::uniform_int_distribution<std::size_t>(0, ranges.size() - 1)(rng)];
        const double size =
            std::exp(std::uniform_real_distribution<double>(std::log(r.lo), std::log(r.hi))(rng));
        const double x0 = std::uniform_real_distribution<double>(0.0, cfg.width - size)(rng);
        const double y0 = std::uniform_real_distribution<double>(0.0, cfg.height - size)(rng);
        const BBox box{x0, y0, x0 + size, y0 + size};
        const AttentionCenter c =
            attention_center(box, cfg.label_stride, cfg.height, cfg.width, cfg.scale);
        bool ok = true;
        for (std::size_t j = 0; j < scene.faces.size() && ok; ++j) {
          const AttentionCenter& o = centers[j];
          const int bin_gap = std::abs(o.bin - c.bin);
          ok = !boxes_overlap(box, scene.faces[j].box) &&
               std::max(std::abs(o.u - c.u), std::abs(o.v - c.v)) >= 2 &&
               (!cfg.conforming || bin_gap == 0 || bin_gap > 4);
        }
        if (!ok) continue;
        scene.faces.push_back({box, landmarks_in_box(cfg.mean_shape, box)});
        centers.push_back(c);
        placed = true;
      }
      if (!placed) {
        throw Error(ErrorKind::kGeneration, "could not place face " + std::to_string(f) +
                                                " of scene " + std::to_string(i));
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

Tensor render_scene(const Scene& scene) {
  Tensor img(3, scene.height, scene.width);
  std::mt19937_64 rng(scene.seed);
  std::uniform_real_distribution<float> noise(0.0f, 0.1f);
  for (auto& v : img.data) v = noise(rng);
  constexpr float kGain[3] = {1.0f, 0.8f, 0.6f};
  for (const Face& face : scene.faces) {
    const double cx = (face.box.x_tl + face.box.x_dr) / 2.0;
    const double cy = (face.box.y_tl + face.box.y_dr) / 2.0;
    const double sigma = face_size(face.box) / 4.0;
    const double reach = 3.0 * sigma;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(scene.width - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(scene.height - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const float g = static_cast<float>(std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)));
        for (int c = 0; c < 3; ++c) img.at(c, y, x) += kGain[c] * g;
      }
    }
  }
  for (auto& v : img.data) v = std::min(v, 1.0f);
  return img;
}

Json to_json(const Scene& scene) {
  Json faces = Json::array();
  for (const Face& f : scene.faces) {
    faces.push_back({{"bbox", to_json(f.box)}, {"landmarks", to_json(f.landmarks)}});
  }
  return {{"dims", Json::array({scene.height, scene.width})},
          {"faces", std::move(faces)},
          {"seed", scene.seed}};
}

Scene scene_from_json(const Json& j) {
  Scene s;
  const Json& dims = j.at("dims");
  check_input(dims.is_array() && dims.size() == 2, "scene dims must be [H, W]");
  s.height = dims[0].get<int>();
  s.width = dims[1].get<int>();
  check_input(s.height > 0 && s.width > 0, "scene dims must be positive");
  s.seed = j.value("seed", std::uint64_t{0});
  for (const Json& f : j.at("faces")) {
    s.faces.push_back({bbox_from_json(f.at("bbox")), landmarks_from_json(f.at("landmarks"))});
  }
  return s;
}

Json scenes_to_json(const std::vector<Scene>& scenes) {
  Json arr = Json::array();
  for (const Scene& s : scenes) arr.push_back(to_json(s));
  return arr;
}

std::vector<Scene> scenes_from_json(const Json& j) {
  std::vector<Scene> out;
  if (j.is_object()) {
    out.push_back(scene_from_json(j));
    return out;
  }
  check_input(j.is_array(), "scenes file must hold a scene object or an array of scenes");
  for (const Json& s : j) out.push_back(scene_from_json(s));
  return out;
}

}  // namespace s2ap
