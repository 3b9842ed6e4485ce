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

#include "s2ap/config.hpp"

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "none") return Activation::kNone;
  throw Error(ErrorKind::kInvalidInput, "unknown activation '" + s + "'");
}

}  // namespace

Config config_from_json(const Json& j) {
  check_input(j.is_object(), "config must be a JSON object");
  Config c;
  if (j.contains("scale")) c.scale = scale_config_from_json(j["scale"]);
  c.scenes.scale = c.scale;
  c.decode.scale = c.scale;

  if (j.contains("labels")) c.label_stride = j["labels"].value("stride", c.label_stride);
  check_input(c.label_stride > 0, "label stride must be positive");
  c.scenes.label_stride = c.label_stride;

  if (j.contains("scenes")) {
    const Json& s = j["scenes"];
    c.scene_count = s.value("count", c.scene_count);
    c.scenes.height = s.value("height", c.scenes.height);
    c.scenes.width = s.value("width", c.scenes.width);
    c.scenes.min_faces = s.value("min_faces", c.scenes.min_faces);
    c.scenes.max_faces = s.value("max_faces", c.scenes.max_faces);
    c.scenes.min_size = s.value("min_size", c.scenes.min_size);
    c.scenes.max_size = s.value("max_size", c.scenes.max_size);
    c.scenes.conforming = s.value("conforming", c.scenes.conforming);
    c.scenes.max_octaves = s.value("max_octaves", c.scenes.max_octaves);
    c.scenes.retries = s.value("retries", c.scenes.retries);
  }
  if (j.contains("mean_shape")) c.scenes.mean_shape = mean_shape_from_json(j["mean_shape"]);

  if (j.contains("decode")) {
    const Json& d = j["decode"];
    c.decode.smooth_window = d.value("smooth_window", c.decode.smooth_window);
    c.decode.nms_radius = d.value("nms_radius", c.decode.nms_radius);
    c.decode.scale_threshold = d.value("scale_threshold", c.decode.scale_threshold);
    c.decode.location_threshold = d.value("location_threshold", c.decode.location_threshold);
    c.decode.mask_stride = d.value("mask_stride", c.decode.mask_stride);
    c.decode.context_stride = d.value("context_stride", c.decode.context_stride);
    if (d.contains("thresholds")) c.thresholds = d["thresholds"].get<std::vector<double>>();
  }

  if (j.contains("detector")) {
    c.detector.clear();
    for (const Json& l : j["detector"]) c.detector.push_back(conv_spec_from_json(l));
    check_input(!c.detector.empty(), "detector must have at least one layer");
  }

  if (j.contains("network")) {
    c.network.layers.clear();
    for (const Json& l : j["network"]) {
      c.network.layers.push_back(
          {conv_spec_from_json(l), activation_from_string(l.value("activation", "relu"))});
    }
  } else {
    c.network = NetworkSpec::standard(c.scale.num_bins);
  }
  c.network.validate(c.scale.num_bins);

  if (j.contains("train")) {
    const Json& t = j["train"];
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.iterations = t.value("iterations", c.train.iterations);
    c.train.seed = t.value("seed", c.train.seed);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.lr_decay = t.value("lr_decay", c.train.lr_decay);
    c.train.decay_every = t.value("decay_every", c.train.decay_every);
    check_input(c.train.learning_rate > 0.0, "learning rate must be positive");
  }
  return c;
}

Json to_json(const Config& c) {
  Json detector = Json::array();
  for (const ConvSpec& s : c.detector) detector.push_back(to_json(s));
  Json network = Json::array();
  for (const LayerSpec& l : c.network.layers) {
    Json layer = to_json(l.conv);
    layer["activation"] = l.activation == Activation::kRelu ? "relu" : "none";
    network.push_back(std::move(layer));
  }
  return {{"scale", to_json(c.scale)},
          {"labels", {{"stride", c.label_stride}}},
          {"scenes",
           {{"count", c.scene_count},
            {"height", c.scenes.height},
            {"width", c.scenes.width},
            {"min_faces", c.scenes.min_faces},
            {"max_faces", c.scenes.max_faces},
            {"min_size", c.scenes.min_size},
            {"max_size", c.scenes.max_size},
            {"conforming", c.scenes.conforming},
            {"max_octaves", c.scenes.max_octaves},
            {"retries", c.scenes.retries}}},
          {"mean_shape", to_json(c.scenes.mean_shape)},
          {"decode",
           {{"smooth_window", c.decode.smooth_window},
            {"nms_radius", c.decode.nms_radius},
            {"scale_threshold", c.decode.scale_threshold},
            {"location_threshold", c.decode.location_threshold},
            {"mask_stride", c.decode.mask_stride},
            {"context_stride", c.decode.context_stride},
            {"thresholds", c.thresholds}}},
          {"detector", std::move(detector)},
          {"network", std::move(network)},
          {"train",
           {{"learning_rate", c.train.learning_rate},
            {"iterations", c.train.iterations},
            {"seed", c.train.seed},
            {"batch_size", c.train.batch_size},
            {"lr_decay", c.train.lr_decay},
            {"decay_every", c.train.decay_every}}}};
}

Config load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kInvalidInput, "config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kSingularFit: return "singular_fit";
    case ErrorKind::kOutOfBounds: return "out_of_bounds";
    case ErrorKind::kTrainingDiverged: return "training_diverged";
    case ErrorKind::kNotAchievable: return "not_achievable";
    case ErrorKind::kGeneration: return "generation";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace s2ap
