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

#include <filesystem>
#include <vector>

#include "s2ap/bench.hpp"
#include "s2ap/io.hpp"
#include "s2ap/scenes.hpp"
#include "s2ap/sscu.hpp"
#include "s2ap/toynet.hpp"

namespace s2ap {

/// Everything a CLI run depends on. Keys missing from a config file keep
/// the defaults below.
struct Config {
  ScaleMapConfig scale{};
  int label_stride = 8;
  int scene_count = 20;
  SceneConfig scenes{};
  DecodeParams decode{};
  std::vector<double> thresholds = default_thresholds();
  std::vector<ConvSpec> detector = default_detector();
  NetworkSpec network = NetworkSpec::standard();
  TrainConfig train{};
};

Config config_from_json(const Json& j);
Json to_json(const Config& c);
Config load_config(const std::filesystem::path& path);

}  // namespace s2ap
