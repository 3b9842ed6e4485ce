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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2ap/geometry.hpp"
#include "s2ap/labels.hpp"
#include "s2ap/scalemap.hpp"
#include "s2ap/sscu.hpp"
#include "s2ap/tensor.hpp"
#include "s2ap/toynet.hpp"

namespace s2ap {

using Json = nlohmann::ordered_json;

// Flat binary blocks: four little-endian int32 header words, then the
// payload as row-major little-endian float32. Attention maps use
// (m, H_f, W_f, n_s); plain tensors use (C, H, W, 0).

void write_maps(const std::filesystem::path& path, const AttentionMaps& f);
/// Image dims are not part of the header; they are restored as H_f * n_s.
AttentionMaps read_maps(const std::filesystem::path& path);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

/// A (layers, 0, 0, 0) header block, then per layer a weight block
/// (c_out, c_in*K^2, 1, 0) and a bias block (c_out, 1, 1, 0).
void write_parameters(const std::filesystem::path& path, const Parameters& p);
Parameters read_parameters(const std::filesystem::path& path);

/// Run lengths of alternating 0/1 runs in row-major order, starting with 0s.
std::vector<std::uint32_t> rle_encode(const BinaryGrid& grid);
BinaryGrid rle_decode(int height, int width, const std::vector<std::uint32_t>& runs);

void write_pgm(const std::filesystem::path& path, const BinaryGrid& grid);

Json to_json(const BBox& b);
BBox bbox_from_json(const Json& j);
Json to_json(const LandmarkSet& l);
LandmarkSet landmarks_from_json(const Json& j);
Json to_json(const MeanShape& m);
MeanShape mean_shape_from_json(const Json& j);
Json to_json(const ScaleMapConfig& c);
ScaleMapConfig scale_config_from_json(const Json& j, ScaleMapConfig base = {});
Json to_json(const ConvSpec& c);
ConvSpec conv_spec_from_json(const Json& j);

/// Small fixtures only: {"stride", "image_dims", "maps": [m][H_f][W_f]}.
Json to_json(const AttentionMaps& f);
AttentionMaps maps_from_json(const Json& j);

Json to_json(const PyramidPlan& plan);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace s2ap
