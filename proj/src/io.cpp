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

#include "s2ap/io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "s2ap/error.hpp"

namespace s2ap {

namespace {

struct BlockHeader {
  std::int32_t d0 = 0, d1 = 0, d2 = 0, aux = 0;
};

void put_u32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorKind::kIo, "unexpected end of binary file");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_header(std::ostream& os, BlockHeader h) {
  for (std::int32_t v : {h.d0, h.d1, h.d2, h.aux}) put_u32(os, static_cast<std::uint32_t>(v));
}

BlockHeader get_header(std::istream& is) {
  BlockHeader h;
  h.d0 = static_cast<std::int32_t>(get_u32(is));
  h.d1 = static_cast<std::int32_t>(get_u32(is));
  h.d2 = static_cast<std::int32_t>(get_u32(is));
  h.aux = static_cast<std::int32_t>(get_u32(is));
  if (h.d0 < 0 || h.d1 < 0 || h.d2 < 0) throw Error(ErrorKind::kIo, "negative block dims");
  return h;
}

void put_floats(std::ostream& os, const std::vector<float>& v) {
  for (float f : v) put_u32(os, std::bit_cast<std::uint32_t>(f));
}

std::vector<float> get_floats(std::istream& is, std::size_t n) {
  std::vector<float> v(n);
  for (auto& f : v) f = std::bit_cast<float>(get_u32(is));
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return is;
}

std::size_t volume(const BlockHeader& h) {
  return static_cast<std::size_t>(h.d0) * h.d1 * h.d2;
}

}  // namespace

void write_maps(const std::filesystem::path& path, const AttentionMaps& f) {
  auto os = open_out(path);
  put_header(os, {f.maps.channels, f.maps.height, f.maps.width, f.stride});
  put_floats(os, f.maps.data);
}

AttentionMaps read_maps(const std::filesystem::path& path) {
  auto is = open_in(path);
  const BlockHeader h = get_header(is);
  if (h.aux <= 0) throw Error(ErrorKind::kIo, "attention map file has no stride");
  AttentionMaps f;
  f.maps = Tensor(h.d0, h.d1, h.d2);
  f.maps.data = get_floats(is, volume(h));
  f.stride = h.aux;
  f.image_height = h.d1 * h.aux;
  f.image_width = h.d2 * h.aux;
  return f;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  auto os = open_out(path);
  put_header(os, {t.channels, t.height, t.width, 0});
  put_floats(os, t.data);
}

Tensor read_tensor(const std::filesystem::path& path) {
  auto is = open_in(path);
  const BlockHeader h = get_header(is);
  Tensor t(h.d0, h.d1, h.d2);
  t.data = get_floats(is, volume(h));
  return t;
}

void write_parameters(const std::filesystem::path& path, const Parameters& p) {
  auto os = open_out(path);
  put_header(os, {static_cast<std::int32_t>(p.weights.size()), 0, 0, 0});
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    put_header(os, {p.weights[i].rows, p.weights[i].cols, 1, 0});
    put_floats(os, p.weights[i].data);
    put_header(os, {static_cast<std::int32_t>(p.biases[i].size()), 1, 1, 0});
    put_floats(os, p.biases[i]);
  }
}

Parameters read_parameters(const std::filesystem::path& path) {
  auto is = open_in(path);
  const BlockHeader top = get_header(is);
  Parameters p;
  for (int i = 0; i < top.d0; ++i) {
    const BlockHeader wh = get_header(is);
    WeightMatrix w(wh.d0, wh.d1);
    w.data = get_floats(is, volume(wh));
    const BlockHeader bh = get_header(is);
    if (bh.d0 != wh.d0) throw Error(ErrorKind::kIo, "bias length does not match weights");
    p.weights.push_back(std::move(w));
    p.biases.push_back(get_floats(is, volume(bh)));
  }
  return p;
}

std::vector<std::uint32_t> rle_encode(const BinaryGrid& grid) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (auto c : grid.cells) {
    const std::uint8_t v = c ? 1 : 0;
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

BinaryGrid rle_decode(int height, int width, const std::vector<std::uint32_t>& runs) {
  BinaryGrid grid(height, width);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto run : runs) {
    if (pos + run > grid.cells.size()) throw Error(ErrorKind::kIo, "RLE overruns the grid");
    std::fill_n(grid.cells.begin() + static_cast<std::ptrdiff_t>(pos), run, value);
    pos += run;
    value ^= 1;
  }
  if (pos != grid.cells.size()) throw Error(ErrorKind::kIo, "RLE does not cover the grid");
  return grid;
}

void write_pgm(const std::filesystem::path& path, const BinaryGrid& grid) {
  auto os = open_out(path);
  os << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  for (auto c : grid.cells) os.put(c ? static_cast<char>(255) : static_cast<char>(0));
}

Json to_json(const BBox& b) { return Json::array({b.x_tl, b.y_tl, b.x_dr, b.y_dr}); }

BBox bbox_from_json(const Json& j) {
  check_input(j.is_array() && j.size() == 4, "bbox must be [x_tl, y_tl, x_dr, y_dr]");
  BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  check_input(b.valid(), "bbox must have x_dr > x_tl and y_dr > y_tl");
  return b;
}

namespace {

template <typename Shape>
Json points_to_json(const Shape& s) {
  Json arr = Json::array();
  for (const auto& p : s.points) arr.push_back(Json::array({p.x, p.y}));
  return arr;
}

template <typename Shape>
Shape points_from_json(const Json& j) {
  check_input(j.is_array() && j.size() == kNumLandmarks, "expected 5 [x, y] points");
  Shape s;
  for (int i = 0; i < kNumLandmarks; ++i) {
    check_input(j[i].is_array() && j[i].size() == 2, "expected [x, y] point");
    s.points[i] = {j[i][0].get<double>(), j[i][1].get<double>()};
  }
  return s;
}

}  // namespace

Json to_json(const LandmarkSet& l) { return points_to_json(l); }
LandmarkSet landmarks_from_json(const Json& j) { return points_from_json<LandmarkSet>(j); }
Json to_json(const MeanShape& m) { return points_to_json(m); }
MeanShape mean_shape_from_json(const Json& j) { return points_from_json<MeanShape>(j); }

Json to_json(const ScaleMapConfig& c) {
  return {{"s_max", c.s_max},
          {"num_bins", c.num_bins},
          {"bins_per_octave", c.bins_per_octave},
          {"base_exponent", c.base_exponent},
          {"anchor_log2", c.anchor_log2}};
}

ScaleMapConfig scale_config_from_json(const Json& j, ScaleMapConfig c) {
  c.s_max = j.value("s_max", c.s_max);
  c.num_bins = j.value("num_bins", c.num_bins);
  c.bins_per_octave = j.value("bins_per_octave", c.bins_per_octave);
  c.base_exponent = j.value("base_exponent", c.base_exponent);
  c.anchor_log2 = j.value("anchor_log2", c.anchor_log2);
  c.validate();
  return c;
}

Json to_json(const ConvSpec& c) {
  return {{"c_in", c.c_in},
          {"c_out", c.c_out},
          {"kernel", c.kernel},
          {"stride", c.stride},
          {"padding", c.padding}};
}

ConvSpec conv_spec_from_json(const Json& j) {
  ConvSpec c;
  c.c_in = j.at("c_in").get<int>();
  c.c_out = j.at("c_out").get<int>();
  c.kernel = j.value("kernel", 3);
  c.stride = j.value("stride", 1);
  c.padding = j.value("padding", c.kernel / 2);
  c.validate();
  return c;
}

Json to_json(const AttentionMaps& f) {
  Json maps = Json::array();
  for (int c = 0; c < f.maps.channels; ++c) {
    Json plane = Json::array();
    for (int y = 0; y < f.maps.height; ++y) {
      Json row = Json::array();
      for (int x = 0; x < f.maps.width; ++x) row.push_back(f.maps.at(c, y, x));
      plane.push_back(std::move(row));
    }
    maps.push_back(std::move(plane));
  }
  return {{"stride", f.stride},
          {"image_dims", Json::array({f.image_height, f.image_width})},
          {"maps", std::move(maps)}};
}

AttentionMaps maps_from_json(const Json& j) {
  AttentionMaps f;
  f.stride = j.at("stride").get<int>();
  f.image_height = j.at("image_dims")[0].get<int>();
  f.image_width = j.at("image_dims")[1].get<int>();
  const Json& maps = j.at("maps");
  const int m = static_cast<int>(maps.size());
  const int h = m > 0 ? static_cast<int>(maps[0].size()) : 0;
  const int w = h > 0 ? static_cast<int>(maps[0][0].size()) : 0;
  check_input(h == ceil_div(f.image_height, f.stride) && w == ceil_div(f.image_width, f.stride),
              "attention map dims do not match image dims and stride");
  f.maps = Tensor(m, h, w);
  for (int c = 0; c < m; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float v = maps.at(c).at(y).at(x).get<float>();
        check_input(v >= 0.0f && v <= 1.0f, "attention values must lie in [0, 1]");
        f.maps.at(c, y, x) = v;
      }
    }
  }
  return f;
}

Json to_json(const PyramidPlan& plan) {
  Json levels = Json::array();
  for (const PyramidLevel& lv : plan.levels) {
    Json regions = Json::array();
    for (const RegionProposal& r : lv.regions) {
      regions.push_back({{"center", Json::array({r.center.x, r.center.y})},
                         {"side", r.side},
                         {"bin", r.bin},
                         {"score", r.score},
                         {"cell", Json::array({r.cell_u, r.cell_v})}});
    }
    levels.push_back({{"target_length", lv.target_length},
                      {"image_dims", Json::array({lv.image_height, lv.image_width})},
                      {"proposal", {{"bin", lv.proposal.bin}, {"score", lv.proposal.score}}},
                      {"regions", std::move(regions)},
                      {"mask",
                       {{"stride", lv.mask.stride},
                        {"dims", Json::array({lv.mask.grid.height, lv.mask.grid.width})},
                        {"density", lv.mask.grid.density()},
                        {"rle", rle_encode(lv.mask.grid)}}}});
  }
  return {{"levels", std::move(levels)}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  os << text;
}

}  // namespace s2ap
