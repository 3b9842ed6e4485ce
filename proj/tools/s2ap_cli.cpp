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

// s2ap: command-line harness over the library. Every subcommand writes its
// artifacts under --out and finishes with summary.json; failures print one
// JSON error object on stderr and exit nonzero.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "s2ap/bench.hpp"
#include "s2ap/config.hpp"
#include "s2ap/error.hpp"
#include "s2ap/io.hpp"
#include "s2ap/labels.hpp"
#include "s2ap/maskconv.hpp"
#include "s2ap/parallel.hpp"
#include "s2ap/scenes.hpp"
#include "s2ap/sscu.hpp"
#include "s2ap/toynet.hpp"

namespace fs = std::filesystem;
using namespace s2ap;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  int workers = 1;
};

struct Inputs {
  std::string scenes;  // scene list JSON; generated from the config when empty
  std::string params;  // toy network parameters; oracle labels when empty
  double target = 0.98;
  bool pgm = false;
  int trials = 3;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config; missing keys keep defaults");
  cmd->add_option("--seed", c.seed, "seed for scene generation and initialization");
  cmd->add_option("--out", c.out, "output directory")->required();
  cmd->add_option("--workers", c.workers, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

Config config_of(const Common& c) {
  return c.config.empty() ? config_from_json(Json::object()) : load_config(c.config);
}

fs::path prepare_out(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + c.out + ": " + ec.message());
  return c.out;
}

std::vector<Scene> scenes_of(const Config& cfg, const Common& c, const Inputs& in) {
  if (!in.scenes.empty()) {
    try {
      return scenes_from_json(Json::parse(read_text(in.scenes)));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kInvalidInput, "bad scene file: " + std::string(e.what()));
    }
  }
  return gen_scenes(cfg.scene_count, cfg.scenes, c.seed);
}

struct PredictorChoice {
  Predictor predict;
  std::string name;
};

PredictorChoice predictor_of(const Config& cfg, const Inputs& in) {
  if (in.params.empty()) return {oracle_predictor(cfg.label_stride, cfg.scale), "oracle"};
  return {toynet_predictor(cfg.network, read_parameters(in.params), cfg.scale), "toynet"};
}

void write_summary(const fs::path& out, const std::string& command, const Common& c,
                   const Config& cfg, Json body) {
  Json j = {{"command", command}, {"seed", c.seed}};
  for (auto& [k, v] : body.items()) j[k] = v;
  j["config"] = to_json(cfg);
  write_text(out / "summary.json", j.dump(2) + "\n");
}

std::vector<DecodeResult> decode_all(const std::vector<AttentionMaps>& maps,
                                     const DecodeParams& params, int workers) {
  std::vector<DecodeResult> out(maps.size());
  parallel_for(maps.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = decode(maps[i], params);
  });
  return out;
}

std::string regions_csv(const std::vector<DecodeResult>& decoded) {
  std::string s = "scene,level,target_length,bin,score,center_x,center_y,side,mask_density\n";
  char buf[256];
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    const auto& levels = decoded[i].plan.levels;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      for (const RegionProposal& r : levels[l].regions) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%d,%.6f,%.3f,%.3f,%.3f,%.6f\n", i, l,
                      levels[l].target_length, r.bin, r.score, r.center.x, r.center.y, r.side,
                      levels[l].mask.grid.density());
        s += buf;
      }
    }
  }
  return s;
}

Json eval_point_json(const EvalPoint& p) {
  return {{"threshold", p.threshold},     {"ratio", p.ratio},
          {"recall", p.recall},           {"scale_recall", p.scale_recall},
          {"location_recall", p.location_recall}, {"predicted", p.predicted},
          {"ground_truth", p.ground_truth}};
}

// Picks the operating threshold; falls back to the best point when the
// target is out of reach and says so in the summary.
Json select(const std::vector<EvalPoint>& points, double target, double& threshold) {
  Json j = {{"target_recall", target}};
  try {
    threshold = select_threshold(points, target);
    j["target_met"] = true;
    for (const EvalPoint& p : points)
      if (p.threshold == threshold) j["selected"] = eval_point_json(p);
  } catch (const NotAchievableError& e) {
    threshold = e.best().threshold;
    j["target_met"] = false;
    j["selected"] = eval_point_json(e.best());
  }
  return j;
}

Json cost_json(const CostReport& r) {
  const double speedup = r.speedup();
  return {{"baseline_flops", r.baseline},
          {"planned_flops", r.planned},
          {"speedup", std::isfinite(speedup) ? Json(speedup) : Json(nullptr)}};
}

// ---- subcommands ----

void cmd_gen_scenes(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  write_text(out / "scenes.json", scenes_to_json(scenes).dump() + "\n");
  std::string csv = "scene,face,x_tl,y_tl,x_dr,y_dr,size,bin\n";
  char buf[256];
  std::size_t faces = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (std::size_t k = 0; k < scenes[i].faces.size(); ++k) {
      const BBox& b = scenes[i].faces[k].box;
      const double size = face_size(b);
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%d\n", i, k, b.x_tl,
                    b.y_tl, b.x_dr, b.y_dr, size,
                    size_to_bin(size, scenes[i].l_max(), cfg.scale).bin);
      csv += buf;
      ++faces;
    }
  }
  write_text(out / "scenes.csv", csv);
  write_summary(out, "gen-scenes", c, cfg, {{"scenes", scenes.size()}, {"faces", faces}});
}

void cmd_make_labels(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  fs::create_directories(out / "labels");
  std::vector<AttentionMaps> maps(scenes.size());
  parallel_for(scenes.size(), c.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      maps[i] = render_labels(scenes[i].boxes(), scenes[i].height, scenes[i].width,
                              cfg.label_stride, cfg.scale);
  });
  std::string csv = "scene,face,bin,u,v\n";
  char buf[128];
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "scene_%04zu.bin", i);
    write_maps(out / "labels" / buf, maps[i]);
    for (std::size_t k = 0; k < scenes[i].faces.size(); ++k) {
      const AttentionCenter a = attention_center(scenes[i].faces[k].box, cfg.label_stride,
                                                 scenes[i].height, scenes[i].width, cfg.scale);
      std::snprintf(buf, sizeof buf, "%zu,%zu,%d,%d,%d\n", i, k, a.bin, a.u, a.v);
      csv += buf;
    }
  }
  write_text(out / "labels.csv", csv);
  write_summary(out, "make-labels", c, cfg,
                {{"scenes", scenes.size()}, {"stride", cfg.label_stride}, {"bins", cfg.scale.num_bins}});
}

void cmd_train_toy(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  check_input(cfg.label_stride == cfg.network.stride(),
              "labels.stride must equal the network stride (" +
                  std::to_string(cfg.network.stride()) + ") for training");
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  std::vector<Sample> data;
  for (const Scene& s : scenes)
    data.push_back({render_scene(s),
                    render_labels(s.boxes(), s.height, s.width, cfg.label_stride, cfg.scale)});
  const auto start = init_parameters<float>(cfg.network, c.seed);
  const auto result = train(cfg.network, start, data, cfg.train);
  write_parameters(out / "params.bin", result.params);
  std::string csv = "iteration,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i, result.loss_trace[i]);
    csv += buf;
  }
  write_text(out / "loss.csv", csv);
  Json body = {{"samples", data.size()}, {"iterations", result.loss_trace.size()}};
  if (!result.loss_trace.empty()) {
    body["initial_loss"] = result.loss_trace.front();
    body["final_loss"] = result.loss_trace.back();
  }
  write_summary(out, "train-toy", c, cfg, body);
}

void cmd_decode(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  const auto pred = predictor_of(cfg, in);
  const auto maps = predict_all(scenes, pred.predict, c.workers);
  const auto decoded = decode_all(maps, cfg.decode, c.workers);
  write_text(out / "regions.csv", regions_csv(decoded));
  Json plans = Json::array();
  std::size_t levels = 0, regions = 0;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    plans.push_back(to_json(decoded[i].plan));
    for (std::size_t l = 0; l < decoded[i].plan.levels.size(); ++l) {
      const auto& level = decoded[i].plan.levels[l];
      ++levels;
      regions += level.regions.size();
      if (in.pgm) {
        write_pgm(out / ("mask_" + std::to_string(i) + "_" + std::to_string(l) + ".pgm"),
                  level.mask.grid);
      }
    }
  }
  write_text(out / "plans.json", plans.dump() + "\n");
  write_summary(out, "decode", c, cfg,
                {{"predictor", pred.name}, {"scenes", scenes.size()}, {"levels", levels},
                 {"regions", regions}});
}

void cmd_eval(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  const auto pred = predictor_of(cfg, in);
  const auto maps = predict_all(scenes, pred.predict, c.workers);
  const auto points = eval_recall_ratio(scenes, maps, cfg.decode, cfg.thresholds, c.workers);
  write_text(out / "eval.csv", eval_csv(points));
  double threshold = 0.0;
  Json body = select(points, in.target, threshold);
  body["predictor"] = pred.name;
  body["scenes"] = scenes.size();
  write_summary(out, "eval", c, cfg, body);
}

void cmd_cost_report(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  const auto pred = predictor_of(cfg, in);
  const auto maps = predict_all(scenes, pred.predict, c.workers);
  const auto decoded = decode_all(maps, cfg.decode, c.workers);
  const CostReport report = cost_report(scenes, decoded, cfg.detector);
  write_text(out / "cost.csv", cost_csv(report));
  Json body = cost_json(report);
  body["predictor"] = pred.name;
  body["scenes"] = scenes.size();
  write_summary(out, "cost-report", c, cfg, body);
}

// Times dense and masked convolution for each detector layer at a sweep of
// mask densities. Wall-clock columns vary run to run; everything else is
// seeded.
void cmd_bench_conv(const Common& c, const Inputs& in) {
  using Clock = std::chrono::steady_clock;
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  check_input(in.trials >= 1, "trials must be >= 1");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  const std::vector<double> densities = {0.05, 0.1, 0.25, 0.5, 1.0};
  std::string csv =
      "layer,density,positions,active,dense_flops,masked_flops,dense_ms,masked_ms,bitwise_equal\n";
  char buf[256];
  bool all_equal = true;
  int h = cfg.scenes.height, w = cfg.scenes.width;
  for (std::size_t k = 0; k < cfg.detector.size(); ++k) {
    const ConvSpec& s = cfg.detector[k];
    Tensor x(s.c_in, h, w);
    for (float& v : x.data) v = uni(rng);
    WeightMatrix wt(s.c_out, s.columns());
    for (float& v : wt.data) v = uni(rng);
    const int oh = s.out_height(h), ow = s.out_width(w);
    for (double d : densities) {
      std::bernoulli_distribution on(d);
      ConvMask mask(oh, ow);
      for (auto& cell : mask.cells) cell = on(rng) ? 1 : 0;
      double dense_ms = 1e300, masked_ms = 1e300;
      Tensor dense, masked;
      for (int t = 0; t < in.trials; ++t) {
        auto t0 = Clock::now();
        dense = dense_conv(x, wt, s, c.workers);
        auto t1 = Clock::now();
        masked = masked_conv(x, wt, s, mask, c.workers);
        auto t2 = Clock::now();
        dense_ms = std::min(dense_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
        masked_ms = std::min(masked_ms, std::chrono::duration<double, std::milli>(t2 - t1).count());
      }
      bool equal = true;
      const std::size_t plane = static_cast<std::size_t>(oh) * ow;
      for (int o = 0; o < s.c_out && equal; ++o)
        for (std::size_t p = 0; p < plane && equal; ++p) {
          const float want = mask.cells[p] ? dense.data[o * plane + p] : 0.0f;
          equal = std::memcmp(&want, &masked.data[o * plane + p], sizeof(float)) == 0;
        }
      all_equal = all_equal && equal;
      const FlopCount f = flops(s, oh, ow, &mask);
      std::snprintf(buf, sizeof buf, "%zu,%.2f,%llu,%llu,%llu,%llu,%.3f,%.3f,%d\n", k, d,
                    static_cast<unsigned long long>(f.positions),
                    static_cast<unsigned long long>(f.active),
                    static_cast<unsigned long long>(f.dense),
                    static_cast<unsigned long long>(f.masked), dense_ms, masked_ms, equal ? 1 : 0);
      csv += buf;
    }
    h = oh;
    w = ow;
  }
  write_text(out / "conv.csv", csv);
  write_summary(out, "bench-conv", c, cfg,
                {{"layers", cfg.detector.size()}, {"trials", in.trials}, {"bitwise_equal", all_equal}});
  if (!all_equal) throw Error(ErrorKind::kInvalidInput, "masked output differs from dense output");
}

// Full pipeline: scenes -> predictor -> threshold sweep -> operating point
// -> plans, regions and cost at that point.
void cmd_run(const Common& c, const Inputs& in) {
  const Config cfg = config_of(c);
  const fs::path out = prepare_out(c);
  const auto scenes = scenes_of(cfg, c, in);
  const auto pred = predictor_of(cfg, in);
  const auto maps = predict_all(scenes, pred.predict, c.workers);
  const auto points = eval_recall_ratio(scenes, maps, cfg.decode, cfg.thresholds, c.workers);
  double threshold = 0.0;
  Json body = select(points, in.target, threshold);

  DecodeParams params = cfg.decode;
  params.scale_threshold = threshold;
  params.location_threshold = threshold;
  const auto decoded = decode_all(maps, params, c.workers);
  const CostReport report = cost_report(scenes, decoded, cfg.detector);

  write_text(out / "scenes.json", scenes_to_json(scenes).dump() + "\n");
  write_text(out / "eval.csv", eval_csv(points));
  write_text(out / "regions.csv", regions_csv(decoded));
  write_text(out / "cost.csv", cost_csv(report));
  body["predictor"] = pred.name;
  body["scenes"] = scenes.size();
  body["cost"] = cost_json(report);
  write_summary(out, "run", c, cfg, body);
}

void print_error(const std::string& kind, const std::string& message) {
  Json j = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s2ap: scale and spatial attention pipeline tools"};
  app.require_subcommand(1);
  Common common;
  Inputs inputs;

  struct Entry {
    const char* name;
    const char* help;
    void (*fn)(const Common&, const Inputs&);
  };
  const std::vector<Entry> entries = {
      {"gen-scenes", "generate synthetic scenes", cmd_gen_scenes},
      {"make-labels", "render attention label maps", cmd_make_labels},
      {"train-toy", "train the toy attention network", cmd_train_toy},
      {"decode", "decode attention maps into pyramid plans", cmd_decode},
      {"eval", "sweep thresholds for recall versus proposal ratio", cmd_eval},
      {"bench-conv", "time dense and masked convolution", cmd_bench_conv},
      {"cost-report", "dense versus planned detector FLOPs", cmd_cost_report},
      {"run", "end-to-end pipeline at the selected threshold", cmd_run},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> cmds;
  for (const Entry& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, common);
    const std::string name = e.name;
    if (name != "bench-conv") cmd->add_option("--scenes", inputs.scenes, "scene list JSON");
    if (name == "decode" || name == "eval" || name == "cost-report" || name == "run")
      cmd->add_option("--params", inputs.params, "toy network parameters (default: oracle labels)");
    if (name == "eval" || name == "run")
      cmd->add_option("--target", inputs.target, "recall target for threshold selection");
    if (name == "decode") cmd->add_flag("--pgm", inputs.pgm, "also write masks as PGM");
    if (name == "bench-conv") cmd->add_option("--trials", inputs.trials, "timing repeats");
    cmds.emplace_back(cmd, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    for (auto& [cmd, entry] : cmds) {
      if (cmd->parsed()) entry->fn(common, inputs);
    }
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what());
    return kExitError;
  } catch (const Json::exception& e) {
    print_error("invalid_input", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitError;
  }
  return 0;
}
