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

#include "s2ap/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "s2ap/parallel.hpp"

namespace s2ap {

namespace {

constexpr int kBinTolerance = 4;
constexpr double kMatchIoU = 0.5;

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

}  // namespace

Predictor oracle_predictor(int stride, const ScaleMapConfig& cfg) {
  return [stride, cfg](const Scene& scene) {
    return render_labels(scene.boxes(), scene.height, scene.width, stride, cfg);
  };
}

Predictor toynet_predictor(NetworkSpec net, Parameters params, const ScaleMapConfig& cfg) {
  net.validate(cfg.num_bins);
  return [net = std::move(net), params = std::move(params), cfg](const Scene& scene) {
    const Tensor image = render_scene(scene);
    const LogitMaps<float> logits = forward(net, params, image);
    AttentionMaps like = empty_attention(scene.height, scene.width, net.stride(), cfg);
    return sigmoid_maps(logits, like);
  };
}

std::vector<AttentionMaps> predict_all(const std::vector<Scene>& scenes,
                                       const Predictor& predictor, int workers) {
  std::vector<AttentionMaps> out(scenes.size());
  parallel_for(scenes.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = predictor(scenes[i]);
  });
  return out;
}

MatchStats match_scene(const Scene& scene, const DecodeResult& decoded,
                       const ScaleMapConfig& cfg) {
  MatchStats stats;
  const std::size_t n_gt = scene.faces.size();
  stats.ground_truth = n_gt;
  std::vector<int> gt_bins(n_gt);
  for (std::size_t g = 0; g < n_gt; ++g) {
    gt_bins[g] = size_to_bin(face_size(scene.faces[g].box), scene.l_max(), cfg).bin;
  }

  std::vector<const RegionProposal*> candidates;
  for (const PyramidLevel& lv : decoded.plan.levels) {
    for (const RegionProposal& r : lv.regions) candidates.push_back(&r);
  }
  stats.predicted = candidates.size();
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto* a, const auto* b) { return a->score > b->score; });

  std::vector<bool> matched(n_gt, false);
  std::vector<bool> located(n_gt, false);
  for (const RegionProposal* r : candidates) {
    const BBox pred = r->box();
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < n_gt; ++g) {
      const double o = iou(pred, scene.faces[g].box);
      if (o >= kMatchIoU) located[g] = true;
      if (matched[g] || o < kMatchIoU || std::abs(r->bin - gt_bins[g]) > kBinTolerance) {
        continue;
      }
      if (o > best_iou) {
        best_iou = o;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      matched[best] = true;
      ++stats.matched;
    }
  }
  for (std::size_t g = 0; g < n_gt; ++g) {
    stats.location_hits += located[g];
    stats.scale_hits += std::any_of(decoded.proposals.begin(), decoded.proposals.end(),
                                    [&](const ScaleProposal& p) {
                                      return std::abs(p.bin - gt_bins[g]) <= kBinTolerance;
                                    });
  }
  return stats;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 20; ++k) t.push_back(k / 20.0);
  return t;
}

std::vector<EvalPoint> eval_recall_ratio(const std::vector<Scene>& scenes,
                                         const std::vector<AttentionMaps>& predicted,
                                         const DecodeParams& params,
                                         const std::vector<double>& thresholds, int workers) {
  check_input(!scenes.empty(), "evaluation needs at least one scene");
  check_input(predicted.size() == scenes.size(), "one prediction per scene required");
  std::vector<EvalPoint> points;
  for (double t : thresholds) {
    DecodeParams p = params;
    p.scale_threshold = t;
    p.location_threshold = t;
    std::vector<MatchStats> per_scene(scenes.size());
    parallel_for(scenes.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        per_scene[i] = match_scene(scenes[i], decode(predicted[i], p), p.scale);
      }
    });
    MatchStats total;
    for (const MatchStats& s : per_scene) {
      total.predicted += s.predicted;
      total.ground_truth += s.ground_truth;
      total.matched += s.matched;
      total.scale_hits += s.scale_hits;
      total.location_hits += s.location_hits;
    }
    EvalPoint e;
    e.threshold = t;
    e.predicted = total.predicted;
    e.ground_truth = total.ground_truth;
    const double gt = static_cast<double>(total.ground_truth);
    e.ratio = gt > 0 ? total.predicted / gt : 0.0;
    e.recall = gt > 0 ? total.matched / gt : 1.0;
    e.scale_recall = gt > 0 ? total.scale_hits / gt : 1.0;
    e.location_recall = gt > 0 ? total.location_hits / gt : 1.0;
    points.push_back(e);
  }
  return points;
}

double select_threshold(const std::vector<EvalPoint>& points, double target_recall) {
  check_input(!points.empty(), "no evaluation points to select from");
  const EvalPoint* chosen = nullptr;
  const EvalPoint* best = &points.front();
  for (const EvalPoint& p : points) {
    if (p.recall >= target_recall && (!chosen || p.threshold > chosen->threshold)) chosen = &p;
    if (p.recall > best->recall || (p.recall == best->recall && p.threshold > best->threshold)) {
      best = &p;
    }
  }
  if (!chosen) {
    throw NotAchievableError(format("recall %.4f is not reached; best is %.4f at threshold %.4f",
                                    target_recall, best->recall, best->threshold),
                             *best);
  }
  return chosen->threshold;
}

double CostReport::speedup() const {
  if (planned == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(baseline) / static_cast<double>(planned);
}

std::vector<double> baseline_pyramid() {
  std::vector<double> levels;
  for (int k = 0; k >= -5; --k) levels.push_back(1414.0 * std::exp2(k));
  return levels;
}

std::vector<ConvSpec> default_detector() {
  return {{3, 16, 3, 2, 1}, {16, 32, 3, 2, 1}, {32, 64, 3, 2, 1}, {64, 64, 3, 2, 1}};
}

std::uint64_t detector_flops(const std::vector<ConvSpec>& detector, int height, int width) {
  std::uint64_t total = 0;
  for (const ConvSpec& spec : detector) {
    const int oh = spec.out_height(height);
    const int ow = spec.out_width(width);
    check_input(oh > 0 && ow > 0, "image too small for the detector");
    total += flops(spec, oh, ow).dense;
    height = oh;
    width = ow;
  }
  return total;
}

std::uint64_t planned_level_flops(const std::vector<ConvSpec>& detector,
                                  const PyramidLevel& level, double* density) {
  const SpatialMask& mask = level.mask;
  if (density) *density = mask.grid.density();
  int height = level.image_height;
  int width = level.image_width;
  int stride = 1;
  std::uint64_t total = 0;
  for (const ConvSpec& spec : detector) {
    const int oh = spec.out_height(height);
    const int ow = spec.out_width(width);
    check_input(oh > 0 && ow > 0, "image too small for the detector");
    stride *= spec.stride;
    check_input(stride % mask.stride == 0, "detector layer is finer than the mask stride");
    const ConvMask layer_mask = mask_downsample(mask.grid, stride / mask.stride);
    check_input(layer_mask.height == oh && layer_mask.width == ow,
                "level mask does not align with detector layer outputs");
    total += flops(spec, oh, ow, &layer_mask).masked;
    height = oh;
    width = ow;
  }
  return total;
}

CostReport cost_report(const std::vector<Scene>& scenes,
                       const std::vector<DecodeResult>& decoded,
                       const std::vector<ConvSpec>& detector) {
  check_input(!detector.empty(), "detector spec must not be empty");
  check_input(decoded.size() == scenes.size(), "one decode result per scene required");
  CostReport report;
  const std::vector<double> pyramid = baseline_pyramid();
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const Scene& scene = scenes[s];
    for (std::size_t k = 0; k < pyramid.size(); ++k) {
      CostRow row;
      row.scene = static_cast<int>(s);
      row.kind = "baseline";
      row.level = static_cast<int>(k);
      row.target_length = pyramid[k];
      std::tie(row.height, row.width) = resized_dims(scene.height, scene.width, pyramid[k]);
      row.dense_flops = detector_flops(detector, row.height, row.width);
      row.masked_flops = row.dense_flops;
      report.baseline += row.dense_flops;
      report.rows.push_back(row);
    }
    const auto& levels = decoded[s].plan.levels;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      CostRow row;
      row.scene = static_cast<int>(s);
      row.kind = "planned";
      row.level = static_cast<int>(k);
      row.target_length = levels[k].target_length;
      row.height = levels[k].image_height;
      row.width = levels[k].image_width;
      row.dense_flops = detector_flops(detector, row.height, row.width);
      row.masked_flops = planned_level_flops(detector, levels[k], &row.density);
      report.planned += row.masked_flops;
      report.rows.push_back(row);
    }
  }
  return report;
}

PipelineResult run_pipeline(const Scene& scene, const AttentionMaps& predicted,
                            const DecodeParams& params, const std::vector<ConvSpec>& detector,
                            int scene_index) {
  PipelineResult result;
  result.decoded = decode(predicted, params);
  result.cost = cost_report({scene}, {result.decoded}, detector);
  for (CostRow& row : result.cost.rows) row.scene = scene_index;
  result.match = match_scene(scene, result.decoded, params.scale);
  return result;
}

std::string eval_csv(const std::vector<EvalPoint>& points) {
  std::string out = "threshold,ratio,recall,scale_recall,location_recall,predicted,ground_truth\n";
  for (const EvalPoint& p : points) {
    out += format("%.4f,%.6f,%.6f,%.6f,%.6f,%llu,%llu\n", p.threshold, p.ratio, p.recall,
                  p.scale_recall, p.location_recall,
                  static_cast<unsigned long long>(p.predicted),
                  static_cast<unsigned long long>(p.ground_truth));
  }
  return out;
}

std::string cost_csv(const CostReport& report) {
  std::string out =
      "scene,kind,level,target_length,height,width,density,dense_flops,masked_flops\n";
  for (const CostRow& r : report.rows) {
    out += format("%d,%s,%d,%.4f,%d,%d,%.6f,%llu,%llu\n", r.scene, r.kind.c_str(), r.level,
                  r.target_length, r.height, r.width, r.density,
                  static_cast<unsigned long long>(r.dense_flops),
                  static_cast<unsigned long long>(r.masked_flops));
  }
  return out;
}

}  // namespace s2ap
