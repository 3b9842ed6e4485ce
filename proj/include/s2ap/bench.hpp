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
#include <functional>
#include <string>
#include <vector>

#include "s2ap/error.hpp"
#include "s2ap/labels.hpp"
#include "s2ap/maskconv.hpp"
#include "s2ap/scenes.hpp"
#include "s2ap/sscu.hpp"
#include "s2ap/toynet.hpp"

namespace s2ap {

/// Produces attention maps for a scene.
using Predictor = std::function<AttentionMaps(const Scene&)>;

/// Ground-truth labels at `stride`; the upper bound any network can reach.
Predictor oracle_predictor(int stride, const ScaleMapConfig& cfg = {});

/// Sigmoid of the toy network's logits on the rendered scene.
Predictor toynet_predictor(NetworkSpec net, Parameters params, const ScaleMapConfig& cfg = {});

std::vector<AttentionMaps> predict_all(const std::vector<Scene>& scenes,
                                       const Predictor& predictor, int workers = 1);

struct EvalPoint {
  double threshold = 0.0;
  double ratio = 0.0;            // predicted regions / ground-truth faces
  double recall = 0.0;           // bin within +-4 and IoU >= 0.5, one-to-one
  double scale_recall = 0.0;     // some proposal bin within +-4
  double location_recall = 0.0;  // some region with IoU >= 0.5
  std::uint64_t predicted = 0;
  std::uint64_t ground_truth = 0;
};

struct MatchStats {
  std::uint64_t predicted = 0;
  std::uint64_t ground_truth = 0;
  std::uint64_t matched = 0;
  std::uint64_t scale_hits = 0;
  std::uint64_t location_hits = 0;
};

/// Greedy one-to-one matching of decoded regions (by descending score)
/// against a scene's faces.
MatchStats match_scene(const Scene& scene, const DecodeResult& decoded,
                       const ScaleMapConfig& cfg = {});

std::vector<double> default_thresholds();

/// Sweeps one threshold for both scale proposals and location decoding.
std::vector<EvalPoint> eval_recall_ratio(const std::vector<Scene>& scenes,
                                         const std::vector<AttentionMaps>& predicted,
                                         const DecodeParams& params,
                                         const std::vector<double>& thresholds,
                                         int workers = 1);

class NotAchievableError : public Error {
 public:
  NotAchievableError(const std::string& message, EvalPoint best)
      : Error(ErrorKind::kNotAchievable, message), best_(best) {}
  const EvalPoint& best() const { return best_; }

 private:
  EvalPoint best_;
};

/// Largest threshold whose recall reaches `target`.
double select_threshold(const std::vector<EvalPoint>& points, double target_recall);

struct CostRow {
  int scene = 0;
  std::string kind;  // "baseline" or "planned"
  int level = 0;
  double target_length = 0.0;
  int height = 0;
  int width = 0;
  double density = 1.0;
  std::uint64_t dense_flops = 0;
  std::uint64_t masked_flops = 0;
};

struct CostReport {
  std::vector<CostRow> rows;
  std::uint64_t baseline = 0;  // dense FLOPs over the fixed six-level pyramid
  std::uint64_t planned = 0;   // masked FLOPs over the planned levels
  double speedup() const;
};

/// Long sides 1414 * 2^k for k = 0, -1, ..., -5.
std::vector<double> baseline_pyramid();

/// Stand-in detector trunk: four 3x3 convs at strides 2, 2, 2, 2.
std::vector<ConvSpec> default_detector();

/// Dense FLOPs of the detector on an image of the given dims.
std::uint64_t detector_flops(const std::vector<ConvSpec>& detector, int height, int width);

/// Masked FLOPs of the detector on one planned level; the level mask is
/// reduced to each layer's stride with mask_downsample.
std::uint64_t planned_level_flops(const std::vector<ConvSpec>& detector,
                                  const PyramidLevel& level, double* density = nullptr);

CostReport cost_report(const std::vector<Scene>& scenes,
                       const std::vector<DecodeResult>& decoded,
                       const std::vector<ConvSpec>& detector);

struct PipelineResult {
  DecodeResult decoded;
  CostReport cost;
  MatchStats match;
};

PipelineResult run_pipeline(const Scene& scene, const AttentionMaps& predicted,
                            const DecodeParams& params, const std::vector<ConvSpec>& detector,
                            int scene_index = 0);

std::string eval_csv(const std::vector<EvalPoint>& points);
std::string cost_csv(const CostReport& report);

}  // namespace s2ap
