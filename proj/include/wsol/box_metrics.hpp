// Copyright 2026 The wsol-eval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsol/scoremap.hpp"
#include "wsol/thresholds.hpp"

namespace wsol {

// Axis-aligned integer box, half-open: [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  std::int64_t area() const {
    return static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
  }
  bool valid() const { return x1 > x0 && y1 > y0 && x0 >= 0 && y0 >= 0; }
  bool operator==(const Box&) const = default;
};

// Tightest box around every 8-connected component of `mask`, ordered by the
// raster position of each component's first pixel.
std::vector<Box> extract_boxes(const BinaryMask& mask);

// |a & b| / |a | b| over pixel areas.
double box_iou(const Box& a, const Box& b);

// Maximal IoU over all (estimated, ground truth) pairs; 0 when `estimated` is
// empty. Throws Error(kEmptyGroundTruth) when `ground_truth` is empty.
double best_iou(std::span<const Box> estimated,
                std::span<const Box> ground_truth);

// Box accuracy as a function of the score-map threshold, one row per IoU
// threshold delta.
struct BoxAccCurve {
  std::vector<double> taus;
  std::vector<double> deltas;
  // accuracy[d][k] is BoxAcc(taus[k], deltas[d]).
  std::vector<std::vector<double>> accuracy;
  std::int64_t n_images = 0;
};

struct DeltaOptimum {
  double delta = 0.0;
  double best_tau = 0.0;
  double best_acc = 0.0;
};

struct MaxBoxAccResult {
  double score = 0.0;
  std::vector<DeltaOptimum> per_delta;
};

// Per delta, the best accuracy over the tau grid (smallest tau on ties); the
// score is the unweighted mean over deltas. Throws Error(kEmptyCurve) if the
// curve has no thresholds or no deltas.
MaxBoxAccResult max_box_acc_v2(const BoxAccCurve& curve);

// Sweeps one score map over thresholds, tracking connected components
// incrementally as pixels switch on in decreasing score order.
//
// For every step k of `taus` (ascending) it yields the best IoU between any
// component box of {v >= taus[k]} and the ground truth, and the IoU of the
// largest component's box alone (ties: earliest first pixel in raster order).
struct ComponentSweepResult {
  std::vector<double> best_iou;
  std::vector<double> largest_iou;
};

ComponentSweepResult sweep_components(const ScoreMap& map,
                                      std::span<const Box> ground_truth,
                                      std::span<const double> taus);

// Accumulates per-image box hits over a threshold sweep. Not thread-safe;
// use one accumulator per worker and merge().
class BoxAccumulator {
 public:
  BoxAccumulator(ThresholdSpec thresholds, std::vector<double> deltas,
                 double legacy_delta = 0.5);

  // `map` must already be normalized and at ground-truth resolution.
  // Degenerate maps count as misses at every threshold.
  void add(const ScoreMap& map, std::span<const Box> ground_truth);
  void merge(const BoxAccumulator& other);

  // MaxBoxAccV2 curve over the configured deltas.
  BoxAccCurve curve() const;
  // Legacy curve: largest component only, single delta.
  BoxAccCurve legacy_curve() const;

  std::int64_t n_images() const { return n_images_; }
  std::int64_t n_degenerate() const { return n_degenerate_; }

 private:
  // Exact mode keeps each image's own step function until the global
  // threshold set is known.
  struct StepFunction {
    std::vector<double> taus;
    std::vector<std::uint32_t> hits;  // bit d: delta d; bit 31: legacy
  };

  std::vector<double> global_taus() const;
  std::vector<std::vector<std::int64_t>> exact_counts(
      const std::vector<double>& taus) const;
  BoxAccCurve make_curve(bool legacy) const;

  ThresholdSpec thresholds_;
  std::vector<double> deltas_;
  double legacy_delta_;
  std::int64_t n_images_ = 0;
  std::int64_t n_degenerate_ = 0;
  // Grid mode: hit counts, deltas_.size() rows plus one legacy row.
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<StepFunction> steps_;
};

// In-memory conveniences over BoxAccumulator.
using BoxSample = std::pair<ScoreMap, std::vector<Box>>;

BoxAccCurve box_acc_sweep(std::span<const BoxSample> samples,
                          const ThresholdSpec& thresholds,
                          std::vector<double> deltas = {0.3, 0.5, 0.7});

double max_box_acc_v1(std::span<const BoxSample> samples,
                      const ThresholdSpec& thresholds, double delta = 0.5);

}  // namespace wsol
