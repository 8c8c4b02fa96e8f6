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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsol/box_metrics.hpp"
#include "wsol/dataset_io.hpp"
#include "wsol/mask_metrics.hpp"
#include "wsol/report.hpp"
#include "wsol/thresholds.hpp"

namespace wsol {

enum class Task { kBoxes, kMasks };
enum class Normalization { kMinMax, kMax, kNone };
enum class ResizeOrder { kNormalizeFirst, kResizeFirst };
enum class Pooling { kCategory, kImage };

std::string_view to_string(Task task);
std::string_view to_string(Normalization norm);
std::string_view to_string(ResizeOrder order);
std::string_view to_string(Pooling pooling);

struct EvalConfig {
  Task task = Task::kBoxes;
  Normalization normalization = Normalization::kMinMax;
  ResizeOrder resize_order = ResizeOrder::kNormalizeFirst;
  ThresholdSpec thresholds = ThresholdSpec::uniform(1000);
  std::vector<double> deltas{0.3, 0.5, 0.7};
  double legacy_delta = 0.5;
  double px_acc_tau = 0.5;
  Pooling pooling = Pooling::kCategory;
  // Gaussian blur applied to each incoming map at its own resolution; 0 = off.
  double blur_sigma = 0.0;
  int jobs = 1;
};

// Ground truth for one split. Implementations must be safe to query from
// several threads at once.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual Task task() const = 0;
  virtual const io::SplitManifest& manifest() const = 0;
  virtual std::vector<Box> boxes(const io::ManifestEntry& entry) const;
  virtual TernaryMask mask(const io::ManifestEntry& entry) const;
};

class BoxGroundTruth : public GroundTruth {
 public:
  BoxGroundTruth(io::SplitManifest manifest, io::BoxAnnotationSet boxes)
      : manifest_(std::move(manifest)), boxes_(std::move(boxes)) {}

  Task task() const override { return Task::kBoxes; }
  const io::SplitManifest& manifest() const override { return manifest_; }
  std::vector<Box> boxes(const io::ManifestEntry& entry) const override;

 private:
  io::SplitManifest manifest_;
  io::BoxAnnotationSet boxes_;
};

// Loads masks from <root>/<image_id>.{png,pgm} on demand.
class MaskDirectoryGroundTruth : public GroundTruth {
 public:
  MaskDirectoryGroundTruth(io::SplitManifest manifest,
                           std::filesystem::path root)
      : manifest_(std::move(manifest)), root_(std::move(root)) {}

  Task task() const override { return Task::kMasks; }
  const io::SplitManifest& manifest() const override { return manifest_; }
  TernaryMask mask(const io::ManifestEntry& entry) const override;

 private:
  io::SplitManifest manifest_;
  std::filesystem::path root_;
};

class InMemoryMaskGroundTruth : public GroundTruth {
 public:
  InMemoryMaskGroundTruth(io::SplitManifest manifest,
                          std::map<std::string, TernaryMask> masks)
      : manifest_(std::move(manifest)), masks_(std::move(masks)) {}

  Task task() const override { return Task::kMasks; }
  const io::SplitManifest& manifest() const override { return manifest_; }
  TernaryMask mask(const io::ManifestEntry& entry) const override;

 private:
  io::SplitManifest manifest_;
  std::map<std::string, TernaryMask> masks_;
};

// Brings a raw map to ground-truth resolution: optional blur, then
// normalization and resizing in the configured order.
ScoreMap prepare_map(const ScoreMap& raw, const io::ManifestEntry& entry,
                     const EvalConfig& config);

struct Evaluation {
  MetricReport report;
  // Boxes task.
  std::optional<BoxAccCurve> box_curve;
  std::optional<BoxAccCurve> legacy_curve;
  // Masks task: pooled over all categories, and per category.
  std::optional<PrCurve> pooled_pr;
  std::map<int, PrCurve> category_pr;
};

// Scores every map in `maps` against `gt`. Every manifest image must appear
// exactly once in the stream; errors name the offending image.
Evaluation evaluate(io::ScoreMapSource& maps, const GroundTruth& gt,
                    const EvalConfig& config);

// Headline score: MaxBoxAccV2 for boxes, mPxAP for masks.
double headline_score(const MetricReport& report);

}  // namespace wsol
