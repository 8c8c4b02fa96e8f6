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
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "wsol/scoremap.hpp"
#include "wsol/thresholds.hpp"

namespace wsol {

enum class PixelLabel : std::uint8_t {
  kBackground = 0,
  kForeground = 1,
  kIgnore = 2,
};

class TernaryMask {
 public:
  TernaryMask() = default;
  TernaryMask(int height, int width, std::vector<PixelLabel> labels);
  TernaryMask(int height, int width, PixelLabel fill = PixelLabel::kBackground);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return labels_.size(); }

  PixelLabel at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int row, int col, PixelLabel label) {
    labels_[static_cast<std::size_t>(row) * width_ + col] = label;
  }
  std::span<const PixelLabel> labels() const { return labels_; }

  bool operator==(const TernaryMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<PixelLabel> labels_;
};

struct PixelCounts {
  std::int64_t foreground = 0;
  std::int64_t background = 0;
  std::int64_t ignored = 0;
};

// Pooled pixel precision / recall over ascending thresholds.
struct PrCurve {
  std::vector<double> taus;
  std::vector<double> precision;
  std::vector<double> recall;
  PixelCounts counts;
};

// Rectangle-rule area under the precision-recall curve, summed from the
// highest threshold down with recall starting at 0.
double px_ap(const PrCurve& curve);

// Unweighted mean. Throws Error(kEmptyCategorySet) on an empty mapping.
double m_px_ap(const std::map<int, double>& per_category);

// Accumulates pooled foreground / background activation histograms. Ignore
// pixels never enter any count. Not thread-safe; merge per-worker copies.
class PixelAccumulator {
 public:
  explicit PixelAccumulator(ThresholdSpec thresholds);

  // `map` must match the mask shape. A degenerate map predicts nothing.
  void add(const ScoreMap& map, const TernaryMask& mask);
  void merge(const PixelAccumulator& other);

  // Throws Error(kNoForegroundPixels) if no foreground pixel was pooled.
  PrCurve curve() const;

  const PixelCounts& counts() const { return counts_; }

 private:
  struct Tally {
    std::int64_t foreground = 0;
    std::int64_t background = 0;
  };

  ThresholdSpec thresholds_;
  PixelCounts counts_;
  // Grid mode: index = activation level (0 = never predicted).
  std::vector<Tally> levels_;
  // Exact mode: tallies keyed by score; pixels that are never predicted.
  std::map<double, Tally> by_value_;
  Tally never_;
};

// Pooled fraction of non-ignore pixels where (score >= tau) agrees with the
// foreground label.
class PxAccCounter {
 public:
  explicit PxAccCounter(double tau) : tau_(tau) {}

  void add(const ScoreMap& map, const TernaryMask& mask);
  void merge(const PxAccCounter& other);

  // Throws Error(kNoPixels) if every pooled pixel was ignored.
  double value() const;
  double tau() const { return tau_; }

 private:
  double tau_;
  std::int64_t correct_ = 0;
  std::int64_t total_ = 0;
};

using MaskSample = std::pair<ScoreMap, TernaryMask>;

PrCurve pr_curve(std::span<const MaskSample> samples,
                 const ThresholdSpec& thresholds);

double px_acc(std::span<const MaskSample> samples, double tau);

}  // namespace wsol
