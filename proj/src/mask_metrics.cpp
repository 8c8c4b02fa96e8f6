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
#include "wsol/mask_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsol/error.hpp"

namespace wsol {

namespace {

void check_same_shape(const ScoreMap& map, const TernaryMask& mask) {
  if (map.height() != mask.height() || map.width() != mask.width()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image '" + map.image_id() + "' score map is " +
                    std::to_string(map.height()) + "x" +
                    std::to_string(map.width()) + " but mask is " +
                    std::to_string(mask.height()) + "x" +
                    std::to_string(mask.width()));
  }
}

}  // namespace

TernaryMask::TernaryMask(int height, int width, std::vector<PixelLabel> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height_ < 1 || width_ < 1 ||
      static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_) !=
          labels_.size()) {
    throw Error(ErrorCode::kInvalidDimensions,
                "mask shape " + std::to_string(height_) + "x" +
                    std::to_string(width_) + " does not match " +
                    std::to_string(labels_.size()) + " labels");
  }
}

TernaryMask::TernaryMask(int height, int width, PixelLabel fill)
    : TernaryMask(height, width,
                  std::vector<PixelLabel>(
                      static_cast<std::size_t>(std::max(height, 0)) *
                          static_cast<std::size_t>(std::max(width, 0)),
                      fill)) {}

double px_ap(const PrCurve& curve) {
  const std::int64_t fg = curve.counts.foreground;
  if (fg <= 0) {
    double area = 0.0;
    double previous_recall = 0.0;
    for (std::size_t k = curve.taus.size(); k-- > 0;) {
      area += curve.precision[k] * (curve.recall[k] - previous_recall);
      previous_recall = curve.recall[k];
    }
    return area;
  }
  // Recall steps are tp / fg. Summing precision times the integer tp step and
  // dividing once keeps a perfect ranking at exactly 1.
  double weighted = 0.0;
  std::int64_t previous_tp = 0;
  for (std::size_t k = curve.taus.size(); k-- > 0;) {
    const auto tp = static_cast<std::int64_t>(
        std::llround(curve.recall[k] * static_cast<double>(fg)));
    weighted += curve.precision[k] * static_cast<double>(tp - previous_tp);
    previous_tp = tp;
  }
  return weighted / static_cast<double>(fg);
}

double m_px_ap(const std::map<int, double>& per_category) {
  if (per_category.empty()) {
    throw Error(ErrorCode::kEmptyCategorySet, "no categories to average");
  }
  double sum = 0.0;
  for (const auto& [category, value] : per_category) sum += value;
  return sum / static_cast<double>(per_category.size());
}

PixelAccumulator::PixelAccumulator(ThresholdSpec thresholds)
    : thresholds_(std::move(thresholds)) {
  if (!thresholds_.is_exact()) levels_.resize(thresholds_.taus().size() + 1);
}

void PixelAccumulator::add(const ScoreMap& map, const TernaryMask& mask) {
  check_same_shape(map, mask);
  std::span<const double> values = map.values();
  std::span<const PixelLabel> labels = mask.labels();
  const bool never = map.degenerate();

  if (!thresholds_.is_exact()) {
    std::span<const double> taus = thresholds_.taus();
    for (std::size_t p = 0; p < values.size(); ++p) {
      if (labels[p] == PixelLabel::kIgnore) {
        ++counts_.ignored;
        continue;
      }
      const std::uint32_t level = never ? 0 : activation_level(taus, values[p]);
      if (labels[p] == PixelLabel::kForeground) {
        ++levels_[level].foreground;
        ++counts_.foreground;
      } else {
        ++levels_[level].background;
        ++counts_.background;
      }
    }
    return;
  }

  std::vector<std::pair<double, bool>> scored;
  scored.reserve(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (labels[p] == PixelLabel::kIgnore) {
      ++counts_.ignored;
      continue;
    }
    const bool fg = labels[p] == PixelLabel::kForeground;
    if (fg) {
      ++counts_.foreground;
    } else {
      ++counts_.background;
    }
    if (never) {
      (fg ? never_.foreground : never_.background) += 1;
    } else {
      scored.emplace_back(values[p], fg);
    }
  }
  std::sort(scored.begin(), scored.end());
  auto hint = by_value_.end();
  for (std::size_t i = 0; i < scored.size();) {
    Tally tally;
    const double v = scored[i].first;
    for (; i < scored.size() && scored[i].first == v; ++i) {
      (scored[i].second ? tally.foreground : tally.background) += 1;
    }
    hint = by_value_.try_emplace(hint, v);
    hint->second.foreground += tally.foreground;
    hint->second.background += tally.background;
    ++hint;
  }
}

void PixelAccumulator::merge(const PixelAccumulator& other) {
  if (other.thresholds_.is_exact() != thresholds_.is_exact() ||
      other.levels_.size() != levels_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot merge pixel accumulators with different thresholds");
  }
  counts_.foreground += other.counts_.foreground;
  counts_.background += other.counts_.background;
  counts_.ignored += other.counts_.ignored;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    levels_[i].foreground += other.levels_[i].foreground;
    levels_[i].background += other.levels_[i].background;
  }
  for (const auto& [v, tally] : other.by_value_) {
    Tally& mine = by_value_[v];
    mine.foreground += tally.foreground;
    mine.background += tally.background;
  }
  never_.foreground += other.never_.foreground;
  never_.background += other.never_.background;
}

PrCurve PixelAccumulator::curve() const {
  if (counts_.foreground == 0) {
    throw Error(ErrorCode::kNoForegroundPixels,
                "no foreground pixels among " +
                    std::to_string(counts_.background) + " scored pixels");
  }
  PrCurve curve;
  curve.counts = counts_;
  // per_step[k]: pixels that switch on exactly at taus[k].
  std::vector<Tally> per_step;
  if (thresholds_.is_exact()) {
    curve.taus.reserve(by_value_.size());
    for (const auto& [v, tally] : by_value_) {
      curve.taus.push_back(v);
      per_step.push_back(tally);
    }
  } else {
    curve.taus.assign(thresholds_.taus().begin(), thresholds_.taus().end());
    // Level l pixels are predicted for steps 0..l-1; entering at step l-1.
    per_step.assign(levels_.begin() + 1, levels_.end());
  }
  const std::size_t steps = curve.taus.size();
  curve.precision.assign(steps, 1.0);
  curve.recall.assign(steps, 0.0);
  std::int64_t tp = 0;
  std::int64_t predicted = 0;
  for (std::size_t k = steps; k-- > 0;) {
    tp += per_step[k].foreground;
    predicted += per_step[k].foreground + per_step[k].background;
    if (predicted > 0) {
      curve.precision[k] =
          static_cast<double>(tp) / static_cast<double>(predicted);
    }
    curve.recall[k] =
        static_cast<double>(tp) / static_cast<double>(counts_.foreground);
  }
  return curve;
}

void PxAccCounter::add(const ScoreMap& map, const TernaryMask& mask) {
  check_same_shape(map, mask);
  std::span<const double> values = map.values();
  std::span<const PixelLabel> labels = mask.labels();
  const bool never = map.degenerate();
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (labels[p] == PixelLabel::kIgnore) continue;
    const bool predicted = !never && values[p] >= tau_;
    const bool fg = labels[p] == PixelLabel::kForeground;
    correct_ += predicted == fg ? 1 : 0;
    ++total_;
  }
}

void PxAccCounter::merge(const PxAccCounter& other) {
  correct_ += other.correct_;
  total_ += other.total_;
}

double PxAccCounter::value() const {
  if (total_ == 0) throw Error(ErrorCode::kNoPixels, "every pixel is ignored");
  return static_cast<double>(correct_) / static_cast<double>(total_);
}

PrCurve pr_curve(std::span<const MaskSample> samples,
                 const ThresholdSpec& thresholds) {
  PixelAccumulator acc(thresholds);
  for (const auto& [map, mask] : samples) acc.add(map, mask);
  return acc.curve();
}

double px_acc(std::span<const MaskSample> samples, double tau) {
  PxAccCounter counter(tau);
  for (const auto& [map, mask] : samples) counter.add(map, mask);
  return counter.value();
}

}  // namespace wsol
