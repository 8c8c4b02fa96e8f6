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
#include "wsol/evaluate.hpp"

#include <algorithm>
#include <string>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

namespace wsol {

namespace {

constexpr std::size_t kBatchSize = 256;

struct WorkerState {
  std::optional<BoxAccumulator> box;
  std::map<int, PixelAccumulator> pixels;
  std::optional<PxAccCounter> px_acc;
};

ScoreMap apply_normalization(const ScoreMap& map, Normalization norm) {
  switch (norm) {
    case Normalization::kMinMax: return normalize_minmax(map);
    case Normalization::kMax: return normalize_max(map);
    case Normalization::kNone: return map;
  }
  return map;
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::kBoxes ? "boxes" : "masks";
}

std::string_view to_string(Normalization norm) {
  switch (norm) {
    case Normalization::kMinMax: return "minmax";
    case Normalization::kMax: return "max";
    case Normalization::kNone: return "none";
  }
  return "none";
}

std::string_view to_string(ResizeOrder order) {
  return order == ResizeOrder::kNormalizeFirst ? "normalize-first"
                                               : "resize-first";
}

std::string_view to_string(Pooling pooling) {
  return pooling == Pooling::kCategory ? "category" : "image";
}

std::vector<Box> GroundTruth::boxes(const io::ManifestEntry& entry) const {
  throw Error(ErrorCode::kInvalidArgument,
              "ground truth has no boxes (image '" + entry.image_id + "')");
}

TernaryMask GroundTruth::mask(const io::ManifestEntry& entry) const {
  throw Error(ErrorCode::kInvalidArgument,
              "ground truth has no masks (image '" + entry.image_id + "')");
}

std::vector<Box> BoxGroundTruth::boxes(const io::ManifestEntry& entry) const {
  auto it = boxes_.find(entry.image_id);
  if (it == boxes_.end() || it->second.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth,
                "image '" + entry.image_id + "' has no ground-truth boxes");
  }
  return it->second;
}

TernaryMask MaskDirectoryGroundTruth::mask(const io::ManifestEntry& entry) const {
  return io::read_mask(root_, entry);
}

TernaryMask InMemoryMaskGroundTruth::mask(const io::ManifestEntry& entry) const {
  auto it = masks_.find(entry.image_id);
  if (it == masks_.end()) {
    throw Error(ErrorCode::kMissingMask, "no mask for '" + entry.image_id + "'");
  }
  if (it->second.width() != entry.width || it->second.height() != entry.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask for '" + entry.image_id + "' does not match the manifest");
  }
  return it->second;
}

ScoreMap prepare_map(const ScoreMap& raw, const io::ManifestEntry& entry,
                     const EvalConfig& config) {
  ScoreMap map = config.blur_sigma > 0.0 ? gaussian_blur(raw, config.blur_sigma)
                                         : raw;
  if (config.resize_order == ResizeOrder::kNormalizeFirst) {
    map = apply_normalization(map, config.normalization);
    return resize_bilinear(map, entry.height, entry.width);
  }
  map = resize_bilinear(map, entry.height, entry.width);
  return apply_normalization(map, config.normalization);
}

Evaluation evaluate(io::ScoreMapSource& maps, const GroundTruth& gt,
                    const EvalConfig& config) {
  if (gt.task() != config.task) {
    throw Error(ErrorCode::kInvalidArgument,
                "ground truth is for task '" + std::string(to_string(gt.task())) +
                    "' but evaluation asked for '" +
                    std::string(to_string(config.task)) + "'");
  }
  const io::SplitManifest& manifest = gt.manifest();
  const bool boxes_task = config.task == Task::kBoxes;
  const int jobs = std::max(config.jobs, 1);

  std::vector<WorkerState> workers(static_cast<std::size_t>(jobs));
  for (WorkerState& w : workers) {
    if (boxes_task) {
      w.box.emplace(config.thresholds, config.deltas, config.legacy_delta);
    } else {
      w.px_acc.emplace(config.px_acc_tau);
    }
  }
  std::vector<char> seen(manifest.size(), 0);
  std::vector<std::optional<double>> image_ap(manifest.size());
  std::vector<char> degenerate(manifest.size(), 0);

  std::vector<ScoreMap> batch;
  std::vector<std::size_t> batch_index;
  batch.reserve(kBatchSize);
  bool exhausted = false;
  while (!exhausted) {
    batch.clear();
    batch_index.clear();
    while (batch.size() < kBatchSize) {
      std::optional<ScoreMap> next = maps.next();
      if (!next) {
        exhausted = true;
        break;
      }
      const std::ptrdiff_t idx = manifest.index_of(next->image_id());
      if (idx < 0) {
        throw Error(ErrorCode::kUnknownImage,
                    "score map for '" + next->image_id() +
                        "' has no manifest entry");
      }
      if (seen[idx]) {
        throw Error(ErrorCode::kDuplicateId,
                    "score map for '" + next->image_id() + "' appears twice");
      }
      seen[idx] = 1;
      batch.push_back(std::move(*next));
      batch_index.push_back(static_cast<std::size_t>(idx));
    }

    parallel_for(batch.size(), jobs, [&](std::size_t w, std::size_t i) {
      WorkerState& state = workers[w];
      const std::size_t idx = batch_index[i];
      const io::ManifestEntry& entry = manifest.entries()[idx];
      const ScoreMap map = prepare_map(batch[i], entry, config);
      degenerate[idx] = map.degenerate() ? 1 : 0;
      if (boxes_task) {
        state.box->add(map, gt.boxes(entry));
        return;
      }
      const TernaryMask mask = gt.mask(entry);
      auto [it, inserted] =
          state.pixels.try_emplace(entry.category_id, config.thresholds);
      it->second.add(map, mask);
      state.px_acc->add(map, mask);
      if (config.pooling == Pooling::kImage) {
        PixelAccumulator own(config.thresholds);
        own.add(map, mask);
        if (own.counts().foreground > 0) image_ap[idx] = px_ap(own.curve());
      }
    });
  }

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (!seen[i]) missing.push_back(manifest.entries()[i].image_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) {
      list += (i ? ", '" : "'") + missing[i] + "'";
    }
    if (missing.size() > 5) list += ", ...";
    throw Error(ErrorCode::kMissingScoreMap,
                std::to_string(missing.size()) +
                    " manifest images have no score map: " + list);
  }

  Evaluation result;
  MetricReport& report = result.report;
  report.config.task = to_string(config.task);
  report.config.normalization = to_string(config.normalization);
  report.config.resize_order = to_string(config.resize_order);
  report.config.threshold_mode = config.thresholds.is_exact() ? "exact" : "grid";
  report.config.threshold_count =
      static_cast<std::int64_t>(config.thresholds.taus().size());
  report.config.deltas = config.deltas;
  report.config.legacy_delta = config.legacy_delta;
  report.config.px_acc_tau = config.px_acc_tau;
  report.config.pooling = to_string(config.pooling);
  report.config.blur_sigma = config.blur_sigma;
  report.n_images = static_cast<std::int64_t>(manifest.size());
  report.n_degenerate = std::count(degenerate.begin(), degenerate.end(), 1);

  if (boxes_task) {
    BoxAccumulator& total = *workers[0].box;
    for (std::size_t w = 1; w < workers.size(); ++w) total.merge(*workers[w].box);
    result.box_curve = total.curve();
    result.legacy_curve = total.legacy_curve();
    BoxResults boxes;
    if (result.box_curve->taus.empty()) {
      // Exact mode with only degenerate maps: nothing is ever predicted.
      for (double d : config.deltas) boxes.per_delta.push_back({d, 0.0, 0.0});
    } else {
      const MaxBoxAccResult v2 = max_box_acc_v2(*result.box_curve);
      for (const DeltaOptimum& d : v2.per_delta) {
        boxes.per_delta.push_back({d.delta, d.best_tau, d.best_acc});
      }
      boxes.max_box_acc_v2 = v2.score;
      boxes.max_box_acc_v1 = max_box_acc_v2(*result.legacy_curve).score;
    }
    report.boxes = std::move(boxes);
    report.score = report.boxes->max_box_acc_v2;
    return result;
  }

  std::map<int, PixelAccumulator> categories;
  PxAccCounter px_acc_total(config.px_acc_tau);
  for (WorkerState& w : workers) {
    for (auto& [category, acc] : w.pixels) {
      auto [it, inserted] = categories.try_emplace(category, acc);
      if (!inserted) it->second.merge(acc);
    }
    px_acc_total.merge(*w.px_acc);
  }

  MaskResults masks;
  const auto images_per_category = manifest.category_counts();
  std::map<int, double> per_category_ap;
  std::optional<PixelAccumulator> pooled;
  for (auto& [category, acc] : categories) {
    CategoryResult cr;
    cr.category = category;
    cr.n_images = images_per_category.at(category);
    cr.foreground_pixels = acc.counts().foreground;
    cr.background_pixels = acc.counts().background;
    cr.ignored_pixels = acc.counts().ignored;
    try {
      result.category_pr.emplace(category, acc.curve());
    } catch (const Error& e) {
      throw Error(e.code(), "category " + std::to_string(category) + ": " +
                                e.what());
    }
    if (config.pooling == Pooling::kCategory) {
      cr.px_ap = px_ap(result.category_pr.at(category));
    } else {
      double sum = 0.0;
      std::int64_t n = 0;
      for (std::size_t i = 0; i < manifest.size(); ++i) {
        if (manifest.entries()[i].category_id != category) continue;
        if (image_ap[i]) {
          sum += *image_ap[i];
          ++n;
        } else {
          ++masks.images_without_foreground;
        }
      }
      cr.px_ap = n > 0 ? sum / static_cast<double>(n) : 0.0;
    }
    per_category_ap[category] = cr.px_ap;
    masks.per_category.push_back(cr);
    if (pooled) {
      pooled->merge(acc);
    } else {
      pooled.emplace(acc);
    }
  }
  masks.m_px_ap = m_px_ap(per_category_ap);
  masks.px_acc = px_acc_total.value();
  if (pooled) result.pooled_pr = pooled->curve();
  report.masks = std::move(masks);
  report.score = report.masks->m_px_ap;
  return result;
}

double headline_score(const MetricReport& report) {
  if (report.boxes) return report.boxes->max_box_acc_v2;
  if (report.masks) return report.masks->m_px_ap;
  return report.score;
}

}  // namespace wsol
