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
#include "wsol/box_metrics.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "wsol/error.hpp"

namespace wsol {

namespace {

constexpr std::uint32_t kLegacyBit = 1u << 31;
constexpr std::size_t kMaxDeltas = 31;

// Union-find over pixel indices. Each root carries its component's bounding
// box, pixel count, and first (lowest raster index) pixel.
class ComponentForest {
 public:
  explicit ComponentForest(std::size_t n)
      : parent_(n, -1), size_(n, 0), box_(n), first_(n, 0), version_(n, 0) {}

  bool active(int p) const { return parent_[p] >= 0; }

  void activate(int p, int row, int col) {
    parent_[p] = p;
    size_[p] = 1;
    box_[p] = {col, row, col + 1, row + 1};
    first_[p] = p;
    ++version_[p];
  }

  int find(int p) {
    while (parent_[p] != p) {
      parent_[p] = parent_[parent_[p]];
      p = parent_[p];
    }
    return p;
  }

  // Returns the surviving root.
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b] || (size_[a] == size_[b] && a > b)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    Box& box = box_[a];
    const Box& other = box_[b];
    box.x0 = std::min(box.x0, other.x0);
    box.y0 = std::min(box.y0, other.y0);
    box.x1 = std::max(box.x1, other.x1);
    box.y1 = std::max(box.y1, other.y1);
    first_[a] = std::min(first_[a], first_[b]);
    ++version_[a];
    return a;
  }

  bool is_root(int p) const { return parent_[p] == p; }
  std::int64_t size(int root) const { return size_[root]; }
  const Box& box(int root) const { return box_[root]; }
  int first(int root) const { return first_[root]; }
  std::uint32_t version(int root) const { return version_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<std::int64_t> size_;
  std::vector<Box> box_;
  std::vector<int> first_;
  std::vector<std::uint32_t> version_;
};

double best_iou_against(const Box& box, std::span<const Box> ground_truth) {
  double best = 0.0;
  for (const Box& g : ground_truth) best = std::max(best, box_iou(box, g));
  return best;
}

// True when component `a` ranks above `b` as "largest": more pixels, then
// earlier first pixel.
bool larger_component(ComponentForest& forest, int a, int b) {
  if (forest.size(a) != forest.size(b)) return forest.size(a) > forest.size(b);
  return forest.first(a) < forest.first(b);
}

}  // namespace

std::vector<Box> extract_boxes(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  ComponentForest forest(mask.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      const int p = r * w + c;
      forest.activate(p, r, c);
      // Already-visited 8-neighbors: left, and the three above.
      if (c > 0 && mask.at(r, c - 1)) forest.unite(p, p - 1);
      if (r > 0) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int cc = c + dc;
          if (cc >= 0 && cc < w && mask.at(r - 1, cc)) {
            forest.unite(p, p - w + dc);
          }
        }
      }
    }
  }
  std::vector<std::pair<int, Box>> found;
  for (int p = 0; p < h * w; ++p) {
    if (forest.active(p) && forest.is_root(p)) {
      found.emplace_back(forest.first(p), forest.box(p));
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Box> boxes;
  boxes.reserve(found.size());
  for (const auto& [first, box] : found) boxes.push_back(box);
  return boxes;
}

double box_iou(const Box& a, const Box& b) {
  const std::int64_t iw =
      std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const std::int64_t ih =
      std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const std::int64_t inter = iw * ih;
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double best_iou(std::span<const Box> estimated,
                std::span<const Box> ground_truth) {
  if (ground_truth.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth boxes");
  }
  double best = 0.0;
  for (const Box& e : estimated) {
    best = std::max(best, best_iou_against(e, ground_truth));
  }
  return best;
}

MaxBoxAccResult max_box_acc_v2(const BoxAccCurve& curve) {
  if (curve.taus.empty() || curve.deltas.empty()) {
    throw Error(ErrorCode::kEmptyCurve, "box accuracy curve is empty");
  }
  MaxBoxAccResult result;
  double sum = 0.0;
  for (std::size_t d = 0; d < curve.deltas.size(); ++d) {
    DeltaOptimum best{curve.deltas[d], curve.taus[0], curve.accuracy[d][0]};
    for (std::size_t k = 1; k < curve.taus.size(); ++k) {
      if (curve.accuracy[d][k] > best.best_acc) {
        best.best_acc = curve.accuracy[d][k];
        best.best_tau = curve.taus[k];
      }
    }
    sum += best.best_acc;
    result.per_delta.push_back(best);
  }
  result.score = sum / static_cast<double>(curve.deltas.size());
  return result;
}

ComponentSweepResult sweep_components(const ScoreMap& map,
                                      std::span<const Box> ground_truth,
                                      std::span<const double> taus) {
  if (ground_truth.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth,
                "image '" + map.image_id() + "' has no ground-truth boxes");
  }
  const int h = map.height();
  const int w = map.width();
  const std::size_t n = map.size();
  const std::size_t steps = taus.size();
  std::span<const double> values = map.values();

  // Bucket pixels by the last step at which they are active.
  std::vector<std::uint32_t> level(n);
  std::vector<std::uint32_t> bucket_start(steps + 2, 0);
  for (std::size_t p = 0; p < n; ++p) {
    level[p] = activation_level(taus, values[p]);
    ++bucket_start[level[p] + 1];
  }
  std::partial_sum(bucket_start.begin(), bucket_start.end(),
                   bucket_start.begin());
  std::vector<int> order(n);
  {
    std::vector<std::uint32_t> cursor(bucket_start.begin(),
                                      bucket_start.end() - 1);
    for (std::size_t p = 0; p < n; ++p) {
      order[cursor[level[p]]++] = static_cast<int>(p);
    }
  }

  struct Entry {
    double iou;
    int root;
    std::uint32_t version;
    bool operator<(const Entry& o) const { return iou < o.iou; }
  };
  std::priority_queue<Entry> heap;
  ComponentForest forest(n);
  std::vector<int> touched;
  std::vector<std::uint32_t> seen(n, 0);
  std::uint32_t stamp = 0;
  int largest = -1;

  ComponentSweepResult result;
  result.best_iou.assign(steps, 0.0);
  result.largest_iou.assign(steps, 0.0);
  double current_best = 0.0;
  double current_largest = 0.0;

  for (std::size_t k = steps; k-- > 0;) {
    // Pixels with level k + 1 switch on at taus[k].
    const std::uint32_t begin = bucket_start[k + 1];
    const std::uint32_t end = bucket_start[k + 2];
    if (begin != end) {
      touched.clear();
      for (std::uint32_t i = begin; i < end; ++i) {
        const int p = order[i];
        const int r = p / w;
        const int c = p % w;
        forest.activate(p, r, c);
        int root = p;
        for (int dr = -1; dr <= 1; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= h) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if ((dr == 0 && dc == 0) || cc < 0 || cc >= w) continue;
            const int q = rr * w + cc;
            if (forest.active(q)) root = forest.unite(root, q);
          }
        }
        touched.push_back(root);
      }
      ++stamp;
      if (largest >= 0) touched.push_back(largest);
      for (int t : touched) {
        const int root = forest.find(t);
        if (seen[root] == stamp) continue;
        seen[root] = stamp;
        heap.push({best_iou_against(forest.box(root), ground_truth), root,
                   forest.version(root)});
        if (largest < 0 ||
            larger_component(forest, root, forest.find(largest))) {
          largest = root;
        }
      }
      largest = forest.find(largest);
      while (!heap.empty()) {
        const Entry& top = heap.top();
        if (forest.is_root(top.root) && forest.version(top.root) == top.version) {
          break;
        }
        heap.pop();
      }
      current_best = heap.empty() ? 0.0 : heap.top().iou;
      current_largest = best_iou_against(forest.box(largest), ground_truth);
    }
    result.best_iou[k] = current_best;
    result.largest_iou[k] = current_largest;
  }
  return result;
}

BoxAccumulator::BoxAccumulator(ThresholdSpec thresholds,
                               std::vector<double> deltas, double legacy_delta)
    : thresholds_(std::move(thresholds)),
      deltas_(std::move(deltas)),
      legacy_delta_(legacy_delta) {
  if (deltas_.empty() || deltas_.size() > kMaxDeltas) {
    throw Error(ErrorCode::kInvalidArgument,
                "need between 1 and " + std::to_string(kMaxDeltas) +
                    " IoU thresholds");
  }
  for (double d : deltas_) {
    if (!(d >= 0.0 && d <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "IoU threshold " + std::to_string(d) + " outside [0, 1]");
    }
  }
  if (!thresholds_.is_exact()) {
    counts_.assign(deltas_.size() + 1,
                   std::vector<std::int64_t>(thresholds_.taus().size(), 0));
  }
}

void BoxAccumulator::add(const ScoreMap& map,
                         std::span<const Box> ground_truth) {
  if (ground_truth.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth,
                "image '" + map.image_id() + "' has no ground-truth boxes");
  }
  ++n_images_;
  if (map.degenerate()) {
    ++n_degenerate_;
    return;
  }
  std::vector<double> local_taus;
  std::span<const double> taus = thresholds_.taus();
  if (thresholds_.is_exact()) {
    local_taus = distinct_sorted(map.values());
    taus = local_taus;
  }
  const ComponentSweepResult sweep = sweep_components(map, ground_truth, taus);

  if (thresholds_.is_exact()) {
    StepFunction step;
    step.taus = std::move(local_taus);
    step.hits.resize(step.taus.size());
    for (std::size_t k = 0; k < step.taus.size(); ++k) {
      std::uint32_t bits = 0;
      for (std::size_t d = 0; d < deltas_.size(); ++d) {
        if (sweep.best_iou[k] >= deltas_[d]) bits |= 1u << d;
      }
      if (sweep.largest_iou[k] >= legacy_delta_) bits |= kLegacyBit;
      step.hits[k] = bits;
    }
    steps_.push_back(std::move(step));
    return;
  }
  for (std::size_t d = 0; d < deltas_.size(); ++d) {
    std::vector<std::int64_t>& row = counts_[d];
    for (std::size_t k = 0; k < taus.size(); ++k) {
      row[k] += sweep.best_iou[k] >= deltas_[d] ? 1 : 0;
    }
  }
  std::vector<std::int64_t>& legacy = counts_.back();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    legacy[k] += sweep.largest_iou[k] >= legacy_delta_ ? 1 : 0;
  }
}

void BoxAccumulator::merge(const BoxAccumulator& other) {
  if (other.deltas_ != deltas_ || other.legacy_delta_ != legacy_delta_ ||
      other.thresholds_.is_exact() != thresholds_.is_exact() ||
      !std::equal(other.thresholds_.taus().begin(),
                  other.thresholds_.taus().end(), thresholds_.taus().begin(),
                  thresholds_.taus().end())) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot merge box accumulators with different configurations");
  }
  n_images_ += other.n_images_;
  n_degenerate_ += other.n_degenerate_;
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    for (std::size_t k = 0; k < counts_[d].size(); ++k) {
      counts_[d][k] += other.counts_[d][k];
    }
  }
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
}

std::vector<double> BoxAccumulator::global_taus() const {
  std::vector<double> all;
  for (const StepFunction& s : steps_) {
    all.insert(all.end(), s.taus.begin(), s.taus.end());
  }
  return distinct_sorted(all);
}

std::vector<std::vector<std::int64_t>> BoxAccumulator::exact_counts(
    const std::vector<double>& taus) const {
  // Image hit at global tau equals its hit at the smallest own threshold
  // >= tau; above its maximum score the mask is empty. Accumulate each
  // constant run with a difference array.
  const std::size_t rows = deltas_.size() + 1;
  std::vector<std::vector<std::int64_t>> diff(
      rows, std::vector<std::int64_t>(taus.size() + 1, 0));
  for (const StepFunction& s : steps_) {
    std::size_t run_begin = 0;
    for (std::size_t k = 0; k < s.taus.size(); ++k) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(taus.begin(), taus.end(), s.taus[k]) - taus.begin());
      const std::uint32_t bits = s.hits[k];
      for (std::size_t d = 0; d < rows; ++d) {
        const std::uint32_t mask = d + 1 == rows ? kLegacyBit : 1u << d;
        if (bits & mask) {
          ++diff[d][run_begin];
          --diff[d][pos + 1];
        }
      }
      run_begin = pos + 1;
    }
  }
  for (auto& row : diff) {
    std::partial_sum(row.begin(), row.end(), row.begin());
    row.pop_back();
  }
  return diff;
}

BoxAccCurve BoxAccumulator::make_curve(bool legacy) const {
  BoxAccCurve curve;
  curve.n_images = n_images_;
  std::vector<std::vector<std::int64_t>> counts;
  if (thresholds_.is_exact()) {
    curve.taus = global_taus();
    counts = exact_counts(curve.taus);
  } else {
    curve.taus.assign(thresholds_.taus().begin(), thresholds_.taus().end());
    counts = counts_;
  }
  auto to_accuracy = [&](const std::vector<std::int64_t>& row) {
    std::vector<double> acc(row.size(), 0.0);
    if (n_images_ > 0) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        acc[k] = static_cast<double>(row[k]) / static_cast<double>(n_images_);
      }
    }
    return acc;
  };
  if (legacy) {
    curve.deltas = {legacy_delta_};
    curve.accuracy.push_back(to_accuracy(counts.back()));
  } else {
    curve.deltas = deltas_;
    for (std::size_t d = 0; d < deltas_.size(); ++d) {
      curve.accuracy.push_back(to_accuracy(counts[d]));
    }
  }
  return curve;
}

BoxAccCurve BoxAccumulator::curve() const { return make_curve(false); }

BoxAccCurve BoxAccumulator::legacy_curve() const { return make_curve(true); }

BoxAccCurve box_acc_sweep(std::span<const BoxSample> samples,
                          const ThresholdSpec& thresholds,
                          std::vector<double> deltas) {
  BoxAccumulator acc(thresholds, std::move(deltas));
  for (const auto& [map, boxes] : samples) acc.add(map, boxes);
  return acc.curve();
}

double max_box_acc_v1(std::span<const BoxSample> samples,
                      const ThresholdSpec& thresholds, double delta) {
  BoxAccumulator acc(thresholds, {delta}, delta);
  for (const auto& [map, boxes] : samples) acc.add(map, boxes);
  return max_box_acc_v2(acc.legacy_curve()).score;
}

}  // namespace wsol
