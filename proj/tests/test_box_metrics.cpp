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
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wsol/box_metrics.hpp"
#include "wsol/error.hpp"

using wsol::BinaryMask;
using wsol::Box;
using wsol::ScoreMap;
using wsol::ThresholdSpec;

namespace {

BinaryMask random_mask(std::mt19937_64& rng, int h, int w, double density) {
  std::bernoulli_distribution on(density);
  BinaryMask mask(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) mask.set(r, c, on(rng));
  }
  return mask;
}

Box random_box(std::mt19937_64& rng, int grid) {
  std::uniform_int_distribution<int> coord(0, grid - 1);
  int x0 = coord(rng), x1 = coord(rng), y0 = coord(rng), y1 = coord(rng);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return {x0, y0, x1 + 1, y1 + 1};
}

// Random normalized map made of a few blobs on a noisy floor, with values on a
// coarse lattice so that exact sweeps see ties.
ScoreMap blob_map(std::mt19937_64& rng, int h, int w, const std::string& id = "m") {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_blobs(1, 3);
  std::vector<double> values(static_cast<std::size_t>(h) * w, 0.0);
  const int blobs = n_blobs(rng);
  for (int b = 0; b < blobs; ++b) {
    const double cy = unit(rng) * h, cx = unit(rng) * w;
    const double s = 1.5 + unit(rng) * 4.0, peak = 0.4 + 0.6 * unit(rng);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
        values[static_cast<std::size_t>(r) * w + c] += peak * std::exp(-d2 / (2 * s * s));
      }
    }
  }
  for (auto& v : values) v = std::round((v + 0.05 * unit(rng)) * 50.0) / 50.0;
  return wsol::normalize_minmax(ScoreMap(id, h, w, std::move(values)));
}

std::vector<Box> random_gt(std::mt19937_64& rng, int h, int w) {
  std::uniform_int_distribution<int> count(1, 2);
  std::vector<Box> boxes;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Box b = random_box(rng, std::min(h, w));
    boxes.push_back(b);
  }
  return boxes;
}

ScoreMap box_indicator(int h, int w, const Box& box, const std::string& id = "m") {
  std::vector<double> values(static_cast<std::size_t>(h) * w, 0.0);
  for (int r = box.y0; r < box.y1; ++r) {
    for (int c = box.x0; c < box.x1; ++c) values[static_cast<std::size_t>(r) * w + c] = 1.0;
  }
  return wsol::normalize_minmax(ScoreMap(id, h, w, std::move(values)));
}

}  // namespace

TEST_CASE("extract_boxes examples") {
  BinaryMask single(5, 5);
  single.set(2, 3, true);
  CHECK(wsol::extract_boxes(single) == std::vector<Box>{{3, 2, 4, 3}});

  BinaryMask gap(3, 3);
  gap.set(0, 0, true);
  gap.set(0, 2, true);
  CHECK(wsol::extract_boxes(gap) == std::vector<Box>{{0, 0, 1, 1}, {2, 0, 3, 1}});

  BinaryMask diagonal(3, 3);
  diagonal.set(0, 0, true);
  diagonal.set(1, 1, true);
  CHECK(wsol::extract_boxes(diagonal) == std::vector<Box>{{0, 0, 2, 2}});

  CHECK(wsol::extract_boxes(BinaryMask(4, 4)).empty());
}

TEST_CASE("extract_boxes matches flood fill") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const double density = 0.05 + 0.9 * (trial % 10) / 10.0;
    auto mask = random_mask(rng, 1 + trial % 40, 1 + (trial * 7) % 50, density);
    const auto boxes = wsol::extract_boxes(mask);
    CHECK(boxes == oracle::flood_fill_boxes(oracle::to_grid(mask)));
    for (int r = 0; r < mask.height(); ++r) {
      for (int c = 0; c < mask.width(); ++c) {
        if (!mask.at(r, c)) continue;
        CHECK(std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) {
          return c >= b.x0 && c < b.x1 && r >= b.y0 && r < b.y1;
        }));
      }
    }
  }
}

TEST_CASE("box_iou") {
  CHECK(wsol::box_iou({1, 2, 5, 7}, {1, 2, 5, 7}) == 1.0);
  CHECK(wsol::box_iou({0, 0, 2, 2}, {2, 2, 4, 4}) == 0.0);
  CHECK(wsol::box_iou({0, 0, 10, 10}, {5, 5, 15, 15}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(wsol::box_iou({0, 0, 10, 10}, {5, 5, 15, 15}) == oracle::pixel_count_iou({0, 0, 10, 10}, {5, 5, 15, 15}, 15));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Box a = random_box(rng, 32), b = random_box(rng, 32);
    const double iou = wsol::box_iou(a, b);
    CHECK(iou == oracle::pixel_count_iou(a, b, 32));
    CHECK(iou == wsol::box_iou(b, a));
    CHECK(iou >= 0.0);
    CHECK(iou <= 1.0);
    CHECK((iou == 1.0) == (a == b));
  }
}

TEST_CASE("best_iou") {
  const std::vector<Box> gt{{2, 2, 6, 6}};
  CHECK(wsol::best_iou(gt, gt) == 1.0);
  CHECK(wsol::best_iou(std::vector<Box>{}, gt) == 0.0);
  try {
    wsol::best_iou(gt, std::vector<Box>{});
    FAIL("expected EmptyGroundTruth");
  } catch (const wsol::Error& e) {
    CHECK(e.code() == wsol::ErrorCode::kEmptyGroundTruth);
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(0, 5), gt_count(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Box> e(count(rng)), g(gt_count(rng));
    for (auto& b : e) b = random_box(rng, 20);
    for (auto& b : g) b = random_box(rng, 20);
    CHECK(wsol::best_iou(e, g) == oracle::pairwise_best_iou(e, g, 20));
  }
}

TEST_CASE("sweep_components matches thresholding and flood fill") {
  std::mt19937_64 rng(4);
  const std::vector<double> deltas{0.3, 0.5, 0.7};
  for (int trial = 0; trial < 60; ++trial) {
    const int h = 8 + trial % 17, w = 8 + (trial * 5) % 19;
    auto map = blob_map(rng, h, w);
    auto gt = random_gt(rng, h, w);
    const auto taus = wsol::distinct_sorted(map.values());
    const auto sweep = wsol::sweep_components(map, gt, taus);
    const auto ref = oracle::brute_force_box_hits(map, gt, taus, deltas);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const auto boxes = wsol::extract_boxes(wsol::threshold(map, taus[k]));
      CHECK(sweep.best_iou[k] == wsol::best_iou(boxes, gt));
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        CHECK((sweep.best_iou[k] >= deltas[d]) == static_cast<bool>(ref.v2[d][k]));
      }
      CHECK((sweep.largest_iou[k] >= 0.5) == static_cast<bool>(ref.v1[k]));
    }
  }
}

TEST_CASE("box_acc_sweep equals per-image brute force") {
  std::mt19937_64 rng(5);
  const std::vector<double> deltas{0.3, 0.5, 0.7};
  for (int round = 0; round < 10; ++round) {
    std::vector<wsol::BoxSample> samples;
    for (int i = 0; i < 3; ++i) {
      auto map = blob_map(rng, 14 + i, 16, "i" + std::to_string(i));
      samples.emplace_back(map, random_gt(rng, 14 + i, 16));
    }
    // Grid mode.
    const auto grid = ThresholdSpec::uniform(50);
    const auto curve = wsol::box_acc_sweep(samples, grid, deltas);
    const std::vector<double> grid_taus(grid.taus().begin(), grid.taus().end());
    std::vector<std::vector<double>> expected(deltas.size(), std::vector<double>(grid_taus.size()));
    for (const auto& [map, gt] : samples) {
      const auto ref = oracle::brute_force_box_hits(map, gt, grid_taus, deltas);
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        for (std::size_t k = 0; k < grid_taus.size(); ++k) expected[d][k] += ref.v2[d][k];
      }
    }
    for (auto& row : expected) {
      for (auto& v : row) v /= 3.0;
    }
    CHECK(curve.taus == grid_taus);
    CHECK(curve.accuracy == expected);
    CHECK(curve.n_images == 3);

    // Exact mode: thresholds are the distinct values across all maps.
    const auto exact = wsol::box_acc_sweep(samples, ThresholdSpec::exact(), deltas);
    std::vector<double> all;
    for (const auto& [map, gt] : samples) all.insert(all.end(), map.values().begin(), map.values().end());
    const auto taus = wsol::distinct_sorted(all);
    REQUIRE(exact.taus == taus);
    std::vector<std::vector<double>> exp2(deltas.size(), std::vector<double>(taus.size()));
    std::vector<double> legacy(taus.size());
    for (const auto& [map, gt] : samples) {
      const auto ref = oracle::brute_force_box_hits(map, gt, taus, deltas);
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        for (std::size_t k = 0; k < taus.size(); ++k) exp2[d][k] += ref.v2[d][k];
      }
      for (std::size_t k = 0; k < taus.size(); ++k) legacy[k] += ref.v1[k];
    }
    for (auto& row : exp2) {
      for (auto& v : row) v /= 3.0;
    }
    CHECK(exact.accuracy == exp2);
    double best_legacy = 0.0;
    for (double v : legacy) best_legacy = std::max(best_legacy, v / 3.0);
    CHECK(wsol::max_box_acc_v1(samples, ThresholdSpec::exact()) == best_legacy);
  }
}

TEST_CASE("perfect and degenerate predictions") {
  const Box gt{3, 4, 9, 11};
  std::vector<wsol::BoxSample> perfect{{box_indicator(16, 12, gt), {gt}}};
  const auto curve = wsol::box_acc_sweep(perfect, ThresholdSpec::uniform(1000));
  for (const auto& row : curve.accuracy) {
    for (std::size_t k = 1; k < row.size(); ++k) CHECK(row[k] == 1.0);
  }
  CHECK(wsol::max_box_acc_v2(curve).score == 1.0);

  auto flat = wsol::normalize_minmax(ScoreMap("z", 16, 12, std::vector<double>(192, 0.0)));
  REQUIRE(flat.degenerate());
  std::vector<wsol::BoxSample> none{{flat, {gt}}};
  for (const auto& spec : {ThresholdSpec::uniform(100), ThresholdSpec::exact()}) {
    wsol::BoxAccumulator acc(spec, {0.3, 0.5, 0.7});
    acc.add(flat, std::vector<Box>{gt});
    CHECK(acc.n_degenerate() == 1);
    for (const auto& row : acc.curve().accuracy) {
      for (double v : row) CHECK(v == 0.0);
    }
  }
  CHECK(wsol::max_box_acc_v1(none, ThresholdSpec::uniform(100)) == 0.0);
}

TEST_CASE("max_box_acc_v2") {
  wsol::BoxAccCurve curve;
  curve.taus = {0.1, 0.2, 0.3};
  curve.deltas = {0.3, 0.5, 0.7};
  curve.accuracy = {{0.9, 0.5, 0.9}, {0.1, 0.6, 0.2}, {0.3, 0.3, 0.0}};
  const auto result = wsol::max_box_acc_v2(curve);
  CHECK(result.score == doctest::Approx(0.6).epsilon(1e-15));
  REQUIRE(result.per_delta.size() == 3);
  CHECK(result.per_delta[0].best_tau == 0.1);
  CHECK(result.per_delta[1].best_tau == 0.2);
  CHECK(result.per_delta[2].best_tau == 0.1);
  CHECK(result.per_delta[2].best_acc == 0.3);

  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> hits(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    wsol::BoxAccCurve c;
    c.deltas = {0.3, 0.5, 0.7};
    for (int k = 0; k < 30; ++k) c.taus.push_back(k / 30.0);
    c.accuracy.assign(3, std::vector<double>(30));
    for (auto& row : c.accuracy) {
      for (auto& v : row) v = hits(rng) / 20.0;
    }
    const auto r = wsol::max_box_acc_v2(c);
    double sum = 0.0;
    for (int d = 0; d < 3; ++d) {
      double best = -1.0;
      double best_tau = 0.0;
      for (int k = 0; k < 30; ++k) {
        if (c.accuracy[d][k] > best) {
          best = c.accuracy[d][k];
          best_tau = c.taus[k];
        }
      }
      CHECK(r.per_delta[d].best_acc == best);
      CHECK(r.per_delta[d].best_tau == best_tau);
      for (double v : c.accuracy[d]) CHECK(r.per_delta[d].best_acc >= v);
      sum += best;
    }
    CHECK(r.score == doctest::Approx(sum / 3.0).epsilon(1e-15));
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 1.0);
  }

  try {
    wsol::max_box_acc_v2(wsol::BoxAccCurve{});
    FAIL("expected EmptyCurve");
  } catch (const wsol::Error& e) {
    CHECK(e.code() == wsol::ErrorCode::kEmptyCurve);
  }
}

TEST_CASE("legacy metric keeps only the largest component") {
  // A large blob away from the target and a small blob exactly on it.
  std::vector<double> values(20 * 20, 0.0);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) values[r * 20 + c] = 1.0;
  }
  for (int r = 15; r < 18; ++r) {
    for (int c = 15; c < 18; ++c) values[r * 20 + c] = 1.0;
  }
  auto map = wsol::normalize_minmax(ScoreMap("two", 20, 20, values));
  const Box target{15, 15, 18, 18};
  std::vector<wsol::BoxSample> samples{{map, {target}}};
  CHECK(wsol::max_box_acc_v1(samples, ThresholdSpec::exact(), 0.5) == 0.0);
  const auto v2 = wsol::box_acc_sweep(samples, ThresholdSpec::exact(), {0.5});
  CHECK(wsol::max_box_acc_v2(v2).score == 1.0);

  // Equal areas: the component whose first pixel comes first in raster order wins.
  std::vector<double> tie(12 * 12, 0.0);
  for (int r = 6; r < 8; ++r) {
    for (int c = 0; c < 2; ++c) tie[r * 12 + c] = 1.0;
  }
  for (int r = 1; r < 3; ++r) {
    for (int c = 8; c < 10; ++c) tie[r * 12 + c] = 1.0;
  }
  auto tie_map = wsol::normalize_minmax(ScoreMap("tie", 12, 12, tie));
  std::vector<wsol::BoxSample> first{{tie_map, {{8, 1, 10, 3}}}};
  std::vector<wsol::BoxSample> second{{tie_map, {{0, 6, 2, 8}}}};
  CHECK(wsol::max_box_acc_v1(first, ThresholdSpec::exact()) == 1.0);
  CHECK(wsol::max_box_acc_v1(second, ThresholdSpec::exact()) == 0.0);

  // Single component: V1 and V2 at 0.5 agree per threshold.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Box gt = random_box(rng, 16);
    std::vector<wsol::BoxSample> one{{box_indicator(16, 16, random_box(rng, 16)), {gt}}};
    wsol::BoxAccumulator acc(ThresholdSpec::uniform(20), {0.5}, 0.5);
    acc.add(one[0].first, one[0].second);
    CHECK(acc.curve().accuracy == acc.legacy_curve().accuracy);
  }
}

TEST_CASE("exact-sweep box accuracy is invariant to increasing transforms") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> power(0.2, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<wsol::BoxSample> samples;
    for (int i = 0; i < 4; ++i) samples.emplace_back(blob_map(rng, 18, 15), random_gt(rng, 18, 15));
    const double p = power(rng);
    std::vector<wsol::BoxSample> moved;
    for (const auto& [map, gt] : samples) {
      std::vector<double> v(map.values().begin(), map.values().end());
      for (auto& x : v) x = std::pow(x, p);
      moved.emplace_back(wsol::normalize_minmax(map.with_values(v)), gt);
    }
    const auto a = wsol::box_acc_sweep(samples, ThresholdSpec::exact());
    const auto b = wsol::box_acc_sweep(moved, ThresholdSpec::exact());
    CHECK(a.accuracy == b.accuracy);
    CHECK(wsol::max_box_acc_v2(a).score == wsol::max_box_acc_v2(b).score);
  }
}

TEST_CASE("accumulator merge is order independent") {
  std::mt19937_64 rng(9);
  std::vector<wsol::BoxSample> samples;
  for (int i = 0; i < 12; ++i) samples.emplace_back(blob_map(rng, 12, 12), random_gt(rng, 12, 12));
  for (const auto& spec : {ThresholdSpec::uniform(64), ThresholdSpec::exact()}) {
    wsol::BoxAccumulator whole(spec, {0.3, 0.5, 0.7});
    wsol::BoxAccumulator left(spec, {0.3, 0.5, 0.7}), right(spec, {0.3, 0.5, 0.7});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      whole.add(samples[i].first, samples[i].second);
      (i % 3 == 0 ? left : right).add(samples[i].first, samples[i].second);
    }
    right.merge(left);
    CHECK(right.curve().accuracy == whole.curve().accuracy);
    CHECK(right.legacy_curve().accuracy == whole.legacy_curve().accuracy);
    CHECK(right.n_images() == whole.n_images());
  }
}
