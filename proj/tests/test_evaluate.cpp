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

#include <vector>

#include "synthetic.hpp"
#include "wsol/error.hpp"
#include "wsol/evaluate.hpp"
#include "wsol/report.hpp"

namespace io = wsol::io;
using wsol::ErrorCode;
using wsol::EvalConfig;
using wsol::ScoreMap;
using wsol::ThresholdSpec;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const wsol::Error& e) {
    return e.code();
  }
  FAIL("expected wsol::Error");
  return ErrorCode::kInvalidArgument;
}

wsol::Evaluation run(std::vector<ScoreMap> maps, const wsol::GroundTruth& gt, const EvalConfig& config) {
  io::VectorSource source(std::move(maps));
  return wsol::evaluate(source, gt, config);
}

EvalConfig boxes_config(int jobs = 1) {
  EvalConfig c;
  c.jobs = jobs;
  return c;
}

EvalConfig masks_config(int jobs = 1) {
  EvalConfig c;
  c.task = wsol::Task::kMasks;
  c.jobs = jobs;
  return c;
}

// Downsamples a map by block averaging, as a low-resolution producer would.
ScoreMap downsample(const ScoreMap& map, int h, int w) {
  std::vector<double> values(static_cast<std::size_t>(h) * w, 0.0);
  std::vector<int> counts(values.size(), 0);
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const std::size_t k = static_cast<std::size_t>(r * h / map.height()) * w + c * w / map.width();
      values[k] += map.at(r, c);
      ++counts[k];
    }
  }
  for (std::size_t k = 0; k < values.size(); ++k) values[k] /= counts[k];
  return ScoreMap(map.image_id(), h, w, values);
}

}  // namespace

TEST_CASE("blurred indicators score near perfectly") {
  const auto ds = synth::make_dataset(3, 6, 17);
  const wsol::BoxGroundTruth boxes(ds.manifest, ds.boxes());
  const wsol::InMemoryMaskGroundTruth masks(ds.manifest, ds.masks());

  const auto box_eval = run(synth::blurred_maps(ds), boxes, boxes_config());
  CHECK(box_eval.report.boxes->max_box_acc_v2 == 1.0);
  CHECK(box_eval.report.score == 1.0);
  CHECK(box_eval.report.n_images == 18);
  CHECK(box_eval.box_curve->taus.size() == 1000);

  const auto mask_eval = run(synth::blurred_maps(ds), masks, masks_config());
  CHECK(mask_eval.report.masks->m_px_ap >= 0.99);
  CHECK(mask_eval.report.masks->per_category.size() == 3);
  CHECK(mask_eval.category_pr.size() == 3);
  CHECK(mask_eval.report.masks->px_acc > 0.95);

  const auto center = run(synth::center_maps(ds), boxes, boxes_config());
  CHECK(center.report.score < box_eval.report.score);
  const auto center_masks = run(synth::center_maps(ds), masks, masks_config());
  CHECK(center_masks.report.score < mask_eval.report.score);
}

TEST_CASE("low-resolution maps are resized to the ground truth") {
  const auto ds = synth::make_dataset(2, 4, 23);
  const wsol::BoxGroundTruth boxes(ds.manifest, ds.boxes());
  std::vector<ScoreMap> small;
  for (const auto& m : synth::blurred_maps(ds, 3.0)) small.push_back(downsample(m, 28, 28));
  for (auto order : {wsol::ResizeOrder::kNormalizeFirst, wsol::ResizeOrder::kResizeFirst}) {
    auto config = boxes_config();
    config.resize_order = order;
    const auto eval = run(small, boxes, config);
    CHECK(eval.report.score > 0.8);
    CHECK(eval.report.config.resize_order == wsol::to_string(order));
  }
}

TEST_CASE("results do not depend on the number of jobs") {
  const auto ds = synth::make_dataset(3, 100, 5);
  const wsol::BoxGroundTruth boxes(ds.manifest, ds.boxes());
  const wsol::InMemoryMaskGroundTruth masks(ds.manifest, ds.masks());
  auto maps = synth::blurred_maps(ds, 4.0);
  // Mix in degraded maps so curves are not trivially flat.
  for (std::size_t i = 0; i < maps.size(); i += 3) {
    maps[i] = wsol::center_gaussian(maps[i].height(), maps[i].width());
    maps[i].set_image_id(ds.images[i].entry.image_id);
  }
  for (const auto& thresholds : {ThresholdSpec::uniform(200), ThresholdSpec::exact()}) {
    for (auto pooling : {wsol::Pooling::kCategory, wsol::Pooling::kImage}) {
      auto c1 = masks_config(1), c4 = masks_config(4);
      c1.thresholds = c4.thresholds = thresholds;
      c1.pooling = c4.pooling = pooling;
      CHECK(wsol::dump_report(wsol::to_json(run(maps, masks, c1).report)) ==
            wsol::dump_report(wsol::to_json(run(maps, masks, c4).report)));
    }
    auto b1 = boxes_config(1), b4 = boxes_config(4);
    b1.thresholds = b4.thresholds = thresholds;
    const auto e1 = run(maps, boxes, b1), e4 = run(maps, boxes, b4);
    CHECK(wsol::dump_report(wsol::to_json(e1.report)) == wsol::dump_report(wsol::to_json(e4.report)));
    CHECK(e1.box_curve->accuracy == e4.box_curve->accuracy);
  }
}

TEST_CASE("per-image pooling") {
  const auto ds = synth::make_dataset(2, 3, 31);
  auto mask_map = ds.masks();
  // One image with no foreground at all.
  const std::string empty_id = ds.images[0].entry.image_id;
  mask_map[empty_id] = wsol::TernaryMask(ds.images[0].mask.height(), ds.images[0].mask.width());
  const wsol::InMemoryMaskGroundTruth masks(ds.manifest, mask_map);
  auto config = masks_config();
  config.thresholds = ThresholdSpec::exact();
  config.pooling = wsol::Pooling::kImage;
  const auto maps = synth::center_maps(ds);
  const auto eval = run(maps, masks, config);
  CHECK(eval.report.masks->images_without_foreground == 1);

  // Category 0 holds images 0..2; image 0 is skipped.
  double sum = 0.0;
  for (int i = 1; i < 3; ++i) {
    std::vector<wsol::MaskSample> one{{maps[i], ds.images[i].mask}};
    sum += wsol::px_ap(wsol::pr_curve(one, ThresholdSpec::exact()));
  }
  CHECK(eval.report.masks->per_category[0].px_ap == doctest::Approx(sum / 2).epsilon(1e-12));
  CHECK(eval.report.config.pooling == "image");
}

TEST_CASE("degenerate maps are counted and scored as misses") {
  const auto ds = synth::make_dataset(1, 4, 41);
  const wsol::BoxGroundTruth boxes(ds.manifest, ds.boxes());
  auto maps = synth::blurred_maps(ds);
  maps[1] = maps[1].with_values(std::vector<double>(maps[1].size(), 0.25));
  const auto eval = run(maps, boxes, boxes_config());
  CHECK(eval.report.n_degenerate == 1);
  CHECK(eval.report.score == 0.75);

  std::vector<ScoreMap> flat;
  for (const auto& m : maps) flat.push_back(m.with_values(std::vector<double>(m.size(), 0.0)));
  auto exact = boxes_config();
  exact.thresholds = ThresholdSpec::exact();
  const auto none = run(flat, boxes, exact);
  CHECK(none.report.n_degenerate == 4);
  CHECK(none.report.score == 0.0);
  CHECK(none.report.boxes->per_delta.size() == 3);
}

TEST_CASE("map set must match the manifest") {
  const auto ds = synth::make_dataset(1, 3, 43);
  const wsol::BoxGroundTruth boxes(ds.manifest, ds.boxes());
  auto maps = synth::blurred_maps(ds);

  auto missing = maps;
  missing.pop_back();
  CHECK(code_of([&] { run(missing, boxes, boxes_config()); }) == ErrorCode::kMissingScoreMap);

  auto extra = maps;
  extra.push_back(ScoreMap("stranger", 4, 4, std::vector<double>(16, 0.5)));
  CHECK(code_of([&] { run(extra, boxes, boxes_config()); }) == ErrorCode::kUnknownImage);

  auto twice = maps;
  twice.push_back(maps[0]);
  CHECK(code_of([&] { run(twice, boxes, boxes_config()); }) == ErrorCode::kDuplicateId);

  const wsol::InMemoryMaskGroundTruth masks(ds.manifest, ds.masks());
  CHECK(code_of([&] { run(maps, masks, boxes_config()); }) == ErrorCode::kInvalidArgument);

  auto no_boxes = ds.boxes();
  no_boxes.erase(ds.images[2].entry.image_id);
  const wsol::BoxGroundTruth partial(ds.manifest, no_boxes);
  CHECK(code_of([&] { run(maps, partial, boxes_config()); }) == ErrorCode::kEmptyGroundTruth);
}

TEST_CASE("maps from disk and mask directories") {
  synth::TempDir dir("eval");
  const auto ds = synth::make_dataset(2, 3, 47);
  const auto files = synth::write_dataset(ds, dir.path(), "test");
  io::write_scorepack(synth::blurred_maps(ds), dir / "maps.wsep");
  const auto manifest = io::read_manifest(files.manifest, io::Split::kTestFullsup);
  const wsol::MaskDirectoryGroundTruth masks(manifest, files.masks);
  const wsol::InMemoryMaskGroundTruth memory(ds.manifest, ds.masks());
  io::ScorepackReader reader(dir / "maps.wsep");
  const auto from_disk = wsol::evaluate(reader, masks, masks_config());
  // Values pass through float32 on disk, so compare loosely.
  const auto in_memory = run(synth::blurred_maps(ds), memory, masks_config());
  CHECK(from_disk.report.score == doctest::Approx(in_memory.report.score).epsilon(1e-6));
}

TEST_CASE("report json round trip") {
  const auto ds = synth::make_dataset(2, 3, 53);
  const wsol::InMemoryMaskGroundTruth masks(ds.manifest, ds.masks());
  auto report = run(synth::blurred_maps(ds), masks, masks_config()).report;
  report.generated_at = "2026-01-01T00:00:00Z";
  const auto j = wsol::to_json(report);
  CHECK(j.at("toolkit_version") == wsol::kToolkitVersion);
  CHECK(j.at("schema_version") == wsol::kReportSchemaVersion);
  const auto back = wsol::metric_report_from_json(j);
  CHECK(wsol::to_json(back) == j);
  CHECK(wsol::headline_score(back) == report.masks->m_px_ap);
  CHECK(code_of([] { wsol::metric_report_from_json(nlohmann::json::object()); }) == ErrorCode::kInvalidArgument);
}
