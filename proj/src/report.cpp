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
#include "wsol/report.hpp"

#include <fstream>
#include <sstream>

#include "wsol/error.hpp"

namespace wsol {

using nlohmann::json;

json to_json(const MetricReport& r) {
  json j;
  j["toolkit_version"] = r.toolkit_version;
  j["schema_version"] = r.schema_version;
  const ReportConfig& c = r.config;
  j["config"] = {
      {"task", c.task},
      {"normalization", c.normalization},
      {"resize_order", c.resize_order},
      {"thresholds", {{"mode", c.threshold_mode}, {"count", c.threshold_count}}},
      {"deltas", c.deltas},
      {"legacy_delta", c.legacy_delta},
      {"px_acc_tau", c.px_acc_tau},
      {"pooling", c.pooling},
      {"blur_sigma", c.blur_sigma},
      {"inputs",
       {{"scoremaps", c.scoremaps},
        {"ground_truth", c.ground_truth},
        {"manifest", c.manifest}}},
  };
  j["counts"] = {{"images", r.n_images}, {"degenerate_maps", r.n_degenerate}};
  if (r.boxes) {
    json per_delta = json::array();
    for (const DeltaResult& d : r.boxes->per_delta) {
      per_delta.push_back(
          {{"delta", d.delta}, {"best_tau", d.best_tau}, {"best_acc", d.best_acc}});
    }
    j["boxes"] = {{"per_delta", per_delta},
                  {"max_box_acc_v2", r.boxes->max_box_acc_v2},
                  {"max_box_acc_v1", r.boxes->max_box_acc_v1}};
  }
  if (r.masks) {
    json per_category = json::array();
    for (const CategoryResult& cr : r.masks->per_category) {
      per_category.push_back({{"category", cr.category},
                              {"px_ap", cr.px_ap},
                              {"images", cr.n_images},
                              {"foreground_pixels", cr.foreground_pixels},
                              {"background_pixels", cr.background_pixels},
                              {"ignored_pixels", cr.ignored_pixels}});
    }
    j["masks"] = {{"per_category", per_category},
                  {"m_px_ap", r.masks->m_px_ap},
                  {"px_acc", r.masks->px_acc},
                  {"images_without_foreground",
                   r.masks->images_without_foreground}};
  }
  j["score"] = r.score;
  if (r.generated_at) j["generated_at"] = *r.generated_at;
  return j;
}

MetricReport metric_report_from_json(const json& j) {
  try {
    MetricReport r;
    r.toolkit_version = j.at("toolkit_version").get<std::string>();
    r.schema_version = j.at("schema_version").get<int>();
    const json& c = j.at("config");
    r.config.task = c.at("task").get<std::string>();
    r.config.normalization = c.at("normalization").get<std::string>();
    r.config.resize_order = c.at("resize_order").get<std::string>();
    r.config.threshold_mode = c.at("thresholds").at("mode").get<std::string>();
    r.config.threshold_count = c.at("thresholds").at("count").get<std::int64_t>();
    r.config.deltas = c.at("deltas").get<std::vector<double>>();
    r.config.legacy_delta = c.at("legacy_delta").get<double>();
    r.config.px_acc_tau = c.at("px_acc_tau").get<double>();
    r.config.pooling = c.at("pooling").get<std::string>();
    r.config.blur_sigma = c.at("blur_sigma").get<double>();
    r.config.scoremaps = c.at("inputs").at("scoremaps").get<std::string>();
    r.config.ground_truth = c.at("inputs").at("ground_truth").get<std::string>();
    r.config.manifest = c.at("inputs").at("manifest").get<std::string>();
    r.n_images = j.at("counts").at("images").get<std::int64_t>();
    r.n_degenerate = j.at("counts").at("degenerate_maps").get<std::int64_t>();
    if (j.contains("boxes")) {
      BoxResults b;
      for (const json& d : j["boxes"].at("per_delta")) {
        b.per_delta.push_back({d.at("delta").get<double>(),
                               d.at("best_tau").get<double>(),
                               d.at("best_acc").get<double>()});
      }
      b.max_box_acc_v2 = j["boxes"].at("max_box_acc_v2").get<double>();
      b.max_box_acc_v1 = j["boxes"].at("max_box_acc_v1").get<double>();
      r.boxes = std::move(b);
    }
    if (j.contains("masks")) {
      MaskResults m;
      for (const json& cr : j["masks"].at("per_category")) {
        m.per_category.push_back({cr.at("category").get<int>(),
                                  cr.at("px_ap").get<double>(),
                                  cr.at("images").get<std::int64_t>(),
                                  cr.at("foreground_pixels").get<std::int64_t>(),
                                  cr.at("background_pixels").get<std::int64_t>(),
                                  cr.at("ignored_pixels").get<std::int64_t>()});
      }
      m.m_px_ap = j["masks"].at("m_px_ap").get<double>();
      m.px_acc = j["masks"].at("px_acc").get<double>();
      m.images_without_foreground =
          j["masks"].at("images_without_foreground").get<std::int64_t>();
      r.masks = std::move(m);
    }
    r.score = j.at("score").get<double>();
    if (j.contains("generated_at")) {
      r.generated_at = j["generated_at"].get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("malformed metric report: ") + e.what());
  }
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out << dump_report(j);
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed on " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                path.string() + ": " + e.what());
  }
}

}  // namespace wsol
