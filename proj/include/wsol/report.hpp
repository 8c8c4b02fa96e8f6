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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wsol {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Everything needed to reproduce a run.
struct ReportConfig {
  std::string task;
  std::string normalization;
  std::string resize_order;
  std::string threshold_mode;  // "grid" or "exact"
  std::int64_t threshold_count = 0;  // grid size; 0 in exact mode
  std::vector<double> deltas;
  double legacy_delta = 0.5;
  double px_acc_tau = 0.5;
  std::string pooling;
  double blur_sigma = 0.0;
  std::string scoremaps;
  std::string ground_truth;
  std::string manifest;
};

struct DeltaResult {
  double delta = 0.0;
  double best_tau = 0.0;
  double best_acc = 0.0;
};

struct BoxResults {
  std::vector<DeltaResult> per_delta;
  double max_box_acc_v2 = 0.0;
  double max_box_acc_v1 = 0.0;
};

struct CategoryResult {
  int category = 0;
  double px_ap = 0.0;
  std::int64_t n_images = 0;
  std::int64_t foreground_pixels = 0;
  std::int64_t background_pixels = 0;
  std::int64_t ignored_pixels = 0;
};

struct MaskResults {
  std::vector<CategoryResult> per_category;
  double m_px_ap = 0.0;
  double px_acc = 0.0;
  // Per-image pooling only: images skipped for lacking foreground.
  std::int64_t images_without_foreground = 0;
};

struct MetricReport {
  std::string toolkit_version = kToolkitVersion;
  int schema_version = kReportSchemaVersion;
  ReportConfig config;
  std::int64_t n_images = 0;
  std::int64_t n_degenerate = 0;
  std::optional<BoxResults> boxes;
  std::optional<MaskResults> masks;
  double score = 0.0;
  std::optional<std::string> generated_at;
};

nlohmann::json to_json(const MetricReport& report);
// Throws Error(kInvalidArgument) when required fields are missing.
MetricReport metric_report_from_json(const nlohmann::json& j);

// Pretty-printed JSON with a trailing newline; byte-stable for equal input.
std::string dump_report(const nlohmann::json& j);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace wsol
