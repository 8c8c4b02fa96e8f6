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
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wsol/box_metrics.hpp"
#include "wsol/mask_metrics.hpp"
#include "wsol/scoremap.hpp"

namespace wsol::io {

// Scorepack: little-endian binary container of float32 score maps.
//
//   header: "WSEP" | version u16 = 1 | flags u16 = 0 | record_count u64
//   record: id_len u16 | id bytes | height u32 | width u32 |
//           height * width float32, row-major
inline constexpr char kScorepackMagic[4] = {'W', 'S', 'E', 'P'};
inline constexpr std::uint16_t kScorepackVersion = 1;
inline constexpr std::size_t kScorepackHeaderBytes = 16;

std::size_t scorepack_record_bytes(std::size_t id_length, int height,
                                   int width);

class ScoreMapSource {
 public:
  virtual ~ScoreMapSource() = default;
  // Next map, or nullopt once exhausted.
  virtual std::optional<ScoreMap> next() = 0;
};

// Streams records one at a time; memory use is bounded by the largest record.
class ScorepackReader : public ScoreMapSource {
 public:
  explicit ScorepackReader(const std::filesystem::path& path);

  std::optional<ScoreMap> next() override;

  std::uint64_t record_count() const { return record_count_; }
  // Largest payload buffer held at any point, in bytes.
  std::size_t peak_buffer_bytes() const { return peak_buffer_bytes_; }

 private:
  void read_exact(void* dst, std::size_t n, const char* what);

  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t record_count_ = 0;
  std::uint64_t records_read_ = 0;
  std::vector<float> buffer_;
  std::size_t peak_buffer_bytes_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

// Writes records as they arrive and patches the count on close().
class ScorepackWriter {
 public:
  explicit ScorepackWriter(const std::filesystem::path& path);
  ~ScorepackWriter();
  ScorepackWriter(const ScorepackWriter&) = delete;
  ScorepackWriter& operator=(const ScorepackWriter&) = delete;

  // Throws Error(kNonFiniteValue) if a value is not representable as a finite
  // float32, Error(kDuplicateId) on a repeated id.
  void write(const ScoreMap& map);
  void write(const std::string& image_id, int height, int width,
             std::span<const float> values);
  void close();

  std::uint64_t records_written() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t count_ = 0;
  bool closed_ = false;
  std::unordered_set<std::string> seen_ids_;
};

void write_scorepack(std::span<const ScoreMap> maps,
                     const std::filesystem::path& path);
std::vector<ScoreMap> read_scorepack(const std::filesystem::path& path);

// In-memory source, mainly for tests and synthetic runs.
class VectorSource : public ScoreMapSource {
 public:
  explicit VectorSource(std::vector<ScoreMap> maps) : maps_(std::move(maps)) {}
  std::optional<ScoreMap> next() override {
    if (pos_ >= maps_.size()) return std::nullopt;
    return maps_[pos_++];
  }

 private:
  std::vector<ScoreMap> maps_;
  std::size_t pos_ = 0;
};

enum class Split { kTrainWeaksup, kTrainFullsup, kTestFullsup };

std::string_view split_name(Split split);
// Throws Error(kInvalidArgument) on an unknown name.
Split parse_split(std::string_view name);

struct ManifestEntry {
  std::string image_id;
  int category_id = 0;
  int width = 0;
  int height = 0;
};

class SplitManifest {
 public:
  SplitManifest() = default;
  // Throws Error(kDuplicateId) or Error(kInvalidDimensions).
  SplitManifest(Split split, std::vector<ManifestEntry> entries);

  Split split() const { return split_; }
  const std::vector<ManifestEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const ManifestEntry* find(const std::string& image_id) const;
  // Index of `image_id` in entries(), or -1.
  std::ptrdiff_t index_of(const std::string& image_id) const;

  std::map<int, std::int64_t> category_counts() const;

 private:
  Split split_ = Split::kTestFullsup;
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text lines `image_id,category_id,width,height`; an optional header line
// starting with "image_id" is skipped. Throws Error(kMalformedLine) with the
// 1-based line number.
SplitManifest read_manifest(const std::filesystem::path& path, Split split);
void write_manifest(const SplitManifest& manifest,
                    const std::filesystem::path& path);

using BoxAnnotationSet = std::map<std::string, std::vector<Box>>;

// Text lines `image_id,x0,y0,x1,y1` (half-open) with an optional header.
// Boxes are validated against manifest image sizes.
BoxAnnotationSet read_boxes(const std::filesystem::path& path,
                            const SplitManifest& manifest);
void write_boxes(const BoxAnnotationSet& boxes,
                 const std::filesystem::path& path);

// 8-bit grayscale raster as stored in mask files.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

GrayImage read_gray_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
void write_png(const GrayImage& image, const std::filesystem::path& path);

inline constexpr std::uint8_t kMaskBackground = 0;
inline constexpr std::uint8_t kMaskIgnore = 128;
inline constexpr std::uint8_t kMaskForeground = 255;

// 0 -> background, 255 -> foreground, 128 -> ignore; anything else throws
// Error(kInvalidMaskValue) naming the pixel.
TernaryMask decode_mask(const GrayImage& image, const std::string& image_id);
GrayImage encode_mask(const TernaryMask& mask);

// Looks for <root>/<image_id>.png, then .pgm.
std::optional<std::filesystem::path> find_mask_file(
    const std::filesystem::path& root, const std::string& image_id);
TernaryMask read_mask(const std::filesystem::path& root,
                      const ManifestEntry& entry);

struct MaskAnnotation {
  int category_id = 0;
  TernaryMask mask;
};
using MaskAnnotationSet = std::map<std::string, MaskAnnotation>;

MaskAnnotationSet read_masks(const std::filesystem::path& root,
                             const SplitManifest& manifest);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  // split name -> category -> image count
  std::map<std::string, std::map<int, std::int64_t>> category_counts;

  bool ok() const { return violations.empty(); }
};

// Annotation coverage probe: true when `image_id` in `split` has ground truth.
using AnnotationProbe =
    std::function<bool(Split split, const std::string& image_id)>;

ValidationReport validate_splits(const SplitManifest& train_weaksup,
                                 const SplitManifest& train_fullsup,
                                 const SplitManifest& test_fullsup,
                                 const AnnotationProbe& has_annotation = {});

}  // namespace wsol::io
