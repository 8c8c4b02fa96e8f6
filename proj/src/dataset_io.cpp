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
#include "wsol/dataset_io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>

#include "wsol/error.hpp"

namespace wsol::io {

namespace fs = std::filesystem;

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(const unsigned char* bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_int(std::string_view s, int& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

Error malformed(const fs::path& path, std::size_t line_no,
                const std::string& why) {
  return Error(ErrorCode::kMalformedLine, path.string() + ":" +
                                              std::to_string(line_no) + ": " +
                                              why);
}

std::ifstream open_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return in;
}

// Calls fn(line_no, fields) for every non-blank, non-header line.
template <typename Fn>
void for_each_record(const fs::path& path, Fn&& fn) {
  std::ifstream in = open_text(path);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (first && text.starts_with("image_id")) {
      first = false;
      continue;
    }
    first = false;
    fn(line_no, split_fields(text));
  }
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read error on " + path.string());
}

}  // namespace

std::size_t scorepack_record_bytes(std::size_t id_length, int height,
                                   int width) {
  return 2 + id_length + 4 + 4 +
         4 * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

// ----------------------------------------------------------------------------
// Scorepack

ScorepackReader::ScorepackReader(const fs::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  unsigned char header[kScorepackHeaderBytes];
  in_.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in_.gcount() < 4 || std::memcmp(header, kScorepackMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + " is not a scorepack");
  }
  if (static_cast<std::size_t>(in_.gcount()) != sizeof(header)) {
    throw Error(ErrorCode::kTruncatedRecord,
                path.string() + ": header is truncated");
  }
  const auto version = get_le<std::uint16_t>(header + 4);
  const auto flags = get_le<std::uint16_t>(header + 6);
  if (version != kScorepackVersion || flags != 0) {
    throw Error(ErrorCode::kUnsupportedVersion,
                path.string() + ": version " + std::to_string(version) +
                    " flags " + std::to_string(flags));
  }
  record_count_ = get_le<std::uint64_t>(header + 8);
}

void ScorepackReader::read_exact(void* dst, std::size_t n, const char* what) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw Error(ErrorCode::kTruncatedRecord,
                path_.string() + ": record " + std::to_string(records_read_) +
                    " of " + std::to_string(record_count_) + " ends inside " +
                    what);
  }
}

std::optional<ScoreMap> ScorepackReader::next() {
  if (records_read_ == record_count_) {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kTruncatedRecord,
                  path_.string() + ": bytes remain after " +
                      std::to_string(record_count_) + " records");
    }
    return std::nullopt;
  }
  unsigned char len_bytes[2];
  read_exact(len_bytes, 2, "id length");
  std::string id(get_le<std::uint16_t>(len_bytes), '\0');
  read_exact(id.data(), id.size(), "id");
  unsigned char dims[8];
  read_exact(dims, 8, "dimensions");
  const auto height = get_le<std::uint32_t>(dims);
  const auto width = get_le<std::uint32_t>(dims + 4);
  if (height == 0 || width == 0 ||
      height > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
      width > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::kInvalidDimensions,
                path_.string() + ": image '" + id + "' has shape " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  const std::uint64_t n = static_cast<std::uint64_t>(height) * width;
  // Refuse to allocate more than the file can still hold.
  const auto here = in_.tellg();
  in_.seekg(0, std::ios::end);
  const auto end = in_.tellg();
  in_.seekg(here);
  if (here < 0 || end < here ||
      static_cast<std::uint64_t>(end - here) < 4 * n) {
    throw Error(ErrorCode::kTruncatedRecord,
                path_.string() + ": record '" + id + "' needs " +
                    std::to_string(4 * n) + " value bytes");
  }
  buffer_.resize(n);
  peak_buffer_bytes_ = std::max(peak_buffer_bytes_, buffer_.capacity() * sizeof(float));
  read_exact(buffer_.data(), 4 * n, "values");
  std::vector<double> values(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    // Decode explicitly so the format stays little-endian on any host.
    const auto* b = reinterpret_cast<const unsigned char*>(buffer_.data() + i);
    const auto bits = get_le<std::uint32_t>(b);
    float f;
    std::memcpy(&f, &bits, 4);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  path_.string() + ": image '" + id + "' pixel (" +
                      std::to_string(i / width) + "," +
                      std::to_string(i % width) + ")");
    }
    values[i] = f;
  }
  if (!seen_ids_.insert(id).second) {
    throw Error(ErrorCode::kDuplicateId,
                path_.string() + ": image '" + id + "' appears twice");
  }
  ++records_read_;
  return ScoreMap(std::move(id), static_cast<int>(height),
                  static_cast<int>(width), std::move(values));
}

ScorepackWriter::ScorepackWriter(const fs::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  std::string header(kScorepackMagic, 4);
  put_le<std::uint16_t>(header, kScorepackVersion);
  put_le<std::uint16_t>(header, 0);
  put_le<std::uint64_t>(header, 0);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

ScorepackWriter::~ScorepackWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void ScorepackWriter::write(const ScoreMap& map) {
  std::vector<float> values(map.size());
  std::span<const double> src = map.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    values[i] = static_cast<float>(src[i]);
  }
  write(map.image_id(), map.height(), map.width(), values);
}

void ScorepackWriter::write(const std::string& image_id, int height, int width,
                            std::span<const float> values) {
  if (closed_) throw Error(ErrorCode::kIoFailure, path_.string() + " is closed");
  if (image_id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "image id longer than 65535 bytes");
  }
  if (height < 1 || width < 1 ||
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width) !=
          values.size()) {
    throw Error(ErrorCode::kInvalidDimensions,
                "image '" + image_id + "' shape does not match its values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "image '" + image_id + "' pixel (" +
                      std::to_string(i / width) + "," +
                      std::to_string(i % width) + ") is not a finite float32");
    }
  }
  if (!seen_ids_.insert(image_id).second) {
    throw Error(ErrorCode::kDuplicateId, "image '" + image_id + "' written twice");
  }
  std::string record;
  record.reserve(scorepack_record_bytes(image_id.size(), height, width));
  put_le<std::uint16_t>(record, static_cast<std::uint16_t>(image_id.size()));
  record += image_id;
  put_le<std::uint32_t>(record, static_cast<std::uint32_t>(height));
  put_le<std::uint32_t>(record, static_cast<std::uint32_t>(width));
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_le<std::uint32_t>(record, bits);
  }
  out_.write(record.data(), static_cast<std::streamsize>(record.size()));
  if (!out_) throw Error(ErrorCode::kIoFailure, "write failed on " + path_.string());
  ++count_;
}

void ScorepackWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::string count;
  put_le<std::uint64_t>(count, count_);
  out_.seekp(8);
  out_.write(count.data(), static_cast<std::streamsize>(count.size()));
  out_.close();
  if (!out_) throw Error(ErrorCode::kIoFailure, "cannot finish " + path_.string());
}

void write_scorepack(std::span<const ScoreMap> maps, const fs::path& path) {
  ScorepackWriter writer(path);
  for (const ScoreMap& m : maps) writer.write(m);
  writer.close();
}

std::vector<ScoreMap> read_scorepack(const fs::path& path) {
  ScorepackReader reader(path);
  std::vector<ScoreMap> maps;
  while (auto m = reader.next()) maps.push_back(std::move(*m));
  return maps;
}

// ----------------------------------------------------------------------------
// Manifests and boxes

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrainWeaksup: return "train-weaksup";
    case Split::kTrainFullsup: return "train-fullsup";
    case Split::kTestFullsup: return "test-fullsup";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  for (Split s : {Split::kTrainWeaksup, Split::kTrainFullsup, Split::kTestFullsup}) {
    if (split_name(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown split '" + std::string(name) + "'");
}

SplitManifest::SplitManifest(Split split, std::vector<ManifestEntry> entries)
    : split_(split), entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ManifestEntry& e = entries_[i];
    if (e.width < 1 || e.height < 1) {
      throw Error(ErrorCode::kInvalidDimensions,
                  "image '" + e.image_id + "' has size " +
                      std::to_string(e.width) + "x" + std::to_string(e.height));
    }
    if (!index_.emplace(e.image_id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "image '" + e.image_id + "' listed twice in " +
                      std::string(split_name(split)));
    }
  }
}

const ManifestEntry* SplitManifest::find(const std::string& image_id) const {
  auto it = index_.find(image_id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::ptrdiff_t SplitManifest::index_of(const std::string& image_id) const {
  auto it = index_.find(image_id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::map<int, std::int64_t> SplitManifest::category_counts() const {
  std::map<int, std::int64_t> counts;
  for (const ManifestEntry& e : entries_) ++counts[e.category_id];
  return counts;
}

SplitManifest read_manifest(const fs::path& path, Split split) {
  std::vector<ManifestEntry> entries;
  for_each_record(path, [&](std::size_t line_no, const auto& f) {
    ManifestEntry e;
    if (f.size() != 4 || f[0].empty() || !parse_int(f[1], e.category_id) ||
        !parse_int(f[2], e.width) || !parse_int(f[3], e.height)) {
      throw malformed(path, line_no,
                      "expected image_id,category_id,width,height");
    }
    if (e.width < 1 || e.height < 1) {
      throw malformed(path, line_no, "image size must be positive");
    }
    e.image_id = std::string(f[0]);
    entries.push_back(std::move(e));
  });
  return SplitManifest(split, std::move(entries));
}

void write_manifest(const SplitManifest& manifest, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out << "image_id,category_id,width,height\n";
  for (const ManifestEntry& e : manifest.entries()) {
    out << e.image_id << ',' << e.category_id << ',' << e.width << ','
        << e.height << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed on " + path.string());
}

BoxAnnotationSet read_boxes(const fs::path& path, const SplitManifest& manifest) {
  BoxAnnotationSet boxes;
  for_each_record(path, [&](std::size_t line_no, const auto& f) {
    Box b;
    if (f.size() != 5 || f[0].empty() || !parse_int(f[1], b.x0) ||
        !parse_int(f[2], b.y0) || !parse_int(f[3], b.x1) ||
        !parse_int(f[4], b.y1)) {
      throw malformed(path, line_no, "expected image_id,x0,y0,x1,y1");
    }
    if (!b.valid()) {
      throw malformed(path, line_no,
                      "box needs 0 <= x0 < x1 and 0 <= y0 < y1");
    }
    const std::string id(f[0]);
    const ManifestEntry* entry = manifest.find(id);
    if (entry == nullptr) {
      throw Error(ErrorCode::kUnknownImage,
                  path.string() + ":" + std::to_string(line_no) + ": image '" +
                      id + "' is not in the manifest");
    }
    if (b.x1 > entry->width || b.y1 > entry->height) {
      throw Error(ErrorCode::kOutOfBounds,
                  path.string() + ":" + std::to_string(line_no) + ": box for '" +
                      id + "' exceeds " + std::to_string(entry->width) + "x" +
                      std::to_string(entry->height));
    }
    boxes[id].push_back(b);
  });
  return boxes;
}

void write_boxes(const BoxAnnotationSet& boxes, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out << "image_id,x0,y0,x1,y1\n";
  for (const auto& [id, list] : boxes) {
    for (const Box& b : list) {
      out << id << ',' << b.x0 << ',' << b.y0 << ',' << b.x1 << ',' << b.y1
          << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed on " + path.string());
}

// ----------------------------------------------------------------------------
// Masks

namespace {

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(static_cast<char>(c));
    }
    return t;
  };
  const std::string magic = token();
  int width = 0;
  int height = 0;
  int maxval = 0;
  if (magic != "P5" || !parse_int(token(), width) ||
      !parse_int(token(), height) || !parse_int(token(), maxval) ||
      width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidMaskValue,
                path.string() + " is not a binary PGM");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::kInvalidMaskValue,
                path.string() + ": only 8-bit PGM masks are supported");
  }
  GrayImage img{width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height)};
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": truncated PGM data");
  }
  return img;
}

GrayImage read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string why = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + why);
  }
  if (image.format != PNG_FORMAT_GRAY) {
    png_image_free(&image);
    throw Error(ErrorCode::kInvalidMaskValue,
                path.string() + ": mask must be 8-bit grayscale");
  }
  GrayImage img{static_cast<int>(image.width), static_cast<int>(image.height),
                std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string why = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + why);
  }
  return img;
}

}  // namespace

GrayImage read_gray_image(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return read_png(path);
  return read_pgm(path);
}

void write_pgm(const GrayImage& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed on " + path.string());
}

void write_png(const GrayImage& image, const fs::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0,
                               nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + why);
  }
}

TernaryMask decode_mask(const GrayImage& image, const std::string& image_id) {
  std::vector<PixelLabel> labels(image.pixels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (image.pixels[i]) {
      case kMaskBackground: labels[i] = PixelLabel::kBackground; break;
      case kMaskForeground: labels[i] = PixelLabel::kForeground; break;
      case kMaskIgnore: labels[i] = PixelLabel::kIgnore; break;
      default:
        throw Error(ErrorCode::kInvalidMaskValue,
                    "mask for '" + image_id + "' has value " +
                        std::to_string(image.pixels[i]) + " at (" +
                        std::to_string(i / image.width) + "," +
                        std::to_string(i % image.width) + ")");
    }
  }
  return TernaryMask(image.height, image.width, std::move(labels));
}

GrayImage encode_mask(const TernaryMask& mask) {
  GrayImage img{mask.width(), mask.height(),
                std::vector<std::uint8_t>(mask.size())};
  std::span<const PixelLabel> labels = mask.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case PixelLabel::kBackground: img.pixels[i] = kMaskBackground; break;
      case PixelLabel::kForeground: img.pixels[i] = kMaskForeground; break;
      case PixelLabel::kIgnore: img.pixels[i] = kMaskIgnore; break;
    }
  }
  return img;
}

std::optional<fs::path> find_mask_file(const fs::path& root,
                                       const std::string& image_id) {
  for (const char* ext : {".png", ".pgm"}) {
    fs::path candidate = root / (image_id + ext);
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) return candidate;
  }
  return std::nullopt;
}

TernaryMask read_mask(const fs::path& root, const ManifestEntry& entry) {
  const auto file = find_mask_file(root, entry.image_id);
  if (!file) {
    throw Error(ErrorCode::kMissingMask,
                "no mask for '" + entry.image_id + "' under " + root.string());
  }
  const GrayImage img = read_gray_image(*file);
  if (img.width != entry.width || img.height != entry.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask for '" + entry.image_id + "' is " +
                    std::to_string(img.width) + "x" + std::to_string(img.height) +
                    ", manifest says " + std::to_string(entry.width) + "x" +
                    std::to_string(entry.height));
  }
  return decode_mask(img, entry.image_id);
}

MaskAnnotationSet read_masks(const fs::path& root, const SplitManifest& manifest) {
  MaskAnnotationSet masks;
  for (const ManifestEntry& e : manifest.entries()) {
    masks.emplace(e.image_id, MaskAnnotation{e.category_id, read_mask(root, e)});
  }
  return masks;
}

// ----------------------------------------------------------------------------
// Split validation

ValidationReport validate_splits(const SplitManifest& train_weaksup,
                                 const SplitManifest& train_fullsup,
                                 const SplitManifest& test_fullsup,
                                 const AnnotationProbe& has_annotation) {
  ValidationReport report;
  const SplitManifest* splits[] = {&train_weaksup, &train_fullsup, &test_fullsup};

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      for (const ManifestEntry& e : splits[i]->entries()) {
        if (splits[j]->find(e.image_id) != nullptr) {
          report.violations.push_back(
              "image '" + e.image_id + "' appears in both " +
              std::string(split_name(splits[i]->split())) + " and " +
              std::string(split_name(splits[j]->split())));
        }
      }
    }
  }

  for (const SplitManifest* s : splits) {
    report.category_counts[std::string(split_name(s->split()))] =
        s->category_counts();
  }

  const auto train_categories = train_weaksup.category_counts();
  for (const SplitManifest* s : {&train_fullsup, &test_fullsup}) {
    for (const auto& [category, count] : s->category_counts()) {
      if (!train_categories.contains(category)) {
        report.warnings.push_back(
            "category " + std::to_string(category) + " appears in " +
            std::string(split_name(s->split())) + " but not in train-weaksup");
      }
    }
  }

  if (has_annotation) {
    for (const SplitManifest* s : {&train_fullsup, &test_fullsup}) {
      for (const ManifestEntry& e : s->entries()) {
        if (!has_annotation(s->split(), e.image_id)) {
          report.violations.push_back(
              "image '" + e.image_id + "' in " +
              std::string(split_name(s->split())) + " has no annotation");
        }
      }
    }
  }
  return report;
}

}  // namespace wsol::io
