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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wsol {

// A real-valued H x W score map for one image, stored row-major.
//
// Every value is finite. A map flagged `normalized` has all values in [0, 1].
// A map flagged `degenerate` came from a constant input that could not be
// normalized; metric engines score such a map as predicting nothing.
class ScoreMap {
 public:
  ScoreMap() = default;

  // Throws Error(kInvalidDimensions) if the shape is empty or does not match
  // values.size(), Error(kNonFiniteValue) on NaN or infinity.
  ScoreMap(std::string image_id, int height, int width,
           std::vector<double> values);

  const std::string& image_id() const { return image_id_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }

  bool normalized() const { return normalized_; }
  bool degenerate() const { return degenerate_; }

  double min_value() const;
  double max_value() const;

  // Returns a copy carrying new values, same id and shape, flags cleared.
  ScoreMap with_values(std::vector<double> values) const;

  void set_image_id(std::string id) { image_id_ = std::move(id); }

 private:
  friend ScoreMap normalize_minmax(const ScoreMap&);
  friend ScoreMap normalize_max(const ScoreMap&);
  friend ScoreMap center_gaussian(int, int, double);
  friend ScoreMap resize_bilinear(const ScoreMap&, int, int);
  friend ScoreMap gaussian_blur(const ScoreMap&, double);

  std::string image_id_;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
  bool normalized_ = false;
  bool degenerate_ = false;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, std::vector<unsigned char> bits);
  BinaryMask(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool value) {
    bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }
  std::span<const unsigned char> bits() const { return bits_; }

  bool operator==(const BinaryMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<unsigned char> bits_;
};

// (v - min) / (max - min). A constant map yields all zeros with the
// degenerate flag set.
ScoreMap normalize_minmax(const ScoreMap& map);

// v / max for non-negative maps. Throws Error(kNegativeValues) if any value is
// negative; an all-zero map yields all zeros with the degenerate flag set.
ScoreMap normalize_max(const ScoreMap& map);

// Bilinear resampling with pixel centers on the half-integer grid and edge
// clamping. Normalization and degenerate flags carry over.
ScoreMap resize_bilinear(const ScoreMap& map, int out_height, int out_width);

// Separable Gaussian blur. The kernel is truncated at radius ceil(3 sigma) and
// renormalized to unit sum; borders use replicate padding.
ScoreMap gaussian_blur(const ScoreMap& map, double sigma);

// Normalized 1-D kernel used by gaussian_blur, length 2 * radius + 1.
std::vector<double> gaussian_kernel(double sigma);

// bit(i, j) = value(i, j) >= tau. Requires a normalized map and tau in [0, 1].
BinaryMask threshold(const ScoreMap& map, double tau);

// Isotropic Gaussian centered on the image. Offsets are measured in units of
// half the shorter image side, so sigma = 1 gives a broad central blob.
ScoreMap center_gaussian(int height, int width, double sigma = 1.0);

}  // namespace wsol
