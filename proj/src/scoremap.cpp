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
#include "wsol/scoremap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "wsol/error.hpp"

namespace wsol {

namespace {

void check_shape(int height, int width, std::size_t n) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "shape " + std::to_string(height) + "x" +
                    std::to_string(width) + " is empty");
  }
  if (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) != n) {
    throw Error(ErrorCode::kInvalidDimensions,
                "shape " + std::to_string(height) + "x" +
                    std::to_string(width) + " does not match " +
                    std::to_string(n) + " values");
  }
}

}  // namespace

ScoreMap::ScoreMap(std::string image_id, int height, int width,
                   std::vector<double> values)
    : image_id_(std::move(image_id)),
      height_(height),
      width_(width),
      values_(std::move(values)) {
  check_shape(height_, width_, values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "image '" + image_id_ + "' pixel (" +
                      std::to_string(i / width_) + "," +
                      std::to_string(i % width_) + ")");
    }
  }
}

double ScoreMap::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScoreMap::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

ScoreMap ScoreMap::with_values(std::vector<double> values) const {
  return ScoreMap(image_id_, height_, width_, std::move(values));
}

BinaryMask::BinaryMask(int height, int width, std::vector<unsigned char> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  check_shape(height_, width_, bits_.size());
}

BinaryMask::BinaryMask(int height, int width)
    : BinaryMask(height, width,
                 std::vector<unsigned char>(
                     static_cast<std::size_t>(std::max(height, 0)) *
                     static_cast<std::size_t>(std::max(width, 0)))) {}

ScoreMap normalize_minmax(const ScoreMap& map) {
  ScoreMap out = map;
  const double lo = map.min_value();
  const double hi = map.max_value();
  if (hi == lo) {
    std::fill(out.values_.begin(), out.values_.end(), 0.0);
    out.degenerate_ = true;
  } else {
    const double range = hi - lo;
    for (double& v : out.values_) v = (v - lo) / range;
    // Guard against rounding pushing the extremes off the unit interval.
    for (double& v : out.values_) v = std::clamp(v, 0.0, 1.0);
    out.degenerate_ = false;
  }
  out.normalized_ = true;
  return out;
}

ScoreMap normalize_max(const ScoreMap& map) {
  ScoreMap out = map;
  if (map.min_value() < 0.0) {
    throw Error(ErrorCode::kNegativeValues,
                "image '" + map.image_id() + "' has negative scores");
  }
  const double hi = map.max_value();
  if (hi == 0.0) {
    std::fill(out.values_.begin(), out.values_.end(), 0.0);
    out.degenerate_ = true;
  } else {
    for (double& v : out.values_) v = std::min(v / hi, 1.0);
    out.degenerate_ = false;
  }
  out.normalized_ = true;
  return out;
}

ScoreMap resize_bilinear(const ScoreMap& map, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "resize target " + std::to_string(out_height) + "x" +
                    std::to_string(out_width));
  }
  if (out_height == map.height() && out_width == map.width()) return map;

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
      double src = (o + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const int lo = static_cast<int>(std::floor(src));
      const int hi = std::min(lo + 1, in - 1);
      t[o] = {lo, hi, src - lo};
    }
    return t;
  };
  const std::vector<Tap> rows = taps(map.height(), out_height);
  const std::vector<Tap> cols = taps(map.width(), out_width);

  std::vector<double> values(static_cast<std::size_t>(out_height) * out_width);
  for (int r = 0; r < out_height; ++r) {
    const Tap& ty = rows[r];
    for (int c = 0; c < out_width; ++c) {
      const Tap& tx = cols[c];
      const double top = map.at(ty.lo, tx.lo) * (1.0 - tx.frac) +
                         map.at(ty.lo, tx.hi) * tx.frac;
      const double bottom = map.at(ty.hi, tx.lo) * (1.0 - tx.frac) +
                            map.at(ty.hi, tx.hi) * tx.frac;
      double v = top * (1.0 - ty.frac) + bottom * ty.frac;
      values[static_cast<std::size_t>(r) * out_width + c] = v;
    }
  }
  // Convex combinations stay inside the input range up to rounding.
  const double lo = map.min_value();
  const double hi = map.max_value();
  for (double& v : values) v = std::clamp(v, lo, hi);

  ScoreMap out(map.image_id(), out_height, out_width, std::move(values));
  out.normalized_ = map.normalized();
  out.degenerate_ = map.degenerate();
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidSigma, "sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[i + radius] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

ScoreMap gaussian_blur(const ScoreMap& map, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int h = map.height();
  const int w = map.width();
  std::span<const double> src = map.values();

  std::vector<double> horizontal(src.size());
  for (int r = 0; r < h; ++r) {
    const double* row = src.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * row[std::clamp(c + k, 0, w - 1)];
      }
      horizontal[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
  std::vector<double> values(src.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] *
               horizontal[static_cast<std::size_t>(std::clamp(r + k, 0, h - 1)) * w + c];
      }
      values[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
  if (map.normalized()) {
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  }
  ScoreMap out(map.image_id(), h, w, std::move(values));
  out.normalized_ = map.normalized();
  out.degenerate_ = map.degenerate();
  return out;
}

BinaryMask threshold(const ScoreMap& map, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidThreshold,
                "tau " + std::to_string(tau) + " outside [0, 1]");
  }
  if (!map.normalized()) {
    throw Error(ErrorCode::kInvalidArgument,
                "image '" + map.image_id() + "' is not normalized");
  }
  std::span<const double> v = map.values();
  std::vector<unsigned char> bits(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] >= tau ? 1 : 0;
  return BinaryMask(map.height(), map.width(), std::move(bits));
}

ScoreMap center_gaussian(int height, int width, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidSigma, "sigma must be positive");
  }
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidDimensions,
                "shape " + std::to_string(height) + "x" + std::to_string(width));
  }
  // With m = min(H, W): u^2 + v^2 = ((2i - H + 1)^2 + (2j - W + 1)^2) / m^2.
  // The numerator is an exact integer, so pixels at equal distance get equal
  // values for every sigma.
  const double m = std::min(height, width);
  const double scale = 2.0 * sigma * sigma * m * m;
  std::vector<double> values(static_cast<std::size_t>(height) * width);
  for (int i = 0; i < height; ++i) {
    const std::int64_t di = 2 * static_cast<std::int64_t>(i) - (height - 1);
    for (int j = 0; j < width; ++j) {
      const std::int64_t dj = 2 * static_cast<std::int64_t>(j) - (width - 1);
      values[static_cast<std::size_t>(i) * width + j] =
          std::exp(-static_cast<double>(di * di + dj * dj) / scale);
    }
  }
  ScoreMap out("", height, width, std::move(values));
  out.normalized_ = true;
  return out;
}

}  // namespace wsol
