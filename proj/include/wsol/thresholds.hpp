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
#include <span>
#include <vector>

namespace wsol {

// The set of operating thresholds a metric sweep evaluates.
//
// Grid mode uses a fixed ascending list shared by every image. Exact mode
// uses the distinct score values observed across the evaluated maps, which
// makes the sweep invariant to strictly increasing score transforms.
class ThresholdSpec {
 public:
  enum class Mode { kGrid, kExact };

  // {0, 1/n, ..., (n-1)/n}. The default 1000-point grid steps by 0.001.
  static ThresholdSpec uniform(int n = 1000);
  static ThresholdSpec exact();
  // Throws Error(kInvalidArgument) unless strictly ascending and finite.
  static ThresholdSpec custom(std::vector<double> taus);

  Mode mode() const { return mode_; }
  bool is_exact() const { return mode_ == Mode::kExact; }
  // Empty in exact mode.
  std::span<const double> taus() const { return taus_; }

 private:
  Mode mode_ = Mode::kGrid;
  std::vector<double> taus_;
};

// Number of thresholds t in `ascending` with t <= value, i.e. the count of
// sweep steps at which a pixel holding `value` is predicted foreground.
inline std::uint32_t activation_level(std::span<const double> ascending,
                                      double value) {
  std::uint32_t lo = 0;
  auto hi = static_cast<std::uint32_t>(ascending.size());
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (ascending[mid] <= value) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Sorted distinct values of `values`.
std::vector<double> distinct_sorted(std::span<const double> values);

}  // namespace wsol
