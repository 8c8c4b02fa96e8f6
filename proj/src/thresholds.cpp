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
#include "wsol/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsol/error.hpp"

namespace wsol {

ThresholdSpec ThresholdSpec::uniform(int n) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "threshold grid needs at least one point, got " +
                    std::to_string(n));
  }
  ThresholdSpec spec;
  spec.mode_ = Mode::kGrid;
  spec.taus_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) spec.taus_[i] = static_cast<double>(i) / n;
  return spec;
}

ThresholdSpec ThresholdSpec::exact() {
  ThresholdSpec spec;
  spec.mode_ = Mode::kExact;
  return spec;
}

ThresholdSpec ThresholdSpec::custom(std::vector<double> taus) {
  if (taus.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty threshold list");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus[i]) || (i > 0 && !(taus[i] > taus[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "thresholds must be finite and strictly ascending");
    }
  }
  ThresholdSpec spec;
  spec.mode_ = Mode::kGrid;
  spec.taus_ = std::move(taus);
  return spec;
}

std::vector<double> distinct_sorted(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace wsol
