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

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsol {

enum class ErrorCode {
  // scoremap
  kInvalidDimensions,
  kNonFiniteValue,
  kNegativeValues,
  kInvalidSigma,
  kInvalidThreshold,
  // metrics
  kEmptyGroundTruth,
  kNoForegroundPixels,
  kNoPixels,
  kEmptyCategorySet,
  kEmptyCurve,
  // dataset io
  kIoFailure,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedRecord,
  kDuplicateId,
  kMalformedLine,
  kOutOfBounds,
  kUnknownImage,
  kMissingScoreMap,
  kMissingMask,
  kDimensionMismatch,
  kInvalidMaskValue,
  // search harness
  kInvalidSpace,
  kCyclicDependency,
  kTrainerSpawnFailure,
  kMissingScorepack,
  kAllTrialsNonConvergent,
  kLengthMismatch,
  kDegenerateAllTies,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Coarse classification used for process exit codes.
enum class ErrorCategory { kIo, kValidation, kInternal };

ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace wsol
