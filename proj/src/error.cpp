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
#include "wsol/error.hpp"

namespace wsol {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimensions: return "InvalidDimensions";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kNegativeValues: return "NegativeValues";
    case ErrorCode::kInvalidSigma: return "InvalidSigma";
    case ErrorCode::kInvalidThreshold: return "InvalidThreshold";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kNoForegroundPixels: return "NoForegroundPixels";
    case ErrorCode::kNoPixels: return "NoPixels";
    case ErrorCode::kEmptyCategorySet: return "EmptyCategorySet";
    case ErrorCode::kEmptyCurve: return "EmptyCurve";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedRecord: return "TruncatedRecord";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kUnknownImage: return "UnknownImage";
    case ErrorCode::kMissingScoreMap: return "MissingScoreMap";
    case ErrorCode::kMissingMask: return "MissingMask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidMaskValue: return "InvalidMaskValue";
    case ErrorCode::kInvalidSpace: return "InvalidSpace";
    case ErrorCode::kCyclicDependency: return "CyclicDependency";
    case ErrorCode::kTrainerSpawnFailure: return "TrainerSpawnFailure";
    case ErrorCode::kMissingScorepack: return "MissingScorepack";
    case ErrorCode::kAllTrialsNonConvergent: return "AllTrialsNonConvergent";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateAllTies: return "DegenerateAllTies";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure:
    case ErrorCode::kMissingMask:
    case ErrorCode::kMissingScorepack:
    case ErrorCode::kTrainerSpawnFailure:
      return ErrorCategory::kIo;
    default:
      return ErrorCategory::kValidation;
  }
}

}  // namespace wsol
