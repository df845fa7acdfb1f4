/* Copyright 2026 The tinyhar Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tinyhar/error.h"

namespace tinyhar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShapeUnderflow: return "shape underflow";
    case ErrorCode::kDivisibility: return "divisibility";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kCorruptHeader: return "corrupt header";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncatedPayload: return "truncated payload";
    case ErrorCode::kUnsupportedLayer: return "unsupported layer";
    case ErrorCode::kEmptyDataset: return "empty dataset";
    case ErrorCode::kNonpositiveMultiplier: return "nonpositive multiplier";
    case ErrorCode::kHeaderMismatch: return "header mismatch";
    case ErrorCode::kNonMonotonic: return "non-monotonic timestamp";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kEmptyStream: return "empty stream";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace tinyhar
