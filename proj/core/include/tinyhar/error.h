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

#ifndef TINYHAR_ERROR_H_
#define TINYHAR_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tinyhar {

enum class ErrorCode {
  kInvalidArgument,
  kShapeUnderflow,
  kDivisibility,
  kShapeMismatch,
  kCorruptHeader,
  kVersionMismatch,
  kTruncatedPayload,
  kUnsupportedLayer,
  kEmptyDataset,
  kNonpositiveMultiplier,
  kHeaderMismatch,
  kNonMonotonic,
  kParse,
  kEmptyStream,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tinyhar

#endif  // TINYHAR_ERROR_H_
