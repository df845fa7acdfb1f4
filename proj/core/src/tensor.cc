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

#include "tinyhar/tensor.h"

#include <cmath>
#include <string>

#include "tinyhar/error.h"

namespace tinyhar {

Tensor2D::Tensor2D(std::size_t steps, std::size_t channels)
    : steps_(steps), channels_(channels), data_(steps * channels, 0.0f) {}

Tensor2D::Tensor2D(std::size_t steps, std::size_t channels,
                   std::vector<float> data)
    : steps_(steps), channels_(channels), data_(std::move(data)) {
  if (data_.size() != steps * channels) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor data has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(steps) + "x" +
                    std::to_string(channels));
  }
}

bool Tensor2D::all_finite() const {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace tinyhar
