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

#ifndef TINYHAR_QUANTIZER_H_
#define TINYHAR_QUANTIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/quant_types.h"
#include "tinyhar/tensor.h"

namespace tinyhar::quant {

// Scale substituted for zero-width ranges.
inline constexpr double kDegenerateScale = 1e-8;

struct Range {
  float min = 0.0f;
  float max = 0.0f;

  void include(float v) {
    min = v < min ? v : min;
    max = v > max ? v : max;
  }
  bool contains(const Range& other) const {
    return min <= other.min && other.max <= max;
  }
  bool operator==(const Range&) const = default;
};

// Observed (min, max) of the model input and of every layer output, each
// widened to include 0.
struct CalibrationRanges {
  Range input;
  std::vector<Range> outputs;
  std::size_t windows = 0;

  // Elementwise union.
  void merge(const CalibrationRanges& other);
  bool operator==(const CalibrationRanges&) const = default;
};

// Runs the float executor over every window and records exact min/max.
// Throws kEmptyDataset when `representative` is empty.
CalibrationRanges calibrate(const ir::ModelGraph& graph,
                            std::span<const Tensor2D> representative);
CalibrationRanges calibrate(const ir::ModelGraph& graph,
                            std::span<const WindowedSample> representative);

// Asymmetric activation parameters over [-128, 127].
QuantParams affine_params(double min, double max);
// Symmetric weight parameters, zero point 0, over [-127, 127].
QuantParams symmetric_params(double min, double max);

std::int8_t quantize_value(double x, const QuantParams& qp);
std::vector<std::int8_t> quantize_tensor(std::span<const float> x,
                                         const QuantParams& qp);
float dequantize_value(std::int8_t q, const QuantParams& qp);
std::vector<float> dequantize(std::span<const std::int8_t> q,
                              const QuantParams& qp);

// Throws kNonpositiveMultiplier for m <= 0 (or non-finite m).
FixedPointMultiplier decompose_multiplier(double m);
double reconstruct(const FixedPointMultiplier& m);

QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              const CalibrationRanges& ranges);
QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              std::span<const Tensor2D> representative);
QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              std::span<const WindowedSample> representative);

}  // namespace tinyhar::quant

#endif  // TINYHAR_QUANTIZER_H_
