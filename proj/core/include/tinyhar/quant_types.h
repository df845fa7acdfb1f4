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

#ifndef TINYHAR_QUANT_TYPES_H_
#define TINYHAR_QUANT_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tinyhar/model_ir.h"

namespace tinyhar {

// Affine mapping real = scale * (q - zero_point).
struct QuantParams {
  double scale = 1.0;
  std::int32_t zero_point = 0;

  bool operator==(const QuantParams&) const = default;
};

// real multiplier = mantissa * 2^(exponent - 31), mantissa in [2^30, 2^31).
struct FixedPointMultiplier {
  std::int32_t mantissa = 0;
  std::int32_t exponent = 0;

  bool operator==(const FixedPointMultiplier&) const = default;
};

// One layer of an integer model. Its input parameters are the output
// parameters of the previous layer (or the model input for layer 0).
struct QuantizedLayer {
  ir::LayerSpec spec;
  QuantParams output;
  // Symmetric per-tensor weight scales (zero point 0).
  double weight_scale = 0.0;
  double recurrent_scale = 0.0;
  // input_scale * weight_scale / output_scale for Conv1D and Dense.
  FixedPointMultiplier multiplier;
  std::vector<std::int8_t> weights;
  std::vector<std::int8_t> recurrent;
  // Scale input_scale * weight_scale, zero point 0.
  std::vector<std::int32_t> bias;

  bool operator==(const QuantizedLayer&) const = default;
};

struct QuantizedModel {
  Shape input_shape;
  std::size_t num_classes = 0;
  QuantParams input;
  std::vector<QuantizedLayer> layers;

  const QuantParams& input_params(std::size_t layer) const {
    return layer == 0 ? input : layers[layer - 1].output;
  }

  // Float graph skeleton (specs only, parameters empty-shaped to spec with
  // zeros). Used for shape and MAC accounting.
  ir::ModelGraph skeleton() const;

  bool operator==(const QuantizedModel&) const = default;
};

// Fixed output parameters of the integer softmax: probabilities in [0, 1).
inline constexpr QuantParams kSoftmaxOutputParams{1.0 / 256.0, -128};

}  // namespace tinyhar

#endif  // TINYHAR_QUANT_TYPES_H_
