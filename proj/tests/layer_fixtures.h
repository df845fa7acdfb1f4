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

// Builds integer layers from float parameters following the documented
// quantization scheme, without going through quantize_model.

#ifndef TINYHAR_TESTS_LAYER_FIXTURES_H_
#define TINYHAR_TESTS_LAYER_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/quant_types.h"
#include "tinyhar/quantizer.h"

namespace tinyhar::testing {

inline double symmetric_scale(const std::vector<float>& v) {
  float m = 0.0f;
  for (float x : v) m = std::max(m, std::fabs(x));
  return m > 0 ? m / 127.0 : 1.0 / 127.0;
}

inline QuantParams range_params(const std::vector<float>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return quant::affine_params(std::min(0.0f, *lo), std::max(0.0f, *hi));
}

// Conv1D or Dense.
inline QuantizedLayer make_layer(const ir::LayerSpec& spec,
                                 const std::vector<float>& w,
                                 const std::vector<float>& b,
                                 const QuantParams& in, const QuantParams& out) {
  QuantizedLayer l;
  l.spec = spec;
  l.output = out;
  l.weight_scale = symmetric_scale(w);
  for (float v : w) l.weights.push_back(std::int8_t(std::lround(v / l.weight_scale)));
  for (float v : b) {
    l.bias.push_back(std::int32_t(std::lround(v / (in.scale * l.weight_scale))));
  }
  l.multiplier = quant::decompose_multiplier(in.scale * l.weight_scale / out.scale);
  return l;
}

inline QuantizedLayer lstm_layer(std::size_t in, std::size_t hidden,
                                 const ir::LayerParams& p,
                                 const QuantParams& in_qp,
                                 const QuantParams& out) {
  QuantizedLayer l;
  l.spec = ir::LayerSpec::lstm(in, hidden);
  l.output = out;
  l.weight_scale = symmetric_scale(p.weights);
  l.recurrent_scale = symmetric_scale(p.recurrent);
  for (float v : p.weights) l.weights.push_back(std::int8_t(std::lround(v / l.weight_scale)));
  for (float v : p.recurrent) {
    l.recurrent.push_back(std::int8_t(std::lround(v / l.recurrent_scale)));
  }
  for (float v : p.bias) {
    l.bias.push_back(std::int32_t(std::lround(v / (in_qp.scale * l.weight_scale))));
  }
  return l;
}

// Float parameters exactly as stored by an integer LSTM layer.
inline ir::LayerParams stored_lstm_params(const QuantizedLayer& l,
                                          const QuantParams& in_qp) {
  ir::LayerParams p;
  for (std::int8_t q : l.weights) p.weights.push_back(float(q * l.weight_scale));
  for (std::int8_t q : l.recurrent) p.recurrent.push_back(float(q * l.recurrent_scale));
  for (std::int32_t b : l.bias) p.bias.push_back(float(b * in_qp.scale * l.weight_scale));
  return p;
}

}  // namespace tinyhar::testing

#endif  // TINYHAR_TESTS_LAYER_FIXTURES_H_
