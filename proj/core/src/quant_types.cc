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

#include "tinyhar/quant_types.h"

namespace tinyhar {

ir::ModelGraph QuantizedModel::skeleton() const {
  ir::ModelGraph g;
  g.input_shape = input_shape;
  g.num_classes = num_classes;
  for (const QuantizedLayer& layer : layers) {
    g.layers.push_back(layer.spec);
    ir::LayerParams p;
    p.weights.resize(ir::expected_weight_count(layer.spec));
    p.recurrent.resize(ir::expected_recurrent_count(layer.spec));
    p.bias.resize(ir::expected_bias_count(layer.spec));
    g.params.push_back(std::move(p));
  }
  return g;
}

}  // namespace tinyhar
