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

#ifndef TINYHAR_FLOAT_ENGINE_H_
#define TINYHAR_FLOAT_ENGINE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/tensor.h"

namespace tinyhar::fp {

// Valid 1D convolution. `weights` is [filters][kernel][in_channels]:
//   out[t, f] = sum_{k, c} in[t + k, c] * w[f, k, c] + bias[f]
Tensor2D conv1d_forward(const Tensor2D& input, std::span<const float> weights,
                        std::span<const float> bias, std::size_t kernel);

Tensor2D relu(Tensor2D x);
std::vector<float> relu(std::vector<float> x);

// floor(steps / pool) output steps; trailing steps that do not fill a window
// are dropped.
Tensor2D avg_pool1d(const Tensor2D& input, std::size_t pool);

// weights is [out_dim][in_dim].
std::vector<float> dense_forward(std::span<const float> input,
                                 std::span<const float> weights,
                                 std::span<const float> bias);

float sigmoid(float x);

// Standard peephole-free LSTM over the time axis with h_0 = c_0 = 0. Returns
// the hidden state at every step.
Tensor2D lstm_forward(const Tensor2D& sequence, const ir::LayerParams& params,
                      std::size_t hidden);

std::vector<float> softmax(std::span<const float> logits);

// Applies one layer at inference time (dropout is the identity).
Tensor2D apply_layer(const ir::LayerSpec& spec, const ir::LayerParams& params,
                     const Tensor2D& input);

// Probability vector of length graph.num_classes.
std::vector<float> forward(const ir::ModelGraph& graph, const Tensor2D& window);

// Output of every layer, in order; the last entry equals forward().
std::vector<Tensor2D> forward_trace(const ir::ModelGraph& graph,
                                    const Tensor2D& window);

std::size_t argmax(std::span<const float> values);

}  // namespace tinyhar::fp

#endif  // TINYHAR_FLOAT_ENGINE_H_
