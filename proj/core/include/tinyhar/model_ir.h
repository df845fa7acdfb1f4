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

#ifndef TINYHAR_MODEL_IR_H_
#define TINYHAR_MODEL_IR_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tinyhar/tensor.h"

namespace tinyhar::ir {

enum class LayerKind : std::uint8_t {
  kConv1D = 0,
  kReLU = 1,
  kDropout = 2,
  kAvgPool1D = 3,
  kDense = 4,
  kLSTM = 5,
  kSoftmax = 6,
  kFlatten = 7,
};

std::string_view to_string(LayerKind kind);

enum class Precision : std::uint8_t {
  kFloat32 = 0,
  kInt8Full = 1,
};

std::string_view to_string(Precision precision);

// Attributes are shared between kinds:
//   Conv1D   in = in_channels, out = out_filters, kernel
//   Dense    in = in_dim, out = out_dim
//   LSTM     in = in_dim, out = hidden
//   AvgPool1D pool
//   Dropout  rate
struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t kernel = 0;
  std::size_t pool = 0;
  float rate = 0.0f;

  static LayerSpec conv1d(std::size_t in_channels, std::size_t filters,
                          std::size_t kernel);
  static LayerSpec dense(std::size_t in_dim, std::size_t out_dim);
  static LayerSpec lstm(std::size_t in_dim, std::size_t hidden);
  static LayerSpec avg_pool1d(std::size_t pool);
  static LayerSpec dropout(float rate);
  static LayerSpec relu();
  static LayerSpec flatten();
  static LayerSpec softmax();

  bool has_params() const {
    return kind == LayerKind::kConv1D || kind == LayerKind::kDense ||
           kind == LayerKind::kLSTM;
  }

  bool operator==(const LayerSpec&) const = default;
};

// Float parameters of one layer.
//   Conv1D  weights [filters][kernel][in_channels], bias [filters]
//   Dense   weights [out_dim][in_dim], bias [out_dim]
//   LSTM    weights [4*hidden][in_dim], recurrent [4*hidden][hidden],
//           bias [4*hidden]; gate blocks ordered input, forget, cell, output
struct LayerParams {
  std::vector<float> weights;
  std::vector<float> recurrent;
  std::vector<float> bias;

  bool operator==(const LayerParams&) const = default;
};

std::size_t expected_weight_count(const LayerSpec& spec);
std::size_t expected_recurrent_count(const LayerSpec& spec);
std::size_t expected_bias_count(const LayerSpec& spec);

// Output shape of `spec` applied to `input`. Throws kShapeMismatch when the
// layer cannot consume `input` and kShapeUnderflow when a valid convolution
// or pooling leaves no time steps.
Shape output_shape(const LayerSpec& spec, const Shape& input);

struct ModelGraph {
  Shape input_shape;
  std::size_t num_classes = 0;
  std::vector<LayerSpec> layers;
  std::vector<LayerParams> params;

  // Per-layer output shapes; validates shape compatibility as a side effect.
  std::vector<Shape> layer_shapes() const;

  // Checks every structural invariant and throws on the first violation.
  void validate() const;

  bool operator==(const ModelGraph&) const = default;
};

struct McCnnConfig {
  std::size_t channels = 23;
  std::size_t window_len = 24;
  std::size_t first_filters = 128;
  std::size_t kernel = 3;
  std::size_t pool = 2;
  std::size_t dense_width = 128;
  std::size_t num_classes = kNumClasses;
  float dropout_rate = 0.2f;
  std::uint64_t seed = 7;
};

// Conv1D(F) -> ReLU -> Conv1D(F/4) -> ReLU -> Dropout -> AvgPool1D ->
// Flatten -> Dense(dense_width) -> ReLU -> Dense(classes) -> Softmax.
ModelGraph build_mc_cnn(const McCnnConfig& config);

struct DeepConvLstmConfig {
  std::size_t channels = 23;
  std::size_t window_len = 24;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::size_t hidden = 128;
  std::size_t num_classes = kNumClasses;
  std::uint64_t seed = 7;
};

// Four Conv1D(filters)+ReLU blocks, two stacked LSTM layers, then
// Flatten -> Dense(classes) -> Softmax.
ModelGraph build_deep_conv_lstm(const DeepConvLstmConfig& config);

struct ParamCount {
  std::vector<std::size_t> per_layer;
  std::size_t total = 0;
  std::size_t bias_total = 0;
};

ParamCount param_count(const ModelGraph& graph);

// Exact size in bytes of the serialized model file at `precision`. For
// kInt8Full this is the size of the file produced by quantizing `graph`.
std::size_t model_size_bytes(const ModelGraph& graph, Precision precision);

}  // namespace tinyhar::ir

#endif  // TINYHAR_MODEL_IR_H_
