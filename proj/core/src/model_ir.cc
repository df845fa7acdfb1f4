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

#include "tinyhar/model_ir.h"

#include <cmath>
#include <string>

#include "tinyhar/error.h"
#include "tinyhar/random.h"

namespace tinyhar::ir {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv1D: return "Conv1D";
    case LayerKind::kReLU: return "ReLU";
    case LayerKind::kDropout: return "Dropout";
    case LayerKind::kAvgPool1D: return "AvgPool1D";
    case LayerKind::kDense: return "Dense";
    case LayerKind::kLSTM: return "LSTM";
    case LayerKind::kSoftmax: return "Softmax";
    case LayerKind::kFlatten: return "Flatten";
  }
  return "Unknown";
}

std::string_view to_string(Precision precision) {
  return precision == Precision::kFloat32 ? "float32" : "int8";
}

LayerSpec LayerSpec::conv1d(std::size_t in_channels, std::size_t filters,
                            std::size_t kernel) {
  LayerSpec s;
  s.kind = LayerKind::kConv1D;
  s.in = in_channels;
  s.out = filters;
  s.kernel = kernel;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t in_dim, std::size_t out_dim) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in = in_dim;
  s.out = out_dim;
  return s;
}

LayerSpec LayerSpec::lstm(std::size_t in_dim, std::size_t hidden) {
  LayerSpec s;
  s.kind = LayerKind::kLSTM;
  s.in = in_dim;
  s.out = hidden;
  return s;
}

LayerSpec LayerSpec::avg_pool1d(std::size_t pool) {
  LayerSpec s;
  s.kind = LayerKind::kAvgPool1D;
  s.pool = pool;
  return s;
}

LayerSpec LayerSpec::dropout(float rate) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

LayerSpec LayerSpec::softmax() {
  LayerSpec s;
  s.kind = LayerKind::kSoftmax;
  return s;
}

std::size_t expected_weight_count(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kConv1D: return spec.in * spec.kernel * spec.out;
    case LayerKind::kDense: return spec.in * spec.out;
    case LayerKind::kLSTM: return 4 * spec.out * spec.in;
    default: return 0;
  }
}

std::size_t expected_recurrent_count(const LayerSpec& spec) {
  return spec.kind == LayerKind::kLSTM ? 4 * spec.out * spec.out : 0;
}

std::size_t expected_bias_count(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kConv1D:
    case LayerKind::kDense: return spec.out;
    case LayerKind::kLSTM: return 4 * spec.out;
    default: return 0;
  }
}

namespace {

std::string shape_str(const Shape& s) {
  return "(" + std::to_string(s.steps) + ", " + std::to_string(s.channels) +
         ")";
}

[[noreturn]] void mismatch(const LayerSpec& spec, const Shape& input,
                           const std::string& why) {
  throw Error(ErrorCode::kShapeMismatch,
              std::string(to_string(spec.kind)) + " cannot consume input " +
                  shape_str(input) + ": " + why);
}

}  // namespace

Shape output_shape(const LayerSpec& spec, const Shape& input) {
  switch (spec.kind) {
    case LayerKind::kConv1D: {
      if (spec.kernel < 1 || spec.out < 1) {
        throw Error(ErrorCode::kInvalidArgument,
                    "Conv1D needs kernel >= 1 and filters >= 1");
      }
      if (input.channels != spec.in) mismatch(spec, input, "channel count");
      if (input.steps < spec.kernel) {
        throw Error(ErrorCode::kShapeUnderflow,
                    "Conv1D kernel " + std::to_string(spec.kernel) +
                        " exhausts " + std::to_string(input.steps) +
                        " time steps");
      }
      return {input.steps - spec.kernel + 1, spec.out};
    }
    case LayerKind::kAvgPool1D: {
      if (spec.pool < 1) {
        throw Error(ErrorCode::kInvalidArgument, "AvgPool1D needs pool >= 1");
      }
      if (input.steps / spec.pool < 1) {
        throw Error(ErrorCode::kShapeUnderflow,
                    "AvgPool1D pool " + std::to_string(spec.pool) +
                        " exhausts " + std::to_string(input.steps) +
                        " time steps");
      }
      return {input.steps / spec.pool, input.channels};
    }
    case LayerKind::kDense:
      if (spec.in < 1 || spec.out < 1) {
        throw Error(ErrorCode::kInvalidArgument, "Dense needs nonzero dims");
      }
      if (input.steps != 1 || input.channels != spec.in) {
        mismatch(spec, input, "expected (1, " + std::to_string(spec.in) + ")");
      }
      return {1, spec.out};
    case LayerKind::kLSTM:
      if (spec.out < 1) {
        throw Error(ErrorCode::kInvalidArgument, "LSTM needs hidden >= 1");
      }
      if (input.channels != spec.in) mismatch(spec, input, "feature count");
      return {input.steps, spec.out};
    case LayerKind::kFlatten:
      return {1, input.size()};
    case LayerKind::kDropout:
      if (!(spec.rate >= 0.0f && spec.rate < 1.0f)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "Dropout rate must lie in [0, 1)");
      }
      return input;
    case LayerKind::kReLU:
    case LayerKind::kSoftmax:
      return input;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown layer kind");
}

std::vector<Shape> ModelGraph::layer_shapes() const {
  std::vector<Shape> shapes;
  shapes.reserve(layers.size());
  Shape current = input_shape;
  for (const LayerSpec& spec : layers) {
    current = output_shape(spec, current);
    shapes.push_back(current);
  }
  return shapes;
}

void ModelGraph::validate() const {
  if (input_shape.steps < 1 || input_shape.channels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty input shape");
  }
  if (layers.empty() || layers.back().kind != LayerKind::kSoftmax) {
    throw Error(ErrorCode::kInvalidArgument, "last layer must be Softmax");
  }
  if (params.size() != layers.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter list does not match layer list");
  }
  const std::vector<Shape> shapes = layer_shapes();
  const Shape& logits = shapes.back();
  if (logits.steps != 1 || logits.channels != num_classes) {
    throw Error(ErrorCode::kShapeMismatch,
                "softmax input width " + std::to_string(logits.channels) +
                    " differs from num_classes " +
                    std::to_string(num_classes));
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& spec = layers[i];
    const LayerParams& p = params[i];
    if (p.weights.size() != expected_weight_count(spec) ||
        p.recurrent.size() != expected_recurrent_count(spec) ||
        p.bias.size() != expected_bias_count(spec)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "parameter tensors of layer " + std::to_string(i) + " (" +
                      std::string(to_string(spec.kind)) +
                      ") do not match its spec");
    }
  }
}

namespace {

// He-style fan-in scaled uniform initialisation; biases start at zero except
// the LSTM forget gate, which starts at one.
void init_params(const LayerSpec& spec, LayerParams& p, Rng& rng) {
  p.weights.resize(expected_weight_count(spec));
  p.recurrent.resize(expected_recurrent_count(spec));
  p.bias.assign(expected_bias_count(spec), 0.0f);
  double fan_in = 1.0;
  double gain = 6.0;
  switch (spec.kind) {
    case LayerKind::kConv1D: fan_in = double(spec.in * spec.kernel); break;
    case LayerKind::kDense: fan_in = double(spec.in); break;
    case LayerKind::kLSTM:
      fan_in = double(spec.in + spec.out);
      gain = 3.0;
      break;
    default: return;
  }
  const double limit = std::sqrt(gain / fan_in);
  for (float& w : p.weights) w = float(rng.uniform(-limit, limit));
  for (float& w : p.recurrent) w = float(rng.uniform(-limit, limit));
  if (spec.kind == LayerKind::kLSTM) {
    for (std::size_t h = 0; h < spec.out; ++h) p.bias[spec.out + h] = 1.0f;
  }
}

ModelGraph assemble(Shape input, std::size_t num_classes,
                    std::vector<LayerSpec> layers, std::uint64_t seed) {
  ModelGraph g;
  g.input_shape = input;
  g.num_classes = num_classes;
  g.layers = std::move(layers);
  g.params.resize(g.layers.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    init_params(g.layers[i], g.params[i], rng);
  }
  g.validate();
  return g;
}

}  // namespace

ModelGraph build_mc_cnn(const McCnnConfig& c) {
  if (c.first_filters == 0 || c.first_filters % 4 != 0) {
    throw Error(ErrorCode::kDivisibility,
                "first_filters " + std::to_string(c.first_filters) +
                    " is not a positive multiple of 4");
  }
  if (c.channels == 0 || c.num_classes == 0 || c.dense_width == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "channels, dense_width and num_classes must be positive");
  }
  const std::size_t second = c.first_filters / 4;
  Shape s{c.window_len, c.channels};
  std::vector<LayerSpec> layers;
  auto push = [&](LayerSpec spec) {
    s = output_shape(spec, s);
    layers.push_back(spec);
  };
  push(LayerSpec::conv1d(c.channels, c.first_filters, c.kernel));
  push(LayerSpec::relu());
  push(LayerSpec::conv1d(c.first_filters, second, c.kernel));
  push(LayerSpec::relu());
  push(LayerSpec::dropout(c.dropout_rate));
  push(LayerSpec::avg_pool1d(c.pool));
  push(LayerSpec::flatten());
  push(LayerSpec::dense(s.channels, c.dense_width));
  push(LayerSpec::relu());
  push(LayerSpec::dense(c.dense_width, c.num_classes));
  push(LayerSpec::softmax());
  return assemble({c.window_len, c.channels}, c.num_classes, std::move(layers),
                  c.seed);
}

ModelGraph build_deep_conv_lstm(const DeepConvLstmConfig& c) {
  if (c.channels == 0 || c.filters == 0 || c.hidden == 0 ||
      c.num_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "channels, filters, hidden and num_classes must be positive");
  }
  Shape s{c.window_len, c.channels};
  std::vector<LayerSpec> layers;
  auto push = [&](LayerSpec spec) {
    s = output_shape(spec, s);
    layers.push_back(spec);
  };
  std::size_t in = c.channels;
  for (int i = 0; i < 4; ++i) {
    push(LayerSpec::conv1d(in, c.filters, c.kernel));
    push(LayerSpec::relu());
    in = c.filters;
  }
  push(LayerSpec::lstm(c.filters, c.hidden));
  push(LayerSpec::lstm(c.hidden, c.hidden));
  push(LayerSpec::flatten());
  push(LayerSpec::dense(s.channels, c.num_classes));
  push(LayerSpec::softmax());
  return assemble({c.window_len, c.channels}, c.num_classes, std::move(layers),
                  c.seed);
}

ParamCount param_count(const ModelGraph& graph) {
  ParamCount count;
  count.per_layer.reserve(graph.layers.size());
  for (const LayerSpec& spec : graph.layers) {
    std::size_t n = 0;
    switch (spec.kind) {
      case LayerKind::kConv1D:
        n = spec.in * spec.kernel * spec.out + spec.out;
        break;
      case LayerKind::kDense:
        n = spec.in * spec.out + spec.out;
        break;
      case LayerKind::kLSTM:
        n = 4 * (spec.in * spec.out + spec.out * spec.out + spec.out);
        break;
      default:
        break;
    }
    count.per_layer.push_back(n);
    count.total += n;
    count.bias_total += expected_bias_count(spec);
  }
  return count;
}

}  // namespace tinyhar::ir
