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

#include "tinyhar/float_engine.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tinyhar/error.h"

namespace tinyhar::fp {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace

Tensor2D conv1d_forward(const Tensor2D& input, std::span<const float> weights,
                        std::span<const float> bias, std::size_t kernel) {
  const std::size_t channels = input.channels();
  const std::size_t filters = bias.size();
  require(kernel >= 1, "conv1d kernel must be >= 1");
  require(input.steps() >= kernel, "conv1d input shorter than kernel");
  require(weights.size() == filters * kernel * channels,
          "conv1d weights do not match [filters][kernel][channels]");
  const std::size_t out_steps = input.steps() - kernel + 1;
  const std::size_t span = kernel * channels;
  Tensor2D out(out_steps, filters);
  const float* in = input.data().data();
  for (std::size_t t = 0; t < out_steps; ++t) {
    // Rows t..t+kernel-1 are contiguous in the row-major input.
    const float* patch = in + t * channels;
    float* dst = out.row(t).data();
    for (std::size_t f = 0; f < filters; ++f) {
      const float* w = weights.data() + f * span;
      float acc = 0.0f;
      for (std::size_t i = 0; i < span; ++i) acc += patch[i] * w[i];
      dst[f] = acc + bias[f];
    }
  }
  return out;
}

Tensor2D relu(Tensor2D x) {
  for (float& v : x.data()) v = std::max(v, 0.0f);
  return x;
}

std::vector<float> relu(std::vector<float> x) {
  for (float& v : x) v = std::max(v, 0.0f);
  return x;
}

Tensor2D avg_pool1d(const Tensor2D& input, std::size_t pool) {
  require(pool >= 1, "avg_pool1d pool must be >= 1");
  const std::size_t out_steps = input.steps() / pool;
  require(out_steps >= 1, "avg_pool1d input shorter than pool");
  Tensor2D out(out_steps, input.channels());
  const float inv = 1.0f / static_cast<float>(pool);
  for (std::size_t t = 0; t < out_steps; ++t) {
    for (std::size_t c = 0; c < input.channels(); ++c) {
      float sum = 0.0f;
      for (std::size_t k = 0; k < pool; ++k) sum += input.at(t * pool + k, c);
      out.at(t, c) = sum * inv;
    }
  }
  return out;
}

std::vector<float> dense_forward(std::span<const float> input,
                                 std::span<const float> weights,
                                 std::span<const float> bias) {
  const std::size_t out_dim = bias.size();
  const std::size_t in_dim = input.size();
  require(weights.size() == out_dim * in_dim,
          "dense weights do not match [out][in]");
  std::vector<float> out(out_dim);
  for (std::size_t o = 0; o < out_dim; ++o) {
    const float* w = weights.data() + o * in_dim;
    float acc = 0.0f;
    for (std::size_t i = 0; i < in_dim; ++i) acc += input[i] * w[i];
    out[o] = acc + bias[o];
  }
  return out;
}

float sigmoid(float x) {
  if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
  const float e = std::exp(x);
  return e / (1.0f + e);
}

Tensor2D lstm_forward(const Tensor2D& sequence, const ir::LayerParams& params,
                      std::size_t hidden) {
  const std::size_t in_dim = sequence.channels();
  const std::size_t gates = 4 * hidden;
  require(hidden >= 1, "lstm hidden must be >= 1");
  require(params.weights.size() == gates * in_dim &&
              params.recurrent.size() == gates * hidden &&
              params.bias.size() == gates,
          "lstm gate matrices do not match (in=" + std::to_string(in_dim) +
              ", hidden=" + std::to_string(hidden) + ")");
  Tensor2D out(sequence.steps(), hidden);
  std::vector<float> h(hidden, 0.0f), c(hidden, 0.0f), z(gates);
  for (std::size_t t = 0; t < sequence.steps(); ++t) {
    const std::span<const float> x = sequence.row(t);
    for (std::size_t g = 0; g < gates; ++g) {
      const float* wx = params.weights.data() + g * in_dim;
      const float* wh = params.recurrent.data() + g * hidden;
      float acc = params.bias[g];
      for (std::size_t i = 0; i < in_dim; ++i) acc += wx[i] * x[i];
      for (std::size_t j = 0; j < hidden; ++j) acc += wh[j] * h[j];
      z[g] = acc;
    }
    for (std::size_t j = 0; j < hidden; ++j) {
      const float i_gate = sigmoid(z[j]);
      const float f_gate = sigmoid(z[hidden + j]);
      const float g_cand = std::tanh(z[2 * hidden + j]);
      const float o_gate = sigmoid(z[3 * hidden + j]);
      c[j] = f_gate * c[j] + i_gate * g_cand;
      h[j] = o_gate * std::tanh(c[j]);
    }
    std::copy(h.begin(), h.end(), out.row(t).begin());
  }
  return out;
}

std::vector<float> softmax(std::span<const float> logits) {
  std::vector<float> out(logits.size());
  if (logits.empty()) return out;
  const float max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (float& p : out) p = static_cast<float>(p / sum);
  return out;
}

Tensor2D apply_layer(const ir::LayerSpec& spec, const ir::LayerParams& params,
                     const Tensor2D& input) {
  using ir::LayerKind;
  switch (spec.kind) {
    case LayerKind::kConv1D:
      require(input.channels() == spec.in, "conv1d input channel mismatch");
      return conv1d_forward(input, params.weights, params.bias, spec.kernel);
    case LayerKind::kReLU:
      return relu(input);
    case LayerKind::kDropout:
      return input;
    case LayerKind::kAvgPool1D:
      return avg_pool1d(input, spec.pool);
    case LayerKind::kFlatten:
      return Tensor2D(1, input.size(), input.data());
    case LayerKind::kDense:
      require(input.size() == spec.in, "dense input width mismatch");
      return Tensor2D(1, spec.out,
                      dense_forward(input.data(), params.weights, params.bias));
    case LayerKind::kLSTM:
      require(input.channels() == spec.in, "lstm input width mismatch");
      return lstm_forward(input, params, spec.out);
    case LayerKind::kSoftmax:
      return Tensor2D(input.steps(), input.channels(), softmax(input.data()));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown layer kind");
}

namespace {

void check_window(const ir::ModelGraph& graph, const Tensor2D& window) {
  if (window.shape() != graph.input_shape) {
    throw Error(ErrorCode::kShapeMismatch,
                "window is " + std::to_string(window.steps()) + "x" +
                    std::to_string(window.channels()) + ", model expects " +
                    std::to_string(graph.input_shape.steps) + "x" +
                    std::to_string(graph.input_shape.channels));
  }
}

}  // namespace

std::vector<float> forward(const ir::ModelGraph& graph,
                           const Tensor2D& window) {
  check_window(graph, window);
  Tensor2D x = window;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    x = apply_layer(graph.layers[i], graph.params[i], x);
  }
  return std::move(x.data());
}

std::vector<Tensor2D> forward_trace(const ir::ModelGraph& graph,
                                    const Tensor2D& window) {
  check_window(graph, window);
  std::vector<Tensor2D> trace;
  trace.reserve(graph.layers.size());
  const Tensor2D* x = &window;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    trace.push_back(apply_layer(graph.layers[i], graph.params[i], *x));
    x = &trace.back();
  }
  return trace;
}

std::size_t argmax(std::span<const float> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace tinyhar::fp
