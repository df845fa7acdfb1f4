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

#include "tinyhar/int8_engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "tinyhar/error.h"
#include "tinyhar/float_engine.h"
#include "tinyhar/quantizer.h"

namespace tinyhar::q8 {
namespace {

using ir::LayerKind;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

inline std::int8_t saturate(std::int32_t v, SaturationAudit* audit) {
  if (audit) {
    ++audit->total;
    if (v < -128 || v > 127) ++audit->clamped;
  }
  return static_cast<std::int8_t>(std::clamp(v, -128, 127));
}

// bias[f] - zp_in * sum_i w[f, i], so the inner loop is a plain int8 dot.
std::vector<std::int32_t> effective_bias(const QuantizedLayer& layer,
                                         std::int32_t zp_in) {
  const std::size_t rows = layer.bias.size();
  const std::size_t span = rows ? layer.weights.size() / rows : 0;
  std::vector<std::int32_t> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::int32_t sum = 0;
    const std::int8_t* w = layer.weights.data() + r * span;
    for (std::size_t i = 0; i < span; ++i) sum += w[i];
    out[r] = layer.bias[r] - zp_in * sum;
  }
  return out;
}

inline std::int32_t dot_int8(const std::int8_t* a, const std::int8_t* b,
                             std::size_t n) {
  std::int32_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::int32_t(a[i]) * std::int32_t(b[i]);
  }
  return acc;
}

void conv_kernel(const std::int8_t* in, std::size_t in_steps,
                 std::size_t channels, const QuantizedLayer& layer,
                 const std::int32_t* bias, std::int8_t* out,
                 SaturationAudit* audit) {
  const std::size_t kernel = layer.spec.kernel;
  const std::size_t filters = layer.spec.out;
  const std::size_t span = kernel * channels;
  const std::size_t out_steps = in_steps - kernel + 1;
  const std::int32_t zp_out = layer.output.zero_point;
  for (std::size_t t = 0; t < out_steps; ++t) {
    const std::int8_t* patch = in + t * channels;
    std::int8_t* dst = out + t * filters;
    for (std::size_t f = 0; f < filters; ++f) {
      const std::int32_t acc =
          dot_int8(patch, layer.weights.data() + f * span, span) + bias[f];
      dst[f] = saturate(
          multiply_by_quantized_multiplier(acc, layer.multiplier) + zp_out,
          audit);
    }
  }
}

void dense_kernel(const std::int8_t* in, const QuantizedLayer& layer,
                  const std::int32_t* bias, std::int8_t* out,
                  SaturationAudit* audit) {
  const std::size_t in_dim = layer.spec.in;
  const std::int32_t zp_out = layer.output.zero_point;
  for (std::size_t o = 0; o < layer.spec.out; ++o) {
    const std::int32_t acc =
        dot_int8(in, layer.weights.data() + o * in_dim, in_dim) + bias[o];
    out[o] = saturate(
        multiply_by_quantized_multiplier(acc, layer.multiplier) + zp_out,
        audit);
  }
}

void pool_kernel(const std::int8_t* in, std::size_t in_steps,
                 std::size_t channels, std::size_t pool, std::int8_t* out) {
  const std::size_t out_steps = in_steps / pool;
  const std::int32_t p = static_cast<std::int32_t>(pool);
  for (std::size_t t = 0; t < out_steps; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::int32_t sum = 0;
      for (std::size_t k = 0; k < pool; ++k) {
        sum += in[(t * pool + k) * channels + c];
      }
      const std::int32_t mag = (2 * std::abs(sum) + p) / (2 * p);
      out[t * channels + c] = static_cast<std::int8_t>(sum < 0 ? -mag : mag);
    }
  }
}

ir::LayerParams dequantize_lstm(const QuantizedLayer& layer,
                                const QuantParams& in_qp) {
  ir::LayerParams p;
  p.weights.resize(layer.weights.size());
  p.recurrent.resize(layer.recurrent.size());
  p.bias.resize(layer.bias.size());
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    p.weights[i] = float(layer.weight_scale * layer.weights[i]);
  }
  for (std::size_t i = 0; i < p.recurrent.size(); ++i) {
    p.recurrent[i] = float(layer.recurrent_scale * layer.recurrent[i]);
  }
  const double bias_scale = in_qp.scale * layer.weight_scale;
  for (std::size_t i = 0; i < p.bias.size(); ++i) {
    p.bias[i] = float(bias_scale * layer.bias[i]);
  }
  return p;
}

void lstm_kernel(const QTensor2D& input, const ir::LayerParams& params,
                 const QuantizedLayer& layer, QTensor2D& out) {
  const Tensor2D y = fp::lstm_forward(dequantize(input), params, layer.spec.out);
  out.steps = y.steps();
  out.channels = y.channels();
  out.qp = layer.output;
  out.data.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.data[i] = quant::quantize_value(y.data()[i], layer.output);
  }
}

void softmax_kernel(const QTensor2D& logits, QTensor2D& out) {
  std::vector<float> z(logits.data.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = quant::dequantize_value(logits.data[i], logits.qp);
  }
  const std::vector<float> p = fp::softmax(z);
  out.steps = logits.steps;
  out.channels = logits.channels;
  out.qp = kSoftmaxOutputParams;
  out.data.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.data[i] = quant::quantize_value(p[i], kSoftmaxOutputParams);
  }
}

}  // namespace

QTensor2D quantize(const Tensor2D& x, const QuantParams& qp) {
  QTensor2D q;
  q.steps = x.steps();
  q.channels = x.channels();
  q.qp = qp;
  q.data = quant::quantize_tensor(x.data(), qp);
  return q;
}

Tensor2D dequantize(const QTensor2D& x) {
  return Tensor2D(x.steps, x.channels, quant::dequantize(x.data, x.qp));
}

std::int32_t multiply_by_quantized_multiplier(std::int32_t acc,
                                              const FixedPointMultiplier& m) {
  const std::int64_t product = std::int64_t(acc) * std::int64_t(m.mantissa);
  const int shift = 31 - m.exponent;
  constexpr std::int64_t lo = std::numeric_limits<std::int32_t>::min();
  constexpr std::int64_t hi = std::numeric_limits<std::int32_t>::max();
  if (shift <= 0) {
    // Multipliers >= 2^30; only reachable with pathological scales.
    const double v = std::ldexp(double(product), -shift);
    return static_cast<std::int32_t>(std::clamp(v, double(lo), double(hi)));
  }
  if (shift >= 63) return 0;  // |product| < 2^62, so the result rounds to 0
  const std::int64_t magnitude = product < 0 ? -product : product;
  const std::int64_t rounded =
      (magnitude + (std::int64_t(1) << (shift - 1))) >> shift;
  return static_cast<std::int32_t>(
      std::clamp(product < 0 ? -rounded : rounded, lo, hi));
}

QTensor2D conv1d_int8(const QTensor2D& input, const QuantizedLayer& layer,
                      SaturationAudit* audit) {
  require(layer.spec.kind == LayerKind::kConv1D, "layer is not Conv1D");
  require(input.channels == layer.spec.in, "conv1d_int8 channel mismatch");
  require(input.steps >= layer.spec.kernel,
          "conv1d_int8 input shorter than kernel");
  require(input.data.size() == input.steps * input.channels,
          "conv1d_int8 input data size");
  QTensor2D out;
  out.steps = input.steps - layer.spec.kernel + 1;
  out.channels = layer.spec.out;
  out.qp = layer.output;
  out.data.resize(out.steps * out.channels);
  const std::vector<std::int32_t> bias =
      effective_bias(layer, input.qp.zero_point);
  conv_kernel(input.data.data(), input.steps, input.channels, layer,
              bias.data(), out.data.data(), audit);
  return out;
}

std::vector<std::int8_t> dense_int8(std::span<const std::int8_t> input,
                                    const QuantParams& input_qp,
                                    const QuantizedLayer& layer,
                                    SaturationAudit* audit) {
  require(layer.spec.kind == LayerKind::kDense, "layer is not Dense");
  require(input.size() == layer.spec.in, "dense_int8 input width mismatch");
  std::vector<std::int8_t> out(layer.spec.out);
  const std::vector<std::int32_t> bias =
      effective_bias(layer, input_qp.zero_point);
  dense_kernel(input.data(), layer, bias.data(), out.data(), audit);
  return out;
}

QTensor2D avg_pool1d_int8(const QTensor2D& input, std::size_t pool) {
  require(pool >= 1, "avg_pool1d_int8 pool must be >= 1");
  require(input.steps / pool >= 1, "avg_pool1d_int8 input shorter than pool");
  QTensor2D out;
  out.steps = input.steps / pool;
  out.channels = input.channels;
  out.qp = input.qp;
  out.data.resize(out.steps * out.channels);
  pool_kernel(input.data.data(), input.steps, input.channels, pool,
              out.data.data());
  return out;
}

QTensor2D relu_int8(QTensor2D input) {
  const auto zp = static_cast<std::int8_t>(input.qp.zero_point);
  for (std::int8_t& q : input.data) q = std::max(q, zp);
  return input;
}

QTensor2D lstm_hybrid(const QTensor2D& input, const QuantizedLayer& layer) {
  require(layer.spec.kind == LayerKind::kLSTM, "layer is not LSTM");
  require(input.channels == layer.spec.in, "lstm_hybrid width mismatch");
  QTensor2D out;
  lstm_kernel(input, dequantize_lstm(layer, input.qp), layer, out);
  return out;
}

QTensor2D softmax_int8(const QTensor2D& logits) {
  QTensor2D out;
  softmax_kernel(logits, out);
  return out;
}

Executor::Executor(const QuantizedModel& model) : model_(model) {
  model.skeleton().validate();
  prepared_.resize(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const QuantizedLayer& layer = model.layers[i];
    const QuantParams& in_qp = model.input_params(i);
    switch (layer.spec.kind) {
      case LayerKind::kConv1D:
      case LayerKind::kDense:
        prepared_[i].effective_bias = effective_bias(layer, in_qp.zero_point);
        break;
      case LayerKind::kLSTM:
        prepared_[i].lstm_params = dequantize_lstm(layer, in_qp);
        break;
      default:
        break;
    }
  }
}

QTensor2D Executor::quantize_input(const Tensor2D& window) const {
  if (window.shape() != model_.input_shape) {
    throw Error(ErrorCode::kShapeMismatch,
                "window is " + std::to_string(window.steps()) + "x" +
                    std::to_string(window.channels()) + ", model expects " +
                    std::to_string(model_.input_shape.steps) + "x" +
                    std::to_string(model_.input_shape.channels));
  }
  return quantize(window, model_.input);
}

const QTensor2D& Executor::invoke(const QTensor2D& input) {
  require(input.shape() == model_.input_shape &&
              input.data.size() == input.shape().size(),
          "quantized input does not match model input shape");
  a_ = input;
  QTensor2D* cur = &a_;
  QTensor2D* next = &b_;
  for (std::size_t i = 0; i < model_.layers.size(); ++i) {
    const QuantizedLayer& layer = model_.layers[i];
    switch (layer.spec.kind) {
      case LayerKind::kConv1D:
        next->steps = cur->steps - layer.spec.kernel + 1;
        next->channels = layer.spec.out;
        next->qp = layer.output;
        next->data.resize(next->steps * next->channels);
        conv_kernel(cur->data.data(), cur->steps, cur->channels, layer,
                    prepared_[i].effective_bias.data(), next->data.data(),
                    &audit_);
        std::swap(cur, next);
        break;
      case LayerKind::kDense:
        next->steps = 1;
        next->channels = layer.spec.out;
        next->qp = layer.output;
        next->data.resize(layer.spec.out);
        dense_kernel(cur->data.data(), layer,
                     prepared_[i].effective_bias.data(), next->data.data(),
                     &audit_);
        std::swap(cur, next);
        break;
      case LayerKind::kReLU: {
        const auto zp = static_cast<std::int8_t>(cur->qp.zero_point);
        for (std::int8_t& q : cur->data) q = std::max(q, zp);
        break;
      }
      case LayerKind::kDropout:
        break;
      case LayerKind::kFlatten:
        cur->channels *= cur->steps;
        cur->steps = 1;
        break;
      case LayerKind::kAvgPool1D:
        next->steps = cur->steps / layer.spec.pool;
        next->channels = cur->channels;
        next->qp = cur->qp;
        next->data.resize(next->steps * next->channels);
        pool_kernel(cur->data.data(), cur->steps, cur->channels,
                    layer.spec.pool, next->data.data());
        std::swap(cur, next);
        break;
      case LayerKind::kLSTM:
        lstm_kernel(*cur, prepared_[i].lstm_params, layer, *next);
        std::swap(cur, next);
        break;
      case LayerKind::kSoftmax:
        softmax_kernel(*cur, *next);
        std::swap(cur, next);
        break;
    }
  }
  return *cur;
}

Prediction Executor::run(const Tensor2D& window) {
  const QTensor2D& out = invoke(quantize_input(window));
  Prediction p;
  p.probabilities = quant::dequantize(out.data, out.qp);
  p.label = fp::argmax(p.probabilities);
  return p;
}

Prediction run_quantized(const QuantizedModel& model, const Tensor2D& window) {
  Executor executor(model);
  return executor.run(window);
}

LatencyStats summarize_latency(std::vector<double> samples_us) {
  LatencyStats stats;
  stats.samples = samples_us.size();
  if (samples_us.empty()) return stats;
  std::sort(samples_us.begin(), samples_us.end());
  double sum = 0.0;
  for (double s : samples_us) sum += s;
  stats.mean_us = sum / double(samples_us.size());
  auto rank = [&](double q) {
    const auto n = double(samples_us.size());
    const auto idx = static_cast<std::size_t>(std::ceil(q * n));
    return samples_us[std::clamp<std::size_t>(idx, 1, samples_us.size()) - 1];
  };
  stats.p50_us = samples_us.size() == 1 ? stats.mean_us : rank(0.50);
  stats.p95_us = samples_us.size() == 1 ? stats.mean_us : rank(0.95);
  return stats;
}

namespace {

template <typename Fn>
LatencyStats time_runs(std::size_t repetitions, std::size_t warmup, Fn&& fn) {
  if (repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(
        std::chrono::duration<double, std::micro>(stop - start).count());
  }
  return summarize_latency(std::move(samples));
}

}  // namespace

LatencyStats timed_inference(const QuantizedModel& model,
                             const Tensor2D& window, std::size_t repetitions,
                             std::size_t warmup) {
  Executor executor(model);
  const QTensor2D input = executor.quantize_input(window);
  volatile std::int8_t sink = 0;
  return time_runs(repetitions, warmup, [&] {
    const QTensor2D& out = executor.invoke(input);
    sink = out.data[0];
  });
}

LatencyStats timed_inference(const ir::ModelGraph& graph,
                             const Tensor2D& window, std::size_t repetitions,
                             std::size_t warmup) {
  graph.validate();
  volatile float sink = 0.0f;
  return time_runs(repetitions, warmup, [&] {
    const std::vector<float> p = fp::forward(graph, window);
    sink = p[0];
  });
}

}  // namespace tinyhar::q8
