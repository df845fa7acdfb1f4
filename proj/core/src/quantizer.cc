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

#include "tinyhar/quantizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tinyhar/error.h"
#include "tinyhar/float_engine.h"

namespace tinyhar::quant {
namespace {

using ir::LayerKind;

void include_all(Range& r, std::span<const float> values) {
  for (float v : values) r.include(v);
}

template <typename WindowAt>
CalibrationRanges calibrate_impl(const ir::ModelGraph& graph, std::size_t n,
                                 WindowAt window_at) {
  if (n == 0) {
    throw Error(ErrorCode::kEmptyDataset,
                "representative dataset is empty; calibration needs at least "
                "one window");
  }
  graph.validate();
  CalibrationRanges ranges;
  ranges.outputs.assign(graph.layers.size(), Range{});
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor2D& window = window_at(i);
    include_all(ranges.input, window.data());
    const std::vector<Tensor2D> trace = fp::forward_trace(graph, window);
    for (std::size_t l = 0; l < trace.size(); ++l) {
      include_all(ranges.outputs[l], trace[l].data());
    }
  }
  ranges.windows = n;
  return ranges;
}

Range weight_range(std::span<const float> w) {
  Range r;
  include_all(r, w);
  return r;
}

std::vector<std::int32_t> quantize_bias(std::span<const float> bias,
                                        double scale) {
  std::vector<std::int32_t> out(bias.size());
  constexpr double lo = std::numeric_limits<std::int32_t>::min();
  constexpr double hi = std::numeric_limits<std::int32_t>::max();
  for (std::size_t i = 0; i < bias.size(); ++i) {
    const double q = std::round(double(bias[i]) / scale);
    out[i] = static_cast<std::int32_t>(std::clamp(q, lo, hi));
  }
  return out;
}

}  // namespace

void CalibrationRanges::merge(const CalibrationRanges& other) {
  if (outputs.size() != other.outputs.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "cannot merge calibration ranges of different graphs");
  }
  input.include(other.input.min);
  input.include(other.input.max);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    outputs[i].include(other.outputs[i].min);
    outputs[i].include(other.outputs[i].max);
  }
  windows += other.windows;
}

CalibrationRanges calibrate(const ir::ModelGraph& graph,
                            std::span<const Tensor2D> representative) {
  return calibrate_impl(graph, representative.size(),
                        [&](std::size_t i) -> const Tensor2D& {
                          return representative[i];
                        });
}

CalibrationRanges calibrate(const ir::ModelGraph& graph,
                            std::span<const WindowedSample> representative) {
  return calibrate_impl(graph, representative.size(),
                        [&](std::size_t i) -> const Tensor2D& {
                          return representative[i].window;
                        });
}

QuantParams affine_params(double min, double max) {
  if (min > max) {
    throw Error(ErrorCode::kInvalidArgument, "range min exceeds max");
  }
  min = std::min(min, 0.0);
  max = std::max(max, 0.0);
  QuantParams qp;
  qp.scale = max > min ? (max - min) / 255.0 : kDegenerateScale;
  const double zp = std::round(-128.0 - min / qp.scale);
  qp.zero_point = static_cast<std::int32_t>(std::clamp(zp, -128.0, 127.0));
  return qp;
}

QuantParams symmetric_params(double min, double max) {
  if (min > max) {
    throw Error(ErrorCode::kInvalidArgument, "range min exceeds max");
  }
  const double bound = std::max(std::abs(min), std::abs(max));
  QuantParams qp;
  qp.scale = bound > 0.0 ? bound / 127.0 : kDegenerateScale;
  qp.zero_point = 0;
  return qp;
}

std::int8_t quantize_value(double x, const QuantParams& qp) {
  const double q = std::round(x / qp.scale) + qp.zero_point;
  return static_cast<std::int8_t>(std::clamp(q, -128.0, 127.0));
}

std::vector<std::int8_t> quantize_tensor(std::span<const float> x,
                                         const QuantParams& qp) {
  std::vector<std::int8_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = quantize_value(x[i], qp);
  return out;
}

float dequantize_value(std::int8_t q, const QuantParams& qp) {
  return static_cast<float>(qp.scale * (std::int32_t(q) - qp.zero_point));
}

std::vector<float> dequantize(std::span<const std::int8_t> q,
                              const QuantParams& qp) {
  std::vector<float> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = dequantize_value(q[i], qp);
  }
  return out;
}

FixedPointMultiplier decompose_multiplier(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorCode::kNonpositiveMultiplier,
                "requantization multiplier must be positive and finite, got " +
                    std::to_string(m));
  }
  int exponent = 0;
  const double fraction = std::frexp(m, &exponent);  // in [0.5, 1)
  auto mantissa = std::llround(fraction * 2147483648.0);
  if (mantissa == (1LL << 31)) {
    mantissa /= 2;
    ++exponent;
  }
  return {static_cast<std::int32_t>(mantissa), exponent};
}

double reconstruct(const FixedPointMultiplier& m) {
  return std::ldexp(double(m.mantissa), m.exponent - 31);
}

QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              const CalibrationRanges& ranges) {
  graph.validate();
  if (ranges.outputs.size() != graph.layers.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "calibration ranges do not match the graph");
  }
  QuantizedModel model;
  model.input_shape = graph.input_shape;
  model.num_classes = graph.num_classes;
  model.input = affine_params(ranges.input.min, ranges.input.max);
  model.layers.reserve(graph.layers.size());

  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const ir::LayerSpec& spec = graph.layers[i];
    const ir::LayerParams& p = graph.params[i];
    const QuantParams in_qp =
        i == 0 ? model.input : model.layers[i - 1].output;
    QuantizedLayer layer;
    layer.spec = spec;
    switch (spec.kind) {
      case LayerKind::kConv1D:
      case LayerKind::kDense: {
        // A following ReLU is fused by giving this layer the ReLU's output
        // range; saturation at the zero point then performs the clamp.
        const bool fused_relu = i + 1 < graph.layers.size() &&
                                graph.layers[i + 1].kind == LayerKind::kReLU;
        const Range& out = ranges.outputs[fused_relu ? i + 1 : i];
        layer.output = affine_params(out.min, out.max);
        const Range wr = weight_range(p.weights);
        const QuantParams wq = symmetric_params(wr.min, wr.max);
        layer.weight_scale = wq.scale;
        layer.weights = quantize_tensor(p.weights, wq);
        layer.bias = quantize_bias(p.bias, in_qp.scale * wq.scale);
        layer.multiplier = decompose_multiplier(in_qp.scale * wq.scale /
                                                layer.output.scale);
        break;
      }
      case LayerKind::kLSTM: {
        const Range& out = ranges.outputs[i];
        layer.output = affine_params(out.min, out.max);
        const Range wr = weight_range(p.weights);
        const QuantParams wq = symmetric_params(wr.min, wr.max);
        const Range rr = weight_range(p.recurrent);
        const QuantParams rq = symmetric_params(rr.min, rr.max);
        layer.weight_scale = wq.scale;
        layer.recurrent_scale = rq.scale;
        layer.weights = quantize_tensor(p.weights, wq);
        layer.recurrent = quantize_tensor(p.recurrent, rq);
        layer.bias = quantize_bias(p.bias, in_qp.scale * wq.scale);
        break;
      }
      case LayerKind::kSoftmax:
        layer.output = kSoftmaxOutputParams;
        break;
      case LayerKind::kReLU:
      case LayerKind::kDropout:
      case LayerKind::kAvgPool1D:
      case LayerKind::kFlatten:
        layer.output = in_qp;
        break;
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              std::span<const Tensor2D> representative) {
  return quantize_model(graph, calibrate(graph, representative));
}

QuantizedModel quantize_model(const ir::ModelGraph& graph,
                              std::span<const WindowedSample> representative) {
  return quantize_model(graph, calibrate(graph, representative));
}

}  // namespace tinyhar::quant
