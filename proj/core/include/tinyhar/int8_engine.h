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

#ifndef TINYHAR_INT8_ENGINE_H_
#define TINYHAR_INT8_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/quant_types.h"
#include "tinyhar/tensor.h"

namespace tinyhar::q8 {

struct QTensor2D {
  std::size_t steps = 0;
  std::size_t channels = 0;
  std::vector<std::int8_t> data;
  QuantParams qp;

  Shape shape() const { return {steps, channels}; }
  bool operator==(const QTensor2D&) const = default;
};

QTensor2D quantize(const Tensor2D& x, const QuantParams& qp);
Tensor2D dequantize(const QTensor2D& x);

// Counts values that had to be clamped into [-128, 127] after
// requantization.
struct SaturationAudit {
  std::uint64_t clamped = 0;
  std::uint64_t total = 0;
};

// round(acc * mantissa / 2^(31 - exponent)), ties away from zero, computed on
// the 64-bit product and saturated to int32.
std::int32_t multiply_by_quantized_multiplier(std::int32_t acc,
                                              const FixedPointMultiplier& m);

// acc[t, f] = sum (q_in - zp_in) * q_w + bias[f], requantized, offset by the
// output zero point and clamped.
QTensor2D conv1d_int8(const QTensor2D& input, const QuantizedLayer& layer,
                      SaturationAudit* audit = nullptr);

std::vector<std::int8_t> dense_int8(std::span<const std::int8_t> input,
                                    const QuantParams& input_qp,
                                    const QuantizedLayer& layer,
                                    SaturationAudit* audit = nullptr);

// Integer window sums with rounded (half away from zero) division; the
// quantization parameters pass through unchanged.
QTensor2D avg_pool1d_int8(const QTensor2D& input, std::size_t pool);

QTensor2D relu_int8(QTensor2D input);

// Hybrid execution: int8 storage, float cell arithmetic, output requantized
// to the layer's calibrated range.
QTensor2D lstm_hybrid(const QTensor2D& input, const QuantizedLayer& layer);

// Output parameters are always kSoftmaxOutputParams.
QTensor2D softmax_int8(const QTensor2D& logits);

struct Prediction {
  std::vector<float> probabilities;
  std::size_t label = 0;
};

// Runs a QuantizedModel. Holds per-inference scratch, so one instance serves
// one inference at a time; the model itself is only read.
class Executor {
 public:
  explicit Executor(const QuantizedModel& model);

  QTensor2D quantize_input(const Tensor2D& window) const;

  // Integer-domain forward pass; returns the int8 softmax output.
  const QTensor2D& invoke(const QTensor2D& input);

  Prediction run(const Tensor2D& window);

  const SaturationAudit& audit() const { return audit_; }
  void reset_audit() { audit_ = {}; }

 private:
  struct Prepared {
    std::vector<std::int32_t> effective_bias;  // bias - zp_in * sum(w)
    ir::LayerParams lstm_params;               // dequantized LSTM weights
  };

  const QuantizedModel& model_;
  std::vector<Prepared> prepared_;
  QTensor2D a_;
  QTensor2D b_;
  SaturationAudit audit_;
};

Prediction run_quantized(const QuantizedModel& model, const Tensor2D& window);

struct LatencyStats {
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p95_us = 0.0;
  std::size_t samples = 0;
};

// Nearest-rank percentiles over per-run wall-clock samples.
LatencyStats summarize_latency(std::vector<double> samples_us);

// Times `repetitions` inferences after `warmup` discarded runs. The window is
// quantized once up front; only the integer forward pass is timed.
LatencyStats timed_inference(const QuantizedModel& model,
                             const Tensor2D& window, std::size_t repetitions,
                             std::size_t warmup = 3);

// Float reference counterpart, timing fp::forward.
LatencyStats timed_inference(const ir::ModelGraph& graph,
                             const Tensor2D& window, std::size_t repetitions,
                             std::size_t warmup = 3);

}  // namespace tinyhar::q8

#endif  // TINYHAR_INT8_ENGINE_H_
