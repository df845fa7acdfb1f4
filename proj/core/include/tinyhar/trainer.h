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

#ifndef TINYHAR_TRAINER_H_
#define TINYHAR_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/tensor.h"

namespace tinyhar::fp {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 7;
  Optimizer optimizer = Optimizer::kAdam;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  // NaN when no validation set was supplied.
  double val_acc = 0.0;

  bool operator==(const EpochStats&) const = default;
};

struct TrainResult {
  ir::ModelGraph graph;
  std::vector<EpochStats> history;
};

// Minibatch training with categorical cross-entropy. Supports Conv1D, ReLU,
// Dropout (inverted, active only here), AvgPool1D, Flatten, Dense and
// Softmax; graphs containing LSTM layers raise kUnsupportedLayer.
// Deterministic for a given config seed.
TrainResult train(const ir::ModelGraph& graph,
                  std::span<const WindowedSample> train_set,
                  std::span<const WindowedSample> val_set,
                  const TrainConfig& config);

// "epoch,loss,train_acc,val_acc" rows.
std::string history_csv(const std::vector<EpochStats>& history);

// Gradient of the cross-entropy loss for one window, computed in double
// precision by backpropagation with dropout disabled. Shapes follow
// ir::LayerParams.
struct LayerGradients {
  std::vector<double> weights;
  std::vector<double> bias;
};

std::vector<LayerGradients> analytic_gradients(const ir::ModelGraph& graph,
                                               const Tensor2D& window,
                                               int label);

struct GradCheckOptions {
  double step = 1e-4;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // entries whose every step crossed a ReLU kink
};

// Compares analytic gradients with central finite differences on a random
// sample of parameters (all parameters when there are fewer than
// `samples`). Relative error is |a - n| / max(|a|, |n|, 1e-7). A step that
// flips any ReLU is shrunk tenfold, at most three times; entries that still
// flip are counted in `skipped` instead of `checked`.
GradCheckResult grad_check(const ir::ModelGraph& graph, const Tensor2D& window,
                           int label, const GradCheckOptions& options = {});

}  // namespace tinyhar::fp

#endif  // TINYHAR_TRAINER_H_
