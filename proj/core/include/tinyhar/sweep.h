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

#ifndef TINYHAR_SWEEP_H_
#define TINYHAR_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tinyhar/channels.h"
#include "tinyhar/mcu.h"
#include "tinyhar/quant_types.h"
#include "tinyhar/report.h"
#include "tinyhar/sensor_io.h"
#include "tinyhar/trainer.h"

namespace tinyhar::bench {

struct DeploymentOptions {
  std::vector<McuProfile> profiles = builtin_profiles();
  RuntimeOverhead overhead;
  LatencyModel latency;
  // Host wall-clock runs per model; 0 skips timing and reports NaN.
  std::size_t host_latency_runs = 0;
};

std::vector<int> predict(const ir::ModelGraph& graph,
                         std::span<const WindowedSample> samples);
std::vector<int> predict(const QuantizedModel& model,
                         std::span<const WindowedSample> samples);

// Accuracy, macro F1 and confusion over `test` (NaN accuracy and F1 when
// `test` is empty) plus size, arena, MACs and per-MCU estimates.
EvalReport evaluate(const ir::ModelGraph& graph,
                    std::span<const WindowedSample> test,
                    const ConfigDescriptor& config,
                    const DeploymentOptions& deployment);
EvalReport evaluate(const QuantizedModel& model,
                    std::span<const WindowedSample> test,
                    const ConfigDescriptor& config,
                    const DeploymentOptions& deployment);

// Deployment fields only; accuracy and F1 are NaN.
EvalReport describe(const ir::ModelGraph& graph, const ConfigDescriptor& config,
                    const DeploymentOptions& deployment);
EvalReport describe(const QuantizedModel& model, const ConfigDescriptor& config,
                    const DeploymentOptions& deployment);

inline constexpr std::size_t kMcCnnFilterLevels[] = {128, 256, 400};
inline constexpr std::size_t kDeepConvLstmFilterLevels[] = {32, 64, 100};

struct SweepConfig {
  std::vector<data::ChannelGroup> groups{data::kAllChannelGroups.begin(),
                                         data::kAllChannelGroups.end()};
  std::vector<std::size_t> mc_cnn_filters{std::begin(kMcCnnFilterLevels),
                                          std::end(kMcCnnFilterLevels)};
  std::vector<std::size_t> deep_conv_lstm_filters{
      std::begin(kDeepConvLstmFilterLevels),
      std::end(kDeepConvLstmFilterLevels)};
  std::size_t window_len = 24;
  std::size_t stride = 12;
  int held_out_session = 5;
  std::size_t calibration_windows = 256;
  std::uint64_t seed = 7;
  fp::TrainConfig train;
  DeploymentOptions deployment;
  std::size_t jobs = 1;
};

// Every MC-CNN config is trained on the non-held-out sessions and evaluated
// at Float32 and Int8Full on the held-out session. DeepConvLSTM configs are
// randomly initialized and report deployment figures only. Reports are
// ordered by architecture, channel group, filters, precision regardless of
// `jobs`. A failing config yields reports whose status holds the error.
std::vector<EvalReport> sweep(const SweepConfig& config,
                              const data::Dataset& dataset);

}  // namespace tinyhar::bench

#endif  // TINYHAR_SWEEP_H_
