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

#include "tinyhar/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "tinyhar/error.h"
#include "tinyhar/float_engine.h"
#include "tinyhar/int8_engine.h"
#include "tinyhar/metrics.h"
#include "tinyhar/model_file.h"
#include "tinyhar/quantizer.h"
#include "tinyhar/windowing.h"

namespace tinyhar::bench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fill_deployment(EvalReport& r, const ir::ModelGraph& skeleton,
                     ir::Precision precision, std::uint64_t size,
                     const DeploymentOptions& d) {
  r.model_size_bytes = size;
  r.arena_bytes = estimate_arena(skeleton, precision);
  r.macs = mac_count(skeleton);
  r.host_mean_us = r.host_p50_us = r.host_p95_us = kNaN;
  r.host_samples = 0;
  for (const McuProfile& p : d.profiles) {
    McuEstimate m;
    m.mcu = p.name;
    m.latency_ms = estimate_latency_ms(r.macs, precision, p, d.latency);
    m.energy_mj = estimate_energy_mj(m.latency_ms, p, precision);
    m.verdict = fits_on(r.model_size_bytes, r.arena_bytes, p, d.overhead);
    r.mcu.push_back(std::move(m));
  }
}

void fill_host(EvalReport& r, const q8::LatencyStats& s) {
  r.host_mean_us = s.mean_us;
  r.host_p50_us = s.p50_us;
  r.host_p95_us = s.p95_us;
  r.host_samples = s.samples;
}

void fill_metrics(EvalReport& r, std::span<const int> predictions,
                  std::span<const WindowedSample> test) {
  if (test.empty()) {
    r.accuracy = r.macro_f1 = kNaN;
    return;
  }
  std::vector<int> labels;
  labels.reserve(test.size());
  for (const WindowedSample& s : test) labels.push_back(s.label);
  r.confusion = confusion(predictions, labels);
  r.accuracy = accuracy(predictions, labels);
  r.macro_f1 = macro_f1(r.confusion);
}

Tensor2D timing_window(const Shape& shape,
                       std::span<const WindowedSample> test) {
  if (!test.empty()) return test.front().window;
  return Tensor2D(shape.steps, shape.channels);
}

EvalReport failed(const ConfigDescriptor& config, const std::string& what) {
  EvalReport r;
  r.config = config;
  r.status = "error: " + what;
  r.accuracy = r.macro_f1 = kNaN;
  r.host_mean_us = r.host_p50_us = r.host_p95_us = kNaN;
  return r;
}

struct GroupData {
  std::vector<WindowedSample> train;
  std::vector<WindowedSample> test;
};

GroupData prepare_group(const data::Dataset& dataset, data::ChannelGroup group,
                        const SweepConfig& cfg) {
  std::vector<WindowedSample> windows =
      data::make_windows(dataset, group, cfg.window_len, cfg.stride);
  data::SessionSplit split =
      data::split_by_session(windows, cfg.held_out_session);
  windows.clear();
  windows.shrink_to_fit();
  if (split.train.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "no training windows outside session " +
                    std::to_string(cfg.held_out_session));
  }
  const data::DatasetStats stats = data::fit_stats(split.train);
  data::normalize_in_place(split.train, stats);
  data::normalize_in_place(split.test, stats);
  return {std::move(split.train), std::move(split.test)};
}

struct Unit {
  Architecture arch;
  std::size_t filters;
};

// Float32 report followed by the Int8Full report of one configuration.
std::vector<EvalReport> run_unit(const Unit& unit, std::size_t channels,
                                 const GroupData& data,
                                 const SweepConfig& cfg) {
  ConfigDescriptor fcfg{unit.arch, channels, unit.filters,
                        ir::Precision::kFloat32};
  ConfigDescriptor qcfg = fcfg;
  qcfg.precision = ir::Precision::kInt8Full;
  try {
    ir::ModelGraph graph;
    if (unit.arch == Architecture::kMcCnn) {
      ir::McCnnConfig mc;
      mc.channels = channels;
      mc.window_len = cfg.window_len;
      mc.first_filters = unit.filters;
      mc.seed = cfg.seed;
      fp::TrainConfig tc = cfg.train;
      tc.seed = cfg.seed;
      graph = fp::train(ir::build_mc_cnn(mc), data.train, {}, tc).graph;
    } else {
      ir::DeepConvLstmConfig dc;
      dc.channels = channels;
      dc.window_len = cfg.window_len;
      dc.filters = unit.filters;
      dc.seed = cfg.seed;
      graph = ir::build_deep_conv_lstm(dc);
    }
    const std::size_t n_cal =
        std::min(cfg.calibration_windows, data.train.size());
    const QuantizedModel qmodel = quant::quantize_model(
        graph, std::span<const WindowedSample>(data.train).first(n_cal));

    if (unit.arch == Architecture::kMcCnn) {
      return {evaluate(graph, data.test, fcfg, cfg.deployment),
              evaluate(qmodel, data.test, qcfg, cfg.deployment)};
    }
    return {describe(graph, fcfg, cfg.deployment),
            describe(qmodel, qcfg, cfg.deployment)};
  } catch (const std::exception& e) {
    return {failed(fcfg, e.what()), failed(qcfg, e.what())};
  }
}

}  // namespace

std::vector<int> predict(const ir::ModelGraph& graph,
                         std::span<const WindowedSample> samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const WindowedSample& s : samples) {
    out.push_back(static_cast<int>(fp::argmax(fp::forward(graph, s.window))));
  }
  return out;
}

std::vector<int> predict(const QuantizedModel& model,
                         std::span<const WindowedSample> samples) {
  q8::Executor exec(model);
  std::vector<int> out;
  out.reserve(samples.size());
  for (const WindowedSample& s : samples) {
    out.push_back(static_cast<int>(exec.run(s.window).label));
  }
  return out;
}

EvalReport describe(const ir::ModelGraph& graph, const ConfigDescriptor& config,
                    const DeploymentOptions& deployment) {
  EvalReport r;
  r.config = config;
  r.accuracy = r.macro_f1 = kNaN;
  fill_deployment(r, graph, ir::Precision::kFloat32,
                  ir::model_size_bytes(graph, ir::Precision::kFloat32),
                  deployment);
  if (deployment.host_latency_runs > 0) {
    fill_host(r, q8::timed_inference(graph, timing_window(graph.input_shape, {}),
                                     deployment.host_latency_runs));
  }
  return r;
}

EvalReport describe(const QuantizedModel& model, const ConfigDescriptor& config,
                    const DeploymentOptions& deployment) {
  EvalReport r;
  r.config = config;
  r.accuracy = r.macro_f1 = kNaN;
  fill_deployment(r, model.skeleton(), ir::Precision::kInt8Full,
                  ir::serialize(model).size(), deployment);
  if (deployment.host_latency_runs > 0) {
    fill_host(r, q8::timed_inference(model, timing_window(model.input_shape, {}),
                                     deployment.host_latency_runs));
  }
  return r;
}

EvalReport evaluate(const ir::ModelGraph& graph,
                    std::span<const WindowedSample> test,
                    const ConfigDescriptor& config,
                    const DeploymentOptions& deployment) {
  EvalReport r;
  r.config = config;
  fill_deployment(r, graph, ir::Precision::kFloat32,
                  ir::model_size_bytes(graph, ir::Precision::kFloat32),
                  deployment);
  fill_metrics(r, predict(graph, test), test);
  if (deployment.host_latency_runs > 0) {
    fill_host(r, q8::timed_inference(graph,
                                     timing_window(graph.input_shape, test),
                                     deployment.host_latency_runs));
  }
  return r;
}

EvalReport evaluate(const QuantizedModel& model,
                    std::span<const WindowedSample> test,
                    const ConfigDescriptor& config,
                    const DeploymentOptions& deployment) {
  EvalReport r;
  r.config = config;
  fill_deployment(r, model.skeleton(), ir::Precision::kInt8Full,
                  ir::serialize(model).size(), deployment);
  fill_metrics(r, predict(model, test), test);
  if (deployment.host_latency_runs > 0) {
    fill_host(r, q8::timed_inference(model,
                                     timing_window(model.input_shape, test),
                                     deployment.host_latency_runs));
  }
  return r;
}

std::vector<EvalReport> sweep(const SweepConfig& config,
                              const data::Dataset& dataset) {
  if (config.jobs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "jobs must be at least 1");
  }
  config.train.validate();
  std::vector<Unit> units;
  for (std::size_t f : config.mc_cnn_filters) {
    units.push_back({Architecture::kMcCnn, f});
  }
  for (std::size_t f : config.deep_conv_lstm_filters) {
    units.push_back({Architecture::kDeepConvLstm, f});
  }

  // results[arch][group][filters] pairs, flattened after all groups ran.
  std::vector<std::vector<std::vector<EvalReport>>> per_group(
      config.groups.size(), std::vector<std::vector<EvalReport>>(units.size()));
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const data::ChannelGroup group = config.groups[g];
    const std::size_t channels = data::channel_count(group);
    GroupData data;
    try {
      data = prepare_group(dataset, group, config);
    } catch (const std::exception& e) {
      for (std::size_t u = 0; u < units.size(); ++u) {
        ConfigDescriptor c{units[u].arch, channels, units[u].filters,
                           ir::Precision::kFloat32};
        ConfigDescriptor q = c;
        q.precision = ir::Precision::kInt8Full;
        per_group[g][u] = {failed(c, e.what()), failed(q, e.what())};
      }
      continue;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t u = next++; u < units.size(); u = next++) {
        per_group[g][u] = run_unit(units[u], channels, data, config);
      }
    };
    const std::size_t threads = std::min(config.jobs, units.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }

  std::vector<EvalReport> reports;
  for (Architecture arch : {Architecture::kMcCnn, Architecture::kDeepConvLstm}) {
    for (std::size_t g = 0; g < config.groups.size(); ++g) {
      for (std::size_t u = 0; u < units.size(); ++u) {
        if (units[u].arch != arch) continue;
        for (EvalReport& r : per_group[g][u]) reports.push_back(std::move(r));
      }
    }
  }
  return reports;
}

}  // namespace tinyhar::bench
