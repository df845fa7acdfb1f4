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

// tinyhar: command-line front end for data generation, training,
// quantization, evaluation and MCU deployment checks.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "tinyhar/channels.h"
#include "tinyhar/error.h"
#include "tinyhar/int8_engine.h"
#include "tinyhar/mcu.h"
#include "tinyhar/model_file.h"
#include "tinyhar/model_ir.h"
#include "tinyhar/quantizer.h"
#include "tinyhar/report.h"
#include "tinyhar/sensor_io.h"
#include "tinyhar/sweep.h"
#include "tinyhar/synth.h"
#include "tinyhar/trainer.h"
#include "tinyhar/windowing.h"

namespace fs = std::filesystem;
using namespace tinyhar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Raised for user errors discovered after flag parsing (exit code 1).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 7;
  std::string out = "runs";
  std::string run_dir;
  std::size_t window_len = 24;
  std::size_t stride = 12;
  std::string channels = "23";
  bool verbose = false;
};

struct SynthOptions {
  int subjects = 3;
  int sessions = 5;
  double duration_s = 600.0;
  double noise = 1.0;
};

struct TrainOptions {
  std::string data;
  std::string arch = "mc-cnn";
  std::size_t filters = 128;
  std::size_t epochs = 20;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::string optimizer = "adam";
  int held_out = 5;
};

struct QuantizeOptions {
  std::string model;
  std::string data;
  std::string stats;
  std::size_t calibration = 256;
  int held_out = 5;
};

struct EvalOptions {
  std::string model;
  std::string data;
  std::string stats;
  std::string profiles;
  int held_out = 5;
  std::size_t latency_runs = 0;
};

struct BenchOptions {
  std::string model;
  std::size_t runs = 100;
  std::size_t warmup = 3;
};

struct SweepOptions {
  std::string data;
  std::string profiles;
  int subjects = 2;
  double duration_s = 240.0;
  std::size_t epochs = 3;
  std::size_t jobs = 1;
  std::size_t calibration = 256;
  std::size_t latency_runs = 0;
  int held_out = 5;
  bool skip_lstm = false;
};

struct McuCheckOptions {
  std::string model;
  std::string profile = "all";
  std::string profiles;
  double flash_overhead_kib = 256.0;
  double ram_overhead_kib = 64.0;
};

class Log {
 public:
  explicit Log(const bool& verbose) : verbose_(verbose) {}
  void operator()(const std::string& msg) const {
    if (verbose_) std::cerr << "[tinyhar] " << msg << '\n';
  }

 private:
  const bool& verbose_;
};

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

// Creates the run directory and writes the effective configuration into it.
fs::path open_run(const CLI::App& app, const GlobalOptions& g,
                  const std::string& command) {
  // Global values plus those of the running command only.
  std::string echo;
  std::istringstream all(app.config_to_str(true, false));
  const std::string prefix = command + ".";
  for (std::string line; std::getline(all, line);) {
    const std::string key = line.substr(0, line.find('='));
    if (key.find('.') == std::string::npos || key.rfind(prefix, 0) == 0) {
      echo += line + "\n";
    }
  }
  fs::path dir;
  if (!g.run_dir.empty()) {
    dir = g.run_dir;
  } else {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%08llx",
                  static_cast<unsigned long long>(fnv1a(echo) & 0xffffffffULL));
    const std::string base = command + "-" + utc_stamp() + "-" + hash;
    dir = fs::path(g.out) / base;
    for (int n = 2; fs::exists(dir); ++n) {
      dir = fs::path(g.out) / (base + "-" + std::to_string(n));
    }
  }
  fs::create_directories(dir);
  write_text(dir / "config.toml", "# tinyhar " + command + "\n" + echo);
  return dir;
}

data::ChannelGroup group_for_channels(std::size_t channels) {
  try {
    return data::parse_channel_group(std::to_string(channels));
  } catch (const Error&) {
    throw ValidationError("model expects " + std::to_string(channels) +
                          " channels, which is not a known channel group");
  }
}

ir::ModelGraph load_float(const std::string& path) {
  ir::LoadedModel m = ir::load_model(path);
  if (auto* g = std::get_if<ir::ModelGraph>(&m)) return std::move(*g);
  throw ValidationError(path + " is an int8 model; a float32 model is required");
}

fs::path default_stats_path(const std::string& model_path,
                            const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(model_path).parent_path() / "norm_stats.json";
}

struct Windows {
  std::vector<WindowedSample> train;
  std::vector<WindowedSample> test;
};

// Windows of `manifest` projected onto `group` and split on `held_out`
// (0 keeps every window in both halves).
Windows load_windows(const std::string& manifest, data::ChannelGroup group,
                     std::size_t window_len, std::size_t stride, int held_out) {
  const data::Dataset ds = data::load_dataset(manifest);
  std::vector<WindowedSample> all =
      data::make_windows(ds, group, window_len, stride);
  if (held_out == 0) return {all, all};
  data::SessionSplit split = data::split_by_session(all, held_out);
  return {std::move(split.train), std::move(split.test)};
}

std::vector<bench::McuProfile> profiles_from(const std::string& path) {
  return path.empty() ? bench::builtin_profiles() : bench::load_profiles(path);
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int cmd_synth(const CLI::App& app, const GlobalOptions& g,
              const SynthOptions& o, const Log& log) {
  data::SynthConfig cfg;
  cfg.seed = g.seed;
  cfg.subjects = o.subjects;
  cfg.sessions_per_subject = o.sessions;
  cfg.duration_s = o.duration_s;
  cfg.window_len = g.window_len;
  cfg.noise_scale = o.noise;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  const fs::path dir = open_run(app, g, "synth");
  log("generating " + std::to_string(o.subjects * o.sessions) + " sessions");
  const data::Dataset ds = data::synth_generate(cfg);
  const fs::path manifest = data::save_dataset(dir / "data", ds);
  std::size_t frames = 0;
  for (const data::Recording& r : ds) frames += r.frames.size();
  std::cout << "recordings: " << ds.size() << ", frames: " << frames << '\n'
            << "manifest: " << manifest.string() << '\n'
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_train(const CLI::App& app, const GlobalOptions& g,
              const TrainOptions& o, const Log& log) {
  const data::ChannelGroup group = data::parse_channel_group(g.channels);
  const bench::Architecture arch = bench::parse_architecture(o.arch);
  fp::TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch;
  tc.learning_rate = o.lr;
  tc.seed = g.seed;
  tc.optimizer = o.optimizer == "sgd" ? fp::Optimizer::kSgd : fp::Optimizer::kAdam;
  try {
    tc.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  // Build first so shape errors surface before a run directory exists.
  ir::ModelGraph graph;
  if (arch == bench::Architecture::kMcCnn) {
    ir::McCnnConfig mc;
    mc.channels = data::channel_count(group);
    mc.window_len = g.window_len;
    mc.first_filters = o.filters;
    mc.seed = g.seed;
    graph = ir::build_mc_cnn(mc);
  } else {
    ir::DeepConvLstmConfig dc;
    dc.channels = data::channel_count(group);
    dc.window_len = g.window_len;
    dc.filters = o.filters;
    dc.seed = g.seed;
    graph = ir::build_deep_conv_lstm(dc);
  }
  const fs::path dir = open_run(app, g, "train");
  Windows w = load_windows(o.data, group, g.window_len, g.stride, o.held_out);
  if (w.train.empty()) {
    throw ValidationError("no training windows; check --held-out and the data");
  }
  const data::DatasetStats stats = data::fit_stats(w.train);
  data::normalize_in_place(w.train, stats);
  data::normalize_in_place(w.test, stats);
  log("train windows: " + std::to_string(w.train.size()) +
      ", validation windows: " + std::to_string(w.test.size()));

  std::vector<fp::EpochStats> history;
  if (arch == bench::Architecture::kMcCnn) {
    fp::TrainResult res = fp::train(graph, w.train,
                                    o.held_out == 0 ? std::span<const WindowedSample>{}
                                                    : std::span<const WindowedSample>(w.test),
                                    tc);
    graph = std::move(res.graph);
    history = std::move(res.history);
    for (const fp::EpochStats& e : history) {
      log("epoch " + std::to_string(e.epoch) + " loss " + fmt(e.loss, 4) +
          " train_acc " + fmt(e.train_acc, 4) + " val_acc " +
          fmt(e.val_acc, 4));
    }
  } else {
    std::cout << "note: deepconvlstm is saved with its seeded initial "
                 "weights; only mc-cnn is trainable\n";
  }
  ir::save_model(dir / "model.thar", graph);
  data::save_stats(dir / "norm_stats.json", stats);
  write_text(dir / "history.csv", fp::history_csv(history));
  if (!history.empty()) {
    std::cout << "final train_acc " << fmt(history.back().train_acc, 4)
              << ", val_acc " << fmt(history.back().val_acc, 4) << '\n';
  }
  std::cout << "model: " << (dir / "model.thar").string() << '\n'
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_quantize(const CLI::App& app, const GlobalOptions& g,
                 const QuantizeOptions& o, const Log& log) {
  const ir::ModelGraph graph = load_float(o.model);
  const data::ChannelGroup group = group_for_channels(graph.input_shape.channels);
  const fs::path stats_path = default_stats_path(o.model, o.stats);
  const data::DatasetStats stats = data::load_stats(stats_path);
  if (o.calibration == 0) throw ValidationError("--calibration must be >= 1");
  const fs::path dir = open_run(app, g, "quantize");
  Windows w = load_windows(o.data, group, graph.input_shape.steps, g.stride,
                           o.held_out);
  if (w.train.empty()) throw ValidationError("no calibration windows");
  const std::size_t n = std::min(o.calibration, w.train.size());
  std::vector<WindowedSample> cal(w.train.begin(), w.train.begin() + n);
  data::normalize_in_place(cal, stats);
  log("calibrating on " + std::to_string(n) + " windows");
  const QuantizedModel q = quant::quantize_model(graph, cal);
  ir::save_model(dir / "model.thar", q);
  data::save_stats(dir / "norm_stats.json", stats);
  const std::size_t fsize = ir::model_size_bytes(graph, ir::Precision::kFloat32);
  const std::size_t qsize = ir::serialize(q).size();
  std::cout << "float32 size: " << fsize << " bytes, int8 size: " << qsize
            << " bytes, ratio " << fmt(static_cast<double>(fsize) / qsize, 3)
            << '\n'
            << "model: " << (dir / "model.thar").string() << '\n'
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const CLI::App& app, const GlobalOptions& g, const EvalOptions& o,
             const Log& log) {
  ir::LoadedModel model = ir::load_model(o.model);
  const Shape shape = std::visit([](const auto& m) { return m.input_shape; }, model);
  const data::ChannelGroup group = group_for_channels(shape.channels);
  const data::DatasetStats stats =
      data::load_stats(default_stats_path(o.model, o.stats));
  bench::DeploymentOptions dep;
  dep.profiles = profiles_from(o.profiles);
  dep.host_latency_runs = o.latency_runs;
  const fs::path dir = open_run(app, g, "eval");
  Windows w = load_windows(o.data, group, shape.steps, g.stride, o.held_out);
  data::normalize_in_place(w.test, stats);
  log("evaluating on " + std::to_string(w.test.size()) + " windows");
  bench::ConfigDescriptor cfg;
  cfg.channels = shape.channels;
  bench::EvalReport report;
  if (auto* graph = std::get_if<ir::ModelGraph>(&model)) {
    cfg.architecture = graph->layers.end() !=
                               std::find_if(graph->layers.begin(), graph->layers.end(),
                                            [](const ir::LayerSpec& s) {
                                              return s.kind == ir::LayerKind::kLSTM;
                                            })
                           ? bench::Architecture::kDeepConvLstm
                           : bench::Architecture::kMcCnn;
    cfg.filters = graph->layers.front().out;
    cfg.precision = ir::Precision::kFloat32;
    report = bench::evaluate(*graph, w.test, cfg, dep);
  } else {
    const QuantizedModel& q = std::get<QuantizedModel>(model);
    cfg.architecture =
        std::any_of(q.layers.begin(), q.layers.end(),
                    [](const QuantizedLayer& l) {
                      return l.spec.kind == ir::LayerKind::kLSTM;
                    })
            ? bench::Architecture::kDeepConvLstm
            : bench::Architecture::kMcCnn;
    cfg.filters = q.layers.front().spec.out;
    cfg.precision = ir::Precision::kInt8Full;
    report = bench::evaluate(q, w.test, cfg, dep);
  }
  const std::vector<bench::EvalReport> reports{report};
  bench::render_report(reports, dir);
  std::cout << "windows: " << w.test.size() << ", accuracy "
            << fmt(report.accuracy, 4) << ", macro_f1 " << fmt(report.macro_f1, 4)
            << ", model size " << report.model_size_bytes << " bytes\n"
            << "report: " << (dir / "report.md").string() << '\n'
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_bench(const CLI::App& app, const GlobalOptions& g,
              const BenchOptions& o, const Log& log) {
  if (o.runs == 0) throw ValidationError("--runs must be >= 1");
  ir::LoadedModel model = ir::load_model(o.model);
  const fs::path dir = open_run(app, g, "bench");
  q8::LatencyStats s;
  std::string precision;
  if (auto* graph = std::get_if<ir::ModelGraph>(&model)) {
    const Tensor2D window(graph->input_shape.steps, graph->input_shape.channels);
    s = q8::timed_inference(*graph, window, o.runs, o.warmup);
    precision = "float32";
  } else {
    const QuantizedModel& q = std::get<QuantizedModel>(model);
    const Tensor2D window(q.input_shape.steps, q.input_shape.channels);
    s = q8::timed_inference(q, window, o.runs, o.warmup);
    precision = "int8";
  }
  log("timed " + std::to_string(s.samples) + " runs");
  write_text(dir / "latency.csv",
             "precision,runs,mean_us,p50_us,p95_us\n" + precision + "," +
                 std::to_string(s.samples) + "," + fmt(s.mean_us, 3) + "," +
                 fmt(s.p50_us, 3) + "," + fmt(s.p95_us, 3) + "\n");
  std::cout << precision << " host latency over " << s.samples
            << " runs: mean " << fmt(s.mean_us) << " us, p50 " << fmt(s.p50_us)
            << " us, p95 " << fmt(s.p95_us) << " us\n"
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const CLI::App& app, const GlobalOptions& g,
              const SweepOptions& o, const Log& log) {
  if (o.jobs == 0) throw ValidationError("--jobs must be >= 1");
  bench::SweepConfig cfg;
  cfg.window_len = g.window_len;
  cfg.stride = g.stride;
  cfg.held_out_session = o.held_out;
  cfg.calibration_windows = o.calibration;
  cfg.seed = g.seed;
  cfg.train.epochs = o.epochs;
  cfg.train.seed = g.seed;
  cfg.jobs = o.jobs;
  cfg.deployment.profiles = profiles_from(o.profiles);
  cfg.deployment.host_latency_runs = o.latency_runs;
  if (o.skip_lstm) cfg.deep_conv_lstm_filters.clear();
  try {
    cfg.train.validate();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  data::SynthConfig sc;
  if (o.data.empty()) {
    sc.seed = g.seed;
    sc.subjects = o.subjects;
    sc.sessions_per_subject = 5;
    sc.duration_s = o.duration_s;
    sc.window_len = g.window_len;
    try {
      sc.validate();
    } catch (const Error& e) {
      throw ValidationError(e.what());
    }
  }
  const fs::path dir = open_run(app, g, "sweep");
  const data::Dataset ds =
      o.data.empty() ? data::synth_generate(sc) : data::load_dataset(o.data);
  log("sweeping over " + std::to_string(ds.size()) + " recordings");
  const std::vector<bench::EvalReport> reports = bench::sweep(cfg, ds);
  const bench::RenderedFiles files = bench::render_report(reports, dir);
  std::size_t failed = 0;
  for (const bench::EvalReport& r : reports) failed += r.status != "ok";
  std::cout << "reports: " << reports.size() << " (" << failed << " failed)\n"
            << "csv: " << files.csv.string() << '\n'
            << "markdown: " << files.markdown.string() << '\n'
            << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_mcu_check(const CLI::App& app, const GlobalOptions& g,
                  const McuCheckOptions& o, const Log& log) {
  if (o.flash_overhead_kib < 0 || o.ram_overhead_kib < 0) {
    throw ValidationError("overheads must be >= 0");
  }
  const std::vector<bench::McuProfile> all = profiles_from(o.profiles);
  std::vector<bench::McuProfile> selected;
  if (o.profile == "all") {
    selected = all;
  } else {
    try {
      selected.push_back(bench::find_profile(all, o.profile));
    } catch (const Error& e) {
      throw ValidationError(e.what());
    }
  }
  ir::LoadedModel model = ir::load_model(o.model);
  const fs::path dir = open_run(app, g, "mcu-check");
  bench::RuntimeOverhead overhead;
  overhead.flash_bytes =
      static_cast<std::uint64_t>(o.flash_overhead_kib * bench::kKiB);
  overhead.ram_bytes = static_cast<std::uint64_t>(o.ram_overhead_kib * bench::kKiB);
  std::uint64_t size = 0;
  std::uint64_t arena = 0;
  std::uint64_t macs = 0;
  ir::Precision precision;
  if (auto* graph = std::get_if<ir::ModelGraph>(&model)) {
    precision = ir::Precision::kFloat32;
    size = ir::model_size_bytes(*graph, precision);
    arena = bench::estimate_arena(*graph, precision);
    macs = bench::mac_count(*graph);
  } else {
    const QuantizedModel& q = std::get<QuantizedModel>(model);
    precision = ir::Precision::kInt8Full;
    size = ir::serialize(q).size();
    arena = bench::estimate_arena(q);
    macs = bench::mac_count(q.skeleton());
  }
  log("model " + std::to_string(size) + " bytes, arena " +
      std::to_string(arena) + " bytes, " + std::to_string(macs) + " MACs");
  std::string csv =
      "mcu,precision,model_bytes,arena_bytes,flash_needed,flash_bytes,"
      "arena_needed,sram_bytes,flash_ok,sram_ok,feasible,latency_ms,"
      "energy_mj\n";
  std::cout << "model: " << o.model << " (" << ir::to_string(precision) << ", "
            << size << " bytes, arena " << arena << " bytes)\n";
  std::printf("%-12s %-10s %14s %14s %9s %12s %11s\n", "mcu", "verdict",
              "flash need/B", "sram need/B", "fits", "latency ms",
              "energy mJ");
  for (const bench::McuProfile& p : selected) {
    const bench::FeasibilityVerdict v = bench::fits_on(size, arena, p, overhead);
    const double ms = bench::estimate_latency_ms(macs, precision, p);
    const double mj = bench::estimate_energy_mj(ms, p, precision);
    const std::string fits = std::string(v.flash_ok ? "F" : "-") +
                             (v.sram_ok ? "S" : "-");
    std::printf("%-12s %-10s %14llu %14llu %9s %12.2f %11.2f\n",
                p.name.c_str(), v.feasible() ? "feasible" : "infeasible",
                static_cast<unsigned long long>(v.flash_needed),
                static_cast<unsigned long long>(v.arena_needed), fits.c_str(),
                ms, mj);
    csv += p.name + "," + std::string(ir::to_string(precision)) + "," +
           std::to_string(size) + "," + std::to_string(arena) + "," +
           std::to_string(v.flash_needed) + "," + std::to_string(p.flash_bytes) +
           "," + std::to_string(v.arena_needed) + "," +
           std::to_string(p.sram_bytes) + "," + (v.flash_ok ? "1" : "0") + "," +
           (v.sram_ok ? "1" : "0") + "," + (v.feasible() ? "1" : "0") + "," +
           fmt(ms, 4) + "," + fmt(mj, 4) + "\n";
  }
  std::fflush(stdout);
  write_text(dir / "feasibility.csv", csv);
  std::cout << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

CLI::Validator existing_file() { return CLI::ExistingFile; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tinyhar: kitchen activity recognition models for microcontrollers.\n"
      "Exit codes: 0 success, 1 invalid input, 2 runtime failure."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML file of default flag values; command-line flags win");
  app.option_defaults()->always_capture_default();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed for data, init and training")
      ->capture_default_str();
  app.add_option("--out", g.out, "Parent directory for run directories");
  app.add_option("--run-dir", g.run_dir,
                 "Exact run directory (default: <out>/<command>-<UTC time>-<hash>)");
  app.add_option("--window-len", g.window_len,
                 "Window length in samples at 6 Hz (24 samples = 4 s)")
      ->check(CLI::PositiveNumber);
  app.add_option("--stride", g.stride, "Window stride in samples at 6 Hz")
      ->check(CLI::PositiveNumber);
  app.add_option("--channels", g.channels,
                 "Channel group: 17, 23, 768 or 791 channels")
      ->check(CLI::IsMember({"17", "23", "768", "791"}));
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");
  Log log(g.verbose);

  SynthOptions synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled 6 Hz dataset");
  synth_cmd->add_option("--subjects", synth.subjects, "Number of subjects (count)")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sessions", synth.sessions,
                        "Sessions per subject (count)")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--duration", synth.duration_s,
                        "Length of each session in seconds (s)")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.noise,
                        "Sensor noise multiplier (dimensionless, 1 = nominal)")
      ->check(CLI::NonNegativeNumber);

  TrainOptions train;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train a float32 model on a dataset");
  train_cmd->add_option("--data", train.data, "Dataset manifest CSV (path)")
      ->required()
      ->check(existing_file());
  train_cmd->add_option("--arch", train.arch, "Architecture: mc-cnn or deepconvlstm")
      ->check(CLI::IsMember({"mc-cnn", "deepconvlstm"}));
  train_cmd->add_option("--filters", train.filters,
                        "First-layer filter count (filters; mc-cnn needs a multiple of 4)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", train.epochs, "Training epochs (count)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", train.batch, "Minibatch size (windows)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.lr, "Learning rate (dimensionless)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--optimizer", train.optimizer, "Optimizer: adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--held-out", train.held_out,
                        "Session id held out for validation (0 = none)")
      ->check(CLI::NonNegativeNumber);

  QuantizeOptions quantize;
  CLI::App* quantize_cmd = app.add_subcommand(
      "quantize", "Convert a float32 model to a full-integer int8 model");
  quantize_cmd->add_option("--model", quantize.model, "Float32 .thar model (path)")
      ->required()
      ->check(existing_file());
  quantize_cmd->add_option("--data", quantize.data,
                           "Dataset manifest CSV for calibration (path)")
      ->required()
      ->check(existing_file());
  quantize_cmd->add_option("--stats", quantize.stats,
                           "Normalization stats JSON (path; default: next to the model)")
      ->check(existing_file());
  quantize_cmd->add_option("--calibration", quantize.calibration,
                           "Representative windows used for calibration (count)");
  quantize_cmd->add_option("--held-out", quantize.held_out,
                           "Session id excluded from calibration (0 = none)")
      ->check(CLI::NonNegativeNumber);

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Evaluate a model and write markdown, CSV and SVG reports");
  eval_cmd->add_option("--model", eval.model, ".thar model, float32 or int8 (path)")
      ->required()
      ->check(existing_file());
  eval_cmd->add_option("--data", eval.data, "Dataset manifest CSV (path)")
      ->required()
      ->check(existing_file());
  eval_cmd->add_option("--stats", eval.stats,
                       "Normalization stats JSON (path; default: next to the model)")
      ->check(existing_file());
  eval_cmd->add_option("--profiles", eval.profiles,
                       "MCU profile registry JSON (path; default: built-in)")
      ->check(existing_file());
  eval_cmd->add_option("--held-out", eval.held_out,
                       "Session id to evaluate on (0 = every session)")
      ->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--latency-runs", eval.latency_runs,
                       "Host latency samples (runs; 0 = skip timing)");

  BenchOptions benchopt;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Measure host inference latency of a model");
  bench_cmd->add_option("--model", benchopt.model, ".thar model (path)")
      ->required()
      ->check(existing_file());
  bench_cmd->add_option("--runs", benchopt.runs, "Timed inferences (runs)");
  bench_cmd->add_option("--warmup", benchopt.warmup,
                        "Untimed warm-up inferences (runs)");

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep",
      "Train, quantize and evaluate every channel group x filter level x "
      "architecture x precision");
  sweep_cmd->add_option("--data", sweep.data,
                        "Dataset manifest CSV (path; default: synthesize)")
      ->check(existing_file());
  sweep_cmd->add_option("--subjects", sweep.subjects,
                        "Synthesized subjects when --data is absent (count)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--duration", sweep.duration_s,
                        "Synthesized session length when --data is absent (s)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--epochs", sweep.epochs, "Training epochs per MC-CNN (count)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--jobs", sweep.jobs, "Configurations run in parallel (threads)");
  sweep_cmd->add_option("--calibration", sweep.calibration,
                        "Calibration windows per model (count)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--latency-runs", sweep.latency_runs,
                        "Host latency samples per model (runs; 0 = skip, keeps "
                        "the CSV reproducible)");
  sweep_cmd->add_option("--held-out", sweep.held_out,
                        "Session id used as the test split")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--profiles", sweep.profiles,
                        "MCU profile registry JSON (path; default: built-in)")
      ->check(existing_file());
  sweep_cmd->add_flag("--skip-lstm", sweep.skip_lstm,
                      "Leave DeepConvLSTM configurations out");

  McuCheckOptions mcu;
  CLI::App* mcu_cmd = app.add_subcommand(
      "mcu-check", "Check flash/SRAM feasibility and estimate latency and energy");
  mcu_cmd->add_option("--model", mcu.model, ".thar model (path)")
      ->required()
      ->check(existing_file());
  mcu_cmd->add_option("--profile", mcu.profile,
                      "MCU name, e.g. nrf52840, or 'all'");
  mcu_cmd->add_option("--profiles", mcu.profiles,
                      "MCU profile registry JSON (path; default: built-in)")
      ->check(existing_file());
  mcu_cmd->add_option("--flash-overhead", mcu.flash_overhead_kib,
                      "Firmware flash reserved besides the model (KiB)");
  mcu_cmd->add_option("--ram-overhead", mcu.ram_overhead_kib,
                      "Firmware RAM reserved besides the arena (KiB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n(run with --help for usage)\n";
    return kExitValidation;
  }

  try {
    if (*synth_cmd) return cmd_synth(app, g, synth, log);
    if (*train_cmd) return cmd_train(app, g, train, log);
    if (*quantize_cmd) return cmd_quantize(app, g, quantize, log);
    if (*eval_cmd) return cmd_eval(app, g, eval, log);
    if (*bench_cmd) return cmd_bench(app, g, benchopt, log);
    if (*sweep_cmd) return cmd_sweep(app, g, sweep, log);
    if (*mcu_cmd) return cmd_mcu_check(app, g, mcu, log);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDivisibility:
        return kExitValidation;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}
