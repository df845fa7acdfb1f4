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

#ifndef TINYHAR_REPORT_H_
#define TINYHAR_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tinyhar/mcu.h"
#include "tinyhar/metrics.h"
#include "tinyhar/model_ir.h"

namespace tinyhar::bench {

enum class Architecture { kMcCnn, kDeepConvLstm };

std::string_view to_string(Architecture arch);  // "mc-cnn", "deepconvlstm"
Architecture parse_architecture(std::string_view text);

struct ConfigDescriptor {
  Architecture architecture = Architecture::kMcCnn;
  std::size_t channels = 0;
  std::size_t filters = 0;
  ir::Precision precision = ir::Precision::kFloat32;

  // e.g. "mc-cnn_23ch_f128_int8"
  std::string label() const;
  bool operator==(const ConfigDescriptor&) const = default;
};

struct McuEstimate {
  std::string mcu;
  double latency_ms = 0.0;
  double energy_mj = 0.0;
  FeasibilityVerdict verdict;
};

// Floating fields hold NaN when not applicable (untrained accuracy, host
// latency that was not measured).
struct EvalReport {
  ConfigDescriptor config;
  std::string status = "ok";
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion{};
  std::uint64_t model_size_bytes = 0;
  std::uint64_t arena_bytes = 0;
  std::uint64_t macs = 0;
  double host_mean_us = 0.0;
  double host_p50_us = 0.0;
  double host_p95_us = 0.0;
  std::uint64_t host_samples = 0;
  std::vector<McuEstimate> mcu;

  bool has_accuracy() const;
};

// Field-wise equality in which NaN equals NaN.
bool same_report(const EvalReport& a, const EvalReport& b);

// One row per report. Fixed columns come first, then six columns per MCU
// (named after the first report's MCU list), then the 225 confusion cells
// cm_<true>_<pred>. Numbers use the shortest exact round-trip form.
std::string reports_to_csv(std::span<const EvalReport> reports);
std::vector<EvalReport> reports_from_csv(std::string_view csv);

// Two tables: accuracy / macro F1 / size per config, then per-MCU latency,
// energy and feasibility.
std::string reports_to_markdown(std::span<const EvalReport> reports);

// Confusion heatmap as standalone SVG; cell shade is the row-normalized rate.
std::string confusion_svg(const ConfusionMatrix& matrix, std::string_view title);

struct RenderedFiles {
  std::filesystem::path markdown;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> heatmaps;
};

// Writes report.md, report.csv and one confusion_<label>.svg per report with
// accuracy into `dir`.
RenderedFiles render_report(std::span<const EvalReport> reports,
                            const std::filesystem::path& dir);

}  // namespace tinyhar::bench

#endif  // TINYHAR_REPORT_H_
