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

#include "tinyhar/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "tinyhar/error.h"

namespace tinyhar::bench {
namespace {

constexpr std::string_view kFixedColumns[] = {
    "architecture", "channels",    "filters",     "precision",
    "status",       "accuracy",    "macro_f1",    "model_size_bytes",
    "arena_bytes",  "macs",        "host_mean_us", "host_p50_us",
    "host_p95_us",  "host_samples"};
constexpr std::size_t kFixed = std::size(kFixedColumns);
constexpr std::string_view kMcuColumns[] = {"latency_ms", "energy_mj",
                                            "flash_needed", "arena_needed",
                                            "flash_ok",   "sram_ok"};
constexpr std::size_t kPerMcu = std::size(kMcuColumns);

bool same_double(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Commas and line breaks would break the flat CSV layout.
std::string sanitize(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == ',') c = ';';
    if (c == '|') c = '/';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse(std::string_view field, std::size_t row) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kParse, "report CSV row " + std::to_string(row) +
                                       ": bad number '" + std::string(field) +
                                       "'");
  }
  return v;
}

bool parse_bool(std::string_view field, std::size_t row) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw Error(ErrorCode::kParse, "report CSV row " + std::to_string(row) +
                                     ": expected 0 or 1");
}

ir::Precision parse_precision(std::string_view text) {
  if (text == ir::to_string(ir::Precision::kFloat32)) {
    return ir::Precision::kFloat32;
  }
  if (text == ir::to_string(ir::Precision::kInt8Full)) {
    return ir::Precision::kInt8Full;
  }
  throw Error(ErrorCode::kParse,
              "unknown precision '" + std::string(text) + "'");
}

std::string percent(double v) {
  return std::isnan(v) ? "n/a" : fixed(100.0 * v, 2);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace

std::string_view to_string(Architecture arch) {
  return arch == Architecture::kMcCnn ? "mc-cnn" : "deepconvlstm";
}

Architecture parse_architecture(std::string_view text) {
  if (text == "mc-cnn") return Architecture::kMcCnn;
  if (text == "deepconvlstm") return Architecture::kDeepConvLstm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown architecture '" + std::string(text) +
                  "' (expected mc-cnn or deepconvlstm)");
}

std::string ConfigDescriptor::label() const {
  return std::string(to_string(architecture)) + "_" + std::to_string(channels) +
         "ch_f" + std::to_string(filters) + "_" +
         std::string(ir::to_string(precision));
}

bool EvalReport::has_accuracy() const { return !std::isnan(accuracy); }

bool same_report(const EvalReport& a, const EvalReport& b) {
  if (!(a.config == b.config) || a.status != b.status ||
      !same_double(a.accuracy, b.accuracy) ||
      !same_double(a.macro_f1, b.macro_f1) || a.confusion != b.confusion ||
      a.model_size_bytes != b.model_size_bytes ||
      a.arena_bytes != b.arena_bytes || a.macs != b.macs ||
      !same_double(a.host_mean_us, b.host_mean_us) ||
      !same_double(a.host_p50_us, b.host_p50_us) ||
      !same_double(a.host_p95_us, b.host_p95_us) ||
      a.host_samples != b.host_samples || a.mcu.size() != b.mcu.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.mcu.size(); ++i) {
    const McuEstimate& x = a.mcu[i];
    const McuEstimate& y = b.mcu[i];
    if (x.mcu != y.mcu || !same_double(x.latency_ms, y.latency_ms) ||
        !same_double(x.energy_mj, y.energy_mj) || !(x.verdict == y.verdict)) {
      return false;
    }
  }
  return true;
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::vector<std::string> mcus;
  if (!reports.empty()) {
    for (const McuEstimate& m : reports.front().mcu) mcus.push_back(m.mcu);
  }
  std::string out;
  for (std::size_t i = 0; i < kFixed; ++i) {
    out += i ? "," : "";
    out += kFixedColumns[i];
  }
  for (const std::string& m : mcus) {
    for (std::string_view col : kMcuColumns) {
      out += "," + m + "_" + std::string(col);
    }
  }
  for (int t = 0; t < kNumClasses; ++t) {
    for (int p = 0; p < kNumClasses; ++p) {
      out += ",cm_" + std::to_string(t) + "_" + std::to_string(p);
    }
  }
  out += '\n';

  for (const EvalReport& r : reports) {
    if (r.mcu.size() != mcus.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "reports disagree on the MCU list");
    }
    std::vector<std::string> f = {
        std::string(to_string(r.config.architecture)),
        num(static_cast<std::uint64_t>(r.config.channels)),
        num(static_cast<std::uint64_t>(r.config.filters)),
        std::string(ir::to_string(r.config.precision)),
        sanitize(r.status),
        num(r.accuracy),
        num(r.macro_f1),
        num(r.model_size_bytes),
        num(r.arena_bytes),
        num(r.macs),
        num(r.host_mean_us),
        num(r.host_p50_us),
        num(r.host_p95_us),
        num(r.host_samples)};
    for (std::size_t i = 0; i < mcus.size(); ++i) {
      const McuEstimate& m = r.mcu[i];
      if (m.mcu != mcus[i]) {
        throw Error(ErrorCode::kShapeMismatch,
                    "reports disagree on the MCU order");
      }
      f.push_back(num(m.latency_ms));
      f.push_back(num(m.energy_mj));
      f.push_back(num(m.verdict.flash_needed));
      f.push_back(num(m.verdict.arena_needed));
      f.push_back(m.verdict.flash_ok ? "1" : "0");
      f.push_back(m.verdict.sram_ok ? "1" : "0");
    }
    for (const auto& row : r.confusion) {
      for (std::uint64_t v : row) f.push_back(num(v));
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      out += i ? "," : "";
      out += f[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<EvalReport> reports_from_csv(std::string_view csv) {
  std::vector<std::string_view> lines = split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kParse, "report CSV is empty");

  const std::vector<std::string_view> header = split(lines[0], ',');
  const std::size_t cm = kNumClasses * kNumClasses;
  if (header.size() < kFixed + cm || (header.size() - kFixed - cm) % kPerMcu) {
    throw Error(ErrorCode::kHeaderMismatch,
                "report CSV header has " + std::to_string(header.size()) +
                    " columns");
  }
  for (std::size_t i = 0; i < kFixed; ++i) {
    if (header[i] != kFixedColumns[i]) {
      throw Error(ErrorCode::kHeaderMismatch,
                  "report CSV column " + std::to_string(i + 1) + " is '" +
                      std::string(header[i]) + "'");
    }
  }
  const std::size_t num_mcus = (header.size() - kFixed - cm) / kPerMcu;
  std::vector<std::string> mcus;
  for (std::size_t i = 0; i < num_mcus; ++i) {
    const std::string_view col = header[kFixed + i * kPerMcu];
    const std::string suffix = "_" + std::string(kMcuColumns[0]);
    if (col.size() <= suffix.size() ||
        col.substr(col.size() - suffix.size()) != suffix) {
      throw Error(ErrorCode::kHeaderMismatch,
                  "unexpected MCU column '" + std::string(col) + "'");
    }
    mcus.emplace_back(col.substr(0, col.size() - suffix.size()));
  }

  std::vector<EvalReport> reports;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string_view> f = split(lines[row], ',');
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kParse, "report CSV row " + std::to_string(row) +
                                         " has " + std::to_string(f.size()) +
                                         " columns");
    }
    EvalReport r;
    r.config.architecture = parse_architecture(f[0]);
    r.config.channels = parse<std::size_t>(f[1], row);
    r.config.filters = parse<std::size_t>(f[2], row);
    r.config.precision = parse_precision(f[3]);
    r.status = std::string(f[4]);
    r.accuracy = parse<double>(f[5], row);
    r.macro_f1 = parse<double>(f[6], row);
    r.model_size_bytes = parse<std::uint64_t>(f[7], row);
    r.arena_bytes = parse<std::uint64_t>(f[8], row);
    r.macs = parse<std::uint64_t>(f[9], row);
    r.host_mean_us = parse<double>(f[10], row);
    r.host_p50_us = parse<double>(f[11], row);
    r.host_p95_us = parse<double>(f[12], row);
    r.host_samples = parse<std::uint64_t>(f[13], row);
    std::size_t k = kFixed;
    for (const std::string& name : mcus) {
      McuEstimate m;
      m.mcu = name;
      m.latency_ms = parse<double>(f[k++], row);
      m.energy_mj = parse<double>(f[k++], row);
      m.verdict.flash_needed = parse<std::uint64_t>(f[k++], row);
      m.verdict.arena_needed = parse<std::uint64_t>(f[k++], row);
      m.verdict.flash_ok = parse_bool(f[k++], row);
      m.verdict.sram_ok = parse_bool(f[k++], row);
      r.mcu.push_back(std::move(m));
    }
    for (auto& cm_row : r.confusion) {
      for (std::uint64_t& v : cm_row) v = parse<std::uint64_t>(f[k++], row);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string reports_to_markdown(std::span<const EvalReport> reports) {
  std::string md = "# Evaluation report\n\n## Accuracy and model size\n\n";
  md += "| Architecture | Channels | Filters | Precision | Macro F1 (%) | "
        "Accuracy (%) | Model size (KiB) | Status |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  for (const EvalReport& r : reports) {
    md += "| " + std::string(to_string(r.config.architecture)) + " | " +
          std::to_string(r.config.channels) + " | " +
          std::to_string(r.config.filters) + " | " +
          std::string(ir::to_string(r.config.precision)) + " | " +
          percent(r.macro_f1) + " | " + percent(r.accuracy) + " | " +
          fixed(static_cast<double>(r.model_size_bytes) / 1024.0, 2) + " | " +
          sanitize(r.status) + " |\n";
  }

  std::vector<std::string> mcus;
  if (!reports.empty()) {
    for (const McuEstimate& m : reports.front().mcu) mcus.push_back(m.mcu);
  }
  md += "\n## Estimated inference time and energy\n\n";
  md += "Cells read latency ms / energy mJ; an infeasible deployment is "
        "marked with the exhausted resource.\n\n";
  md += "| Architecture | Channels | Filters | Precision | Host mean (us)";
  for (const std::string& m : mcus) md += " | " + m;
  md += " |\n|---|---|---|---|---";
  for (std::size_t i = 0; i < mcus.size(); ++i) md += "|---";
  md += "|\n";
  for (const EvalReport& r : reports) {
    md += "| " + std::string(to_string(r.config.architecture)) + " | " +
          std::to_string(r.config.channels) + " | " +
          std::to_string(r.config.filters) + " | " +
          std::string(ir::to_string(r.config.precision)) + " | " +
          fixed(r.host_mean_us, 1);
    for (const McuEstimate& m : r.mcu) {
      md += " | ";
      if (m.verdict.feasible()) {
        md += fixed(m.latency_ms, 2) + " / " + fixed(m.energy_mj, 2);
      } else {
        md += "infeasible (";
        md += !m.verdict.flash_ok ? "flash" : "";
        md += !m.verdict.flash_ok && !m.verdict.sram_ok ? ", " : "";
        md += !m.verdict.sram_ok ? "SRAM" : "";
        md += ")";
      }
    }
    md += " |\n";
  }
  return md;
}

std::string confusion_svg(const ConfusionMatrix& matrix,
                          std::string_view title) {
  constexpr int kCell = 32;
  constexpr int kMargin = 60;
  constexpr int kSide = kMargin + kNumClasses * kCell + 20;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      std::to_string(kSide) + "\" height=\"" + std::to_string(kSide + 20) +
      "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg += "<text x=\"" + std::to_string(kMargin) + "\" y=\"16\" font-size=\"13\">" +
         xml_escape(title) + "</text>\n";
  svg += "<text x=\"" + std::to_string(kMargin) +
         "\" y=\"34\">predicted class</text>\n";
  svg += "<text x=\"12\" y=\"" + std::to_string(kMargin + 60) +
         "\" transform=\"rotate(-90 12 " + std::to_string(kMargin + 60) +
         ")\">true class</text>\n";
  for (int i = 0; i < kNumClasses; ++i) {
    const int pos = kMargin + i * kCell + kCell / 2;
    svg += "<text x=\"" + std::to_string(pos) + "\" y=\"" +
           std::to_string(kMargin - 6) + "\" text-anchor=\"middle\">" +
           std::to_string(i) + "</text>\n";
    svg += "<text x=\"" + std::to_string(kMargin - 6) + "\" y=\"" +
           std::to_string(pos + 4) + "\" text-anchor=\"end\">" +
           std::to_string(i) + "</text>\n";
  }
  for (int t = 0; t < kNumClasses; ++t) {
    std::uint64_t row_total = 0;
    for (std::uint64_t v : matrix[t]) row_total += v;
    for (int p = 0; p < kNumClasses; ++p) {
      const std::uint64_t v = matrix[t][p];
      const double rate =
          row_total ? static_cast<double>(v) / static_cast<double>(row_total)
                    : 0.0;
      const int shade = 255 - static_cast<int>(std::lround(rate * 200.0));
      const int x = kMargin + p * kCell;
      const int y = kMargin + t * kCell;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
             "\" width=\"" + std::to_string(kCell) + "\" height=\"" +
             std::to_string(kCell) + "\" fill=\"rgb(" + std::to_string(shade) +
             "," + std::to_string(shade) + ",255)\" stroke=\"#ccc\"/>\n";
      if (v) {
        svg += "<text x=\"" + std::to_string(x + kCell / 2) + "\" y=\"" +
               std::to_string(y + kCell / 2 + 4) +
               "\" text-anchor=\"middle\">" + std::to_string(v) + "</text>\n";
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

RenderedFiles render_report(std::span<const EvalReport> reports,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RenderedFiles files;
  files.markdown = dir / "report.md";
  files.csv = dir / "report.csv";
  write_text(files.markdown, reports_to_markdown(reports));
  write_text(files.csv, reports_to_csv(reports));
  for (const EvalReport& r : reports) {
    if (!r.has_accuracy()) continue;
    const std::string label = r.config.label();
    const std::filesystem::path svg = dir / ("confusion_" + label + ".svg");
    write_text(svg, confusion_svg(r.confusion, label));
    files.heatmaps.push_back(svg);
  }
  return files;
}

}  // namespace tinyhar::bench
