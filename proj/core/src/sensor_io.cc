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

#include "tinyhar/sensor_io.h"

#include <charconv>
#include <fstream>
#include <string_view>
#include <system_error>

#include "tinyhar/error.h"
#include "tinyhar/tensor.h"

namespace tinyhar::data {
namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <typename T>
T parse_number(std::string_view field, const std::filesystem::path& path,
               std::size_t line, std::size_t column) {
  T value{};
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse,
                location(path, line) + ": column " + std::to_string(column) +
                    " holds '" + std::string(field) + "', not a number");
  }
  return value;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void append_number(std::string& out, float v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string csv_header() {
  std::string h = "timestamp_ms";
  for (const std::string& name : channel_names()) {
    h += ',';
    h += name;
  }
  h += ",label";
  return h;
}

Recording ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kHeaderMismatch,
                location(path, 1) + ": file is empty, expected header");
  }
  strip_cr(line);
  if (line != csv_header()) {
    const std::size_t columns = split(line).size();
    throw Error(ErrorCode::kHeaderMismatch,
                location(path, 1) + ": header has " + std::to_string(columns) +
                    " columns or unexpected names; expected the 793-column "
                    "layout timestamp_ms, 791 channels, label");
  }
  Recording rec;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split(line);
    if (fields.size() != kNumChannels + 2) {
      throw Error(ErrorCode::kParse,
                  location(path, line_no) + ": row has " +
                      std::to_string(fields.size()) + " columns, expected " +
                      std::to_string(kNumChannels + 2));
    }
    SensorFrame frame;
    frame.timestamp_ms = parse_number<double>(fields[0], path, line_no, 1);
    if (!rec.frames.empty() &&
        !(frame.timestamp_ms > rec.frames.back().timestamp_ms)) {
      throw Error(ErrorCode::kNonMonotonic,
                  location(path, line_no) + ": timestamp " +
                      std::string(fields[0]) +
                      " does not increase over the previous row");
    }
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      frame.values[c] = parse_number<float>(fields[c + 1], path, line_no, c + 2);
    }
    const int label =
        parse_number<int>(fields.back(), path, line_no, kNumChannels + 2);
    if (label < 0 || label >= kNumClasses) {
      throw Error(ErrorCode::kParse,
                  location(path, line_no) + ": label " +
                      std::string(fields.back()) + " outside 0.." +
                      std::to_string(kNumClasses - 1));
    }
    rec.frames.push_back(frame);
    rec.labels.push_back(label);
  }
  return rec;
}

void write_csv(const std::filesystem::path& path, const Recording& recording) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << csv_header() << '\n';
  std::string row;
  for (std::size_t i = 0; i < recording.frames.size(); ++i) {
    const SensorFrame& f = recording.frames[i];
    row.clear();
    append_number(row, f.timestamp_ms);
    for (float v : f.values) {
      row += ',';
      append_number(row, v);
    }
    row += ',';
    row += std::to_string(recording.labels[i]);
    row += '\n';
    out << row;
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || (strip_cr(line), line != "subject,session,path")) {
    throw Error(ErrorCode::kHeaderMismatch,
                location(path, 1) + ": expected header subject,session,path");
  }
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string_view> f = split(line);
    if (f.size() != 3) {
      throw Error(ErrorCode::kParse,
                  location(path, line_no) + ": expected 3 columns");
    }
    ManifestEntry e;
    e.subject = parse_number<int>(f[0], path, line_no, 1);
    e.session = parse_number<int>(f[1], path, line_no, 2);
    e.path = std::string(f[2]);
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "subject,session,path\n";
  for (const ManifestEntry& e : entries) {
    out << e.subject << ',' << e.session << ',' << e.path.generic_string()
        << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& manifest) {
  const std::filesystem::path base = manifest.parent_path();
  Dataset dataset;
  for (const ManifestEntry& e : read_manifest(manifest)) {
    const std::filesystem::path file =
        e.path.is_absolute() ? e.path : base / e.path;
    Recording rec = ingest_csv(file);
    rec.subject = e.subject;
    rec.session = e.session;
    dataset.push_back(std::move(rec));
  }
  return dataset;
}

std::filesystem::path save_dataset(const std::filesystem::path& dir,
                                   const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (const Recording& rec : dataset) {
    ManifestEntry e;
    e.subject = rec.subject;
    e.session = rec.session;
    e.path = "subject" + std::to_string(rec.subject) + "_session" +
             std::to_string(rec.session) + ".csv";
    write_csv(dir / e.path, rec);
    entries.push_back(std::move(e));
  }
  const std::filesystem::path manifest = dir / "manifest.csv";
  write_manifest(manifest, entries);
  return manifest;
}

}  // namespace tinyhar::data
