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

#ifndef TINYHAR_SENSOR_IO_H_
#define TINYHAR_SENSOR_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "tinyhar/channels.h"

namespace tinyhar::data {

// One synchronized recording session of one subject.
struct Recording {
  int subject = 0;
  int session = 0;
  std::vector<SensorFrame> frames;
  std::vector<int> labels;

  bool operator==(const Recording&) const = default;
};

using Dataset = std::vector<Recording>;

// Header: timestamp_ms, the 791 channel names, label (793 columns).
std::string csv_header();

// Parses a sensor CSV. Throws kHeaderMismatch when the header differs from
// csv_header(), kNonMonotonic when a timestamp does not increase, and kParse
// for malformed rows; every message names the offending line. The returned
// recording has subject = session = 0.
Recording ingest_csv(const std::filesystem::path& path);

// Values are written in shortest round-trip form, so ingest_csv reproduces
// them exactly.
void write_csv(const std::filesystem::path& path, const Recording& recording);

struct ManifestEntry {
  int subject = 0;
  int session = 0;
  std::filesystem::path path;  // relative to the manifest's directory
};

// "subject,session,path" CSV.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

// Loads every recording named by a manifest.
Dataset load_dataset(const std::filesystem::path& manifest);

// Writes one CSV per recording plus manifest.csv into `dir`; returns the
// manifest path.
std::filesystem::path save_dataset(const std::filesystem::path& dir,
                                   const Dataset& dataset);

}  // namespace tinyhar::data

#endif  // TINYHAR_SENSOR_IO_H_
