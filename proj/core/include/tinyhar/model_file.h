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

#ifndef TINYHAR_MODEL_FILE_H_
#define TINYHAR_MODEL_FILE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/quant_types.h"

namespace tinyhar::ir {

// Portable little-endian model container; see docs/model_format.md.
inline constexpr char kModelMagic[4] = {'T', 'H', 'A', 'R'};
inline constexpr std::uint32_t kModelVersion = 1;

std::vector<std::uint8_t> serialize(const ModelGraph& graph);
std::vector<std::uint8_t> serialize(const QuantizedModel& model);

using LoadedModel = std::variant<ModelGraph, QuantizedModel>;

// Throws kCorruptHeader, kVersionMismatch or kTruncatedPayload on malformed
// input; the decoded model is validated before it is returned.
LoadedModel deserialize(std::span<const std::uint8_t> bytes);

// Reads only the fixed header and returns the stored precision.
Precision peek_precision(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const ModelGraph& graph);
void save_model(const std::filesystem::path& path,
                const QuantizedModel& model);
LoadedModel load_model(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace tinyhar::ir

#endif  // TINYHAR_MODEL_FILE_H_
