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

#ifndef TINYHAR_MCU_H_
#define TINYHAR_MCU_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tinyhar/model_ir.h"
#include "tinyhar/quant_types.h"

namespace tinyhar::bench {

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * kKiB;

// Relative MAC throughput per clock of the two core classes.
inline constexpr double kCortexM7Factor = 1.0;
inline constexpr double kCortexM4Factor = 0.25;

struct McuProfile {
  std::string name;
  std::string core;            // informational, e.g. "Cortex-M7"
  double clock_mhz = 0.0;
  std::uint64_t flash_bytes = 0;
  std::uint64_t sram_bytes = 0;
  double power_float_w = 0.0;  // average draw during float inference
  double power_int8_w = 0.0;   // average draw during int8 inference
  double core_factor = 1.0;

  double power_w(ir::Precision precision) const {
    return precision == ir::Precision::kFloat32 ? power_float_w : power_int8_w;
  }

  // Throws kInvalidArgument unless every numeric field is positive and the
  // name is non-empty.
  void validate() const;

  bool operator==(const McuProfile&) const = default;
};

// nRF52840, MIMXRT1062, STM32L4S5, STM32F767.
const std::vector<McuProfile>& builtin_profiles();

// Case-insensitive lookup; throws kInvalidArgument naming the known profiles.
const McuProfile& find_profile(const std::vector<McuProfile>& profiles,
                               std::string_view name);

// JSON registry: {"profiles": [{"name": ..., "core": ..., "clock_mhz": ...,
// "flash_bytes": ..., "sram_bytes": ..., "power_float_w": ...,
// "power_int8_w": ..., "core_factor": ...}, ...]}.
std::string profiles_to_json(const std::vector<McuProfile>& profiles);
std::vector<McuProfile> profiles_from_json(std::string_view text);
std::vector<McuProfile> load_profiles(const std::filesystem::path& path);

// Firmware plus inference runtime footprint reserved on the target.
struct RuntimeOverhead {
  std::uint64_t flash_bytes = 256 * kKiB;
  std::uint64_t ram_bytes = 64 * kKiB;
};

struct FeasibilityVerdict {
  bool flash_ok = false;
  bool sram_ok = false;
  std::uint64_t flash_needed = 0;  // model + flash overhead
  std::uint64_t arena_needed = 0;  // arena + RAM overhead

  bool feasible() const { return flash_ok && sram_ok; }
  bool operator==(const FeasibilityVerdict&) const = default;
};

FeasibilityVerdict fits_on(std::uint64_t model_size, std::uint64_t arena,
                           const McuProfile& profile,
                           const RuntimeOverhead& overhead = {});

// Peak over layers of input plus output activation bytes at `precision`
// (4 bytes per float element, 1 per int8 element).
std::uint64_t estimate_arena(const ir::ModelGraph& graph,
                             ir::Precision precision);
std::uint64_t estimate_arena(const QuantizedModel& model);

// Multiply-accumulates of one inference. Conv1D, Dense and LSTM contribute;
// element-wise and pooling layers are free.
std::uint64_t mac_count(const ir::ModelGraph& graph);

struct LatencyModel {
  double int8_cycles_per_mac = 1.0;
  double float_penalty = 8.0;  // float cycles per MAC relative to int8

  double cycles_per_mac(ir::Precision precision) const {
    return precision == ir::Precision::kFloat32
               ? int8_cycles_per_mac * float_penalty
               : int8_cycles_per_mac;
  }
};

// macs * cycles_per_mac / (clock * core_factor), in milliseconds.
double estimate_latency_ms(std::uint64_t macs, ir::Precision precision,
                           const McuProfile& profile,
                           const LatencyModel& model = {});
double estimate_latency_ms(const ir::ModelGraph& graph,
                           ir::Precision precision, const McuProfile& profile,
                           const LatencyModel& model = {});

// power(precision) * latency; W * ms = mJ.
double estimate_energy_mj(double latency_ms, const McuProfile& profile,
                          ir::Precision precision);

}  // namespace tinyhar::bench

#endif  // TINYHAR_MCU_H_
