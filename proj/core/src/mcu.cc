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

#include "tinyhar/mcu.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tinyhar/error.h"

namespace tinyhar::bench {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::uint64_t activation_bytes(const Shape& s, ir::Precision precision) {
  return static_cast<std::uint64_t>(s.size()) *
         (precision == ir::Precision::kFloat32 ? 4u : 1u);
}

}  // namespace

void McuProfile::validate() const {
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "MCU profile without a name");
  }
  if (!(clock_mhz > 0.0) || flash_bytes == 0 || sram_bytes == 0 ||
      !(power_float_w > 0.0) || !(power_int8_w > 0.0) ||
      !(core_factor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "MCU profile " + name + " has a non-positive field");
  }
}

const std::vector<McuProfile>& builtin_profiles() {
  static const std::vector<McuProfile> profiles = {
      // No float power figure exists for this part; its draw is taken equal
      // to the int8 figure.
      {"nRF52840", "Cortex-M4F", 64.0, 1 * kMiB, 256 * kKiB, 0.10, 0.10,
       kCortexM4Factor},
      {"MIMXRT1062", "Cortex-M7", 600.0, 8 * kMiB, 1000 * kKiB, 0.78, 0.73,
       kCortexM7Factor},
      {"STM32L4S5", "Cortex-M4F", 120.0, 2 * kMiB, 640 * kKiB, 0.67, 0.62,
       kCortexM4Factor},
      {"STM32F767", "Cortex-M7", 216.0, 2 * kMiB, 512 * kKiB, 1.13, 1.08,
       kCortexM7Factor},
  };
  return profiles;
}

const McuProfile& find_profile(const std::vector<McuProfile>& profiles,
                               std::string_view name) {
  for (const McuProfile& p : profiles) {
    if (iequals(p.name, name)) return p;
  }
  std::string known;
  for (const McuProfile& p : profiles) {
    known += known.empty() ? "" : ", ";
    known += p.name;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown MCU profile '" + std::string(name) + "' (known: " +
                  known + ")");
}

std::string profiles_to_json(const std::vector<McuProfile>& profiles) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const McuProfile& p : profiles) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["core"] = p.core;
    j["clock_mhz"] = p.clock_mhz;
    j["flash_bytes"] = p.flash_bytes;
    j["sram_bytes"] = p.sram_bytes;
    j["power_float_w"] = p.power_float_w;
    j["power_int8_w"] = p.power_int8_w;
    j["core_factor"] = p.core_factor;
    list.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["profiles"] = std::move(list);
  return root.dump(2) + "\n";
}

std::vector<McuProfile> profiles_from_json(std::string_view text) {
  std::vector<McuProfile> profiles;
  try {
    const nlohmann::json root = nlohmann::json::parse(text);
    for (const nlohmann::json& j : root.at("profiles")) {
      McuProfile p;
      p.name = j.at("name").get<std::string>();
      p.core = j.value("core", std::string());
      p.clock_mhz = j.at("clock_mhz").get<double>();
      p.flash_bytes = j.at("flash_bytes").get<std::uint64_t>();
      p.sram_bytes = j.at("sram_bytes").get<std::uint64_t>();
      p.power_float_w = j.at("power_float_w").get<double>();
      p.power_int8_w = j.at("power_int8_w").get<double>();
      p.core_factor = j.at("core_factor").get<double>();
      p.validate();
      profiles.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse,
                std::string("MCU profile registry: ") + e.what());
  }
  if (profiles.empty()) {
    throw Error(ErrorCode::kParse, "MCU profile registry lists no profiles");
  }
  return profiles;
}

std::vector<McuProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return profiles_from_json(buf.str());
}

FeasibilityVerdict fits_on(std::uint64_t model_size, std::uint64_t arena,
                           const McuProfile& profile,
                           const RuntimeOverhead& overhead) {
  FeasibilityVerdict v;
  v.flash_needed = model_size + overhead.flash_bytes;
  v.arena_needed = arena + overhead.ram_bytes;
  v.flash_ok = v.flash_needed <= profile.flash_bytes;
  v.sram_ok = v.arena_needed <= profile.sram_bytes;
  return v;
}

std::uint64_t estimate_arena(const ir::ModelGraph& graph,
                             ir::Precision precision) {
  const std::vector<Shape> shapes = graph.layer_shapes();
  std::uint64_t peak = 0;
  Shape in = graph.input_shape;
  for (const Shape& out : shapes) {
    peak = std::max(peak, activation_bytes(in, precision) +
                              activation_bytes(out, precision));
    in = out;
  }
  return peak;
}

std::uint64_t estimate_arena(const QuantizedModel& model) {
  return estimate_arena(model.skeleton(), ir::Precision::kInt8Full);
}

std::uint64_t mac_count(const ir::ModelGraph& graph) {
  const std::vector<Shape> shapes = graph.layer_shapes();
  std::uint64_t macs = 0;
  Shape in = graph.input_shape;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const ir::LayerSpec& spec = graph.layers[i];
    const Shape& out = shapes[i];
    switch (spec.kind) {
      case ir::LayerKind::kConv1D:
        macs += static_cast<std::uint64_t>(out.steps) * spec.out *
                spec.kernel * spec.in;
        break;
      case ir::LayerKind::kDense:
        macs += static_cast<std::uint64_t>(spec.in) * spec.out;
        break;
      case ir::LayerKind::kLSTM:
        macs += static_cast<std::uint64_t>(in.steps) * 4 * spec.out *
                (spec.in + spec.out);
        break;
      default:
        break;
    }
    in = out;
  }
  return macs;
}

double estimate_latency_ms(std::uint64_t macs, ir::Precision precision,
                           const McuProfile& profile,
                           const LatencyModel& model) {
  const double cycles =
      static_cast<double>(macs) * model.cycles_per_mac(precision);
  return cycles / (profile.clock_mhz * 1e6 * profile.core_factor) * 1e3;
}

double estimate_latency_ms(const ir::ModelGraph& graph,
                           ir::Precision precision, const McuProfile& profile,
                           const LatencyModel& model) {
  return estimate_latency_ms(mac_count(graph), precision, profile, model);
}

double estimate_energy_mj(double latency_ms, const McuProfile& profile,
                          ir::Precision precision) {
  return profile.power_w(precision) * latency_ms;
}

}  // namespace tinyhar::bench
