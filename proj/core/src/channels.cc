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

#include "tinyhar/channels.h"

#include <numeric>

#include "tinyhar/error.h"

namespace tinyhar::data {
namespace {

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> v(end - begin);
  std::iota(v.begin(), v.end(), begin);
  return v;
}

}  // namespace

const std::vector<std::size_t>& channel_indices(ChannelGroup group) {
  static const std::vector<std::size_t> all = range(0, kNumChannels);
  static const std::vector<std::size_t> thermal =
      range(kThermalOffset, kNumChannels);
  static const std::vector<std::size_t> non_thermal = range(0, kThermalOffset);
  static const std::vector<std::size_t> reduced =
      range(kMagOffset, kThermalOffset);
  switch (group) {
    case ChannelGroup::kAll791: return all;
    case ChannelGroup::kThermal768: return thermal;
    case ChannelGroup::kNonThermal23: return non_thermal;
    case ChannelGroup::kReduced17: return reduced;
  }
  return all;
}

std::size_t channel_count(ChannelGroup group) {
  return channel_indices(group).size();
}

std::string_view to_string(ChannelGroup group) {
  switch (group) {
    case ChannelGroup::kAll791: return "791";
    case ChannelGroup::kThermal768: return "768";
    case ChannelGroup::kNonThermal23: return "23";
    case ChannelGroup::kReduced17: return "17";
  }
  return "?";
}

ChannelGroup parse_channel_group(std::string_view text) {
  for (ChannelGroup g : kAllChannelGroups) {
    if (text == to_string(g)) return g;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown channel group '" + std::string(text) +
                  "' (expected 791, 768, 23 or 17)");
}

const std::vector<std::string>& channel_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.reserve(kNumChannels);
    for (const char* axis : {"x", "y", "z"}) n.push_back(std::string("accel_") + axis);
    for (const char* axis : {"x", "y", "z"}) n.push_back(std::string("gyro_") + axis);
    for (const char* axis : {"x", "y", "z"}) n.push_back(std::string("mag_") + axis);
    n.push_back("barometer");
    n.push_back("distance");
    n.push_back("gas_co2");
    n.push_back("gas_tvoc");
    for (int i = 0; i < 10; ++i) n.push_back("optical_" + std::to_string(i));
    for (std::size_t i = 0; i < kThermalChannels; ++i) {
      n.push_back("thermal_" + std::to_string(i));
    }
    return n;
  }();
  return names;
}

}  // namespace tinyhar::data
