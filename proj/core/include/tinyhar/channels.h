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

#ifndef TINYHAR_CHANNELS_H_
#define TINYHAR_CHANNELS_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tinyhar::data {

// Fixed channel order of a synchronized frame (and of the sensor CSV):
// IMU accel[3] gyro[3] mag[3], barometer, distance, gas[2] (CO2, TVOC),
// optical[10], thermal[768] (32 x 24 IR array, row-major).
inline constexpr std::size_t kNumChannels = 791;
inline constexpr std::size_t kAccelOffset = 0;
inline constexpr std::size_t kGyroOffset = 3;
inline constexpr std::size_t kMagOffset = 6;
inline constexpr std::size_t kBarometerOffset = 9;
inline constexpr std::size_t kDistanceOffset = 10;
inline constexpr std::size_t kGasOffset = 11;
inline constexpr std::size_t kOpticalOffset = 13;
inline constexpr std::size_t kThermalOffset = 23;
inline constexpr std::size_t kThermalWidth = 32;
inline constexpr std::size_t kThermalHeight = 24;
inline constexpr std::size_t kThermalChannels = kThermalWidth * kThermalHeight;

static_assert(kThermalOffset + kThermalChannels == kNumChannels);

struct SensorFrame {
  double timestamp_ms = 0.0;
  std::array<float, kNumChannels> values{};

  bool operator==(const SensorFrame&) const = default;
};

enum class ChannelGroup {
  kAll791,       // every channel
  kThermal768,   // IR array only
  kNonThermal23, // everything except the IR array
  kReduced17,    // kNonThermal23 without accelerometer and gyroscope
};

inline constexpr std::array<ChannelGroup, 4> kAllChannelGroups = {
    ChannelGroup::kReduced17, ChannelGroup::kNonThermal23,
    ChannelGroup::kThermal768, ChannelGroup::kAll791};

// Ascending frame indices retained by `group`.
const std::vector<std::size_t>& channel_indices(ChannelGroup group);
std::size_t channel_count(ChannelGroup group);

// "791", "768", "23" or "17".
std::string_view to_string(ChannelGroup group);
// Accepts the channel count as text; throws kInvalidArgument otherwise.
ChannelGroup parse_channel_group(std::string_view text);

// Column names in frame order, e.g. "accel_x", "thermal_767".
const std::vector<std::string>& channel_names();

}  // namespace tinyhar::data

#endif  // TINYHAR_CHANNELS_H_
