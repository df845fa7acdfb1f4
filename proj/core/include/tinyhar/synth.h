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

#ifndef TINYHAR_SYNTH_H_
#define TINYHAR_SYNTH_H_

#include <cstddef>
#include <cstdint>

#include "tinyhar/sensor_io.h"

namespace tinyhar::data {

struct SynthConfig {
  std::uint64_t seed = 7;
  int subjects = 3;
  int sessions_per_subject = 5;
  double duration_s = 600.0;     // per session
  std::size_t window_len = 24;   // only used to validate duration_s
  double noise_scale = 1.0;      // multiplies every sensor noise level

  // Throws kInvalidArgument unless counts are positive and a session holds
  // at least one window at 6 Hz.
  void validate() const;
};

// Kitchen-activity stand-in: each session alternates null segments of 3-12 s
// with activity segments of 3-30 s that cycle through shuffled rounds of
// classes 1..14. Every sensor is simulated at its native rate (IMU 12 Hz,
// barometer, distance and optical 6 Hz, gas and thermal 3 Hz) with a
// class-specific signature and seeded noise, then synchronized to 6 Hz.
// Class signatures are fixed across seeds; `seed` drives timelines, subject
// traits and noise. Subjects are numbered from 1, sessions from 1.
Dataset synth_generate(const SynthConfig& config);

}  // namespace tinyhar::data

#endif  // TINYHAR_SYNTH_H_
