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

#include "tinyhar/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "tinyhar/error.h"
#include "tinyhar/random.h"
#include "tinyhar/tensor.h"
#include "tinyhar/windowing.h"

namespace tinyhar::data {
namespace {

constexpr std::uint64_t kTemplateSeed = 0x7a3c5e11d2b4f609ULL;
constexpr int kActivities = kNumClasses - 1;
constexpr double kGravity = 9.81;
constexpr double kSeaLevelHpa = 1013.25;
constexpr double kGasLagS = 3.0;

struct ClassSignature {
  double imu_freq_hz = 0.0;
  double imu_amp = 0.0;
  std::array<double, 3> accel_base{};
  std::array<double, 3> mag{};
  double baro_offset_hpa = 0.0;
  double distance_mm = 0.0;
  std::array<double, 2> gas{};
  std::array<double, 10> optical{};
  bool blob = false;
  double blob_x = 0.0;
  double blob_y = 0.0;
  double blob_temp = 0.0;
  double blob_radius = 0.0;
};

struct SubjectTraits {
  double imu_gain = 1.0;
  double distance_offset = 0.0;
  double blob_shift_x = 0.0;
  double blob_shift_y = 0.0;
};

struct Segment {
  double start_s;
  double end_s;
  int label;
  double phase;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

// Value i of an evenly spaced grid, visited in a shuffled order per feature
// so that no two classes share a level of any one feature.
std::vector<double> shuffled_grid(double lo, double step, Rng& rng) {
  std::vector<double> g(kActivities);
  for (int i = 0; i < kActivities; ++i) g[i] = lo + step * i;
  shuffle(g, rng);
  return g;
}

const std::array<ClassSignature, kNumClasses>& signatures() {
  static const std::array<ClassSignature, kNumClasses> table = [] {
    std::array<ClassSignature, kNumClasses> t{};
    Rng rng(kTemplateSeed);

    ClassSignature& null = t[kNullClass];
    null.imu_freq_hz = 0.3;
    null.imu_amp = 0.05;
    null.accel_base = {0.0, 0.0, kGravity};
    null.mag = {20.0, -5.0, 40.0};
    null.distance_mm = 1800.0;
    null.gas = {420.0, 40.0};
    null.optical.fill(110.0);

    const auto freq = shuffled_grid(0.5, 0.15, rng);
    const auto amp = shuffled_grid(0.6, 0.2, rng);
    const auto tilt = shuffled_grid(0.0, 4.0 * std::numbers::pi / 180.0, rng);
    const auto baro = shuffled_grid(-0.65, 0.1, rng);
    const auto dist = shuffled_grid(300.0, 100.0, rng);
    const auto co2 = shuffled_grid(460.0, 50.0, rng);
    const auto tvoc = shuffled_grid(60.0, 45.0, rng);
    std::vector<std::pair<int, int>> cells;
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 5; ++x) cells.emplace_back(x, y);
    }
    shuffle(cells, rng);

    for (int k = 1; k <= kActivities; ++k) {
      ClassSignature& s = t[static_cast<std::size_t>(k)];
      const std::size_t i = static_cast<std::size_t>(k - 1);
      s.imu_freq_hz = freq[i];
      s.imu_amp = amp[i];
      const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
      s.accel_base = {kGravity * std::sin(tilt[i]) * std::cos(az),
                      kGravity * std::sin(tilt[i]) * std::sin(az),
                      kGravity * std::cos(tilt[i])};
      const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
      s.mag = {45.0 * std::cos(heading), 45.0 * std::sin(heading),
               rng.uniform(-20.0, 40.0)};
      s.baro_offset_hpa = baro[i];
      s.distance_mm = dist[i];
      s.gas = {co2[i], tvoc[i]};
      for (double& o : s.optical) o = rng.uniform(20.0, 220.0);
      s.blob = true;
      s.blob_x = 3.5 + 6.0 * cells[i].first;
      s.blob_y = 4.0 + 7.5 * cells[i].second;
      s.blob_temp = rng.uniform(6.0, 10.0);
      s.blob_radius = rng.uniform(2.0, 3.5);
    }
    return t;
  }();
  return table;
}

std::vector<Segment> make_timeline(double duration_s, Rng& rng) {
  std::vector<Segment> timeline;
  std::vector<int> round;
  double t = 0.0;
  bool activity = false;
  while (t < duration_s) {
    Segment seg;
    seg.start_s = t;
    seg.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (activity) {
      if (round.empty()) {
        round.resize(kActivities);
        std::iota(round.begin(), round.end(), 1);
        shuffle(round, rng);
      }
      seg.label = round.back();
      round.pop_back();
      seg.end_s = t + rng.uniform(3.0, 30.0);
    } else {
      seg.label = kNullClass;
      seg.end_s = t + rng.uniform(3.0, 12.0);
    }
    timeline.push_back(seg);
    t = seg.end_s;
    activity = !activity;
  }
  return timeline;
}

class Timeline {
 public:
  explicit Timeline(std::vector<Segment> segments)
      : segments_(std::move(segments)) {}

  const Segment& at(double t_s) const {
    auto it = std::upper_bound(
        segments_.begin(), segments_.end(), t_s,
        [](double t, const Segment& s) { return t < s.start_s; });
    return it == segments_.begin() ? segments_.front() : *(it - 1);
  }

 private:
  std::vector<Segment> segments_;
};

std::vector<std::size_t> iota_channels(std::size_t offset, std::size_t n) {
  std::vector<std::size_t> c(n);
  std::iota(c.begin(), c.end(), offset);
  return c;
}

// Sample instants of a sensor at `rate_hz`, starting at a random phase.
std::vector<double> sample_times(double rate_hz, double duration_s, Rng& rng) {
  const double period_ms = 1000.0 / rate_hz;
  const double start = rng.uniform(0.0, period_ms);
  std::vector<double> times;
  for (std::size_t i = 0;; ++i) {
    const double t = start + period_ms * static_cast<double>(i);
    if (t > duration_s * 1000.0) break;
    times.push_back(t);
  }
  return times;
}

Recording generate_session(const SynthConfig& cfg, int subject, int session,
                           const SubjectTraits& traits) {
  const auto& sig = signatures();
  Rng rng(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(subject) << 32 |
                             static_cast<std::uint32_t>(session))));
  const Timeline timeline(make_timeline(cfg.duration_s, rng));
  const double ns = cfg.noise_scale;
  const double baro_drift = rng.normal(0.0, 0.02);

  std::vector<SensorStream> streams;

  {
    SensorStream imu;
    imu.channels = iota_channels(kAccelOffset, 9);
    for (double t_ms : sample_times(12.0, cfg.duration_s, rng)) {
      const double t = t_ms / 1000.0;
      const Segment& seg = timeline.at(t);
      const ClassSignature& s = sig[static_cast<std::size_t>(seg.label)];
      const double w = 2.0 * std::numbers::pi * s.imu_freq_hz * t + seg.phase;
      const double a = s.imu_amp * traits.imu_gain;
      StreamSample sample{t_ms, std::vector<float>(9)};
      for (int j = 0; j < 3; ++j) {
        const double axis = 1.0 - 0.3 * j;
        sample.values[j] = static_cast<float>(
            s.accel_base[j] + a * axis * std::sin(w + 0.7 * j) +
            rng.normal(0.0, 0.15 * ns));
        sample.values[3 + j] = static_cast<float>(
            0.5 * a * axis * std::cos(w + 0.4 * j) +
            rng.normal(0.0, 0.05 * ns));
        sample.values[6 + j] =
            static_cast<float>(s.mag[j] + rng.normal(0.0, 1.0 * ns));
      }
      imu.samples.push_back(std::move(sample));
    }
    streams.push_back(std::move(imu));
  }

  auto scalar_stream = [&](std::size_t channel, double rate_hz, auto value) {
    SensorStream st;
    st.channels = {channel};
    for (double t_ms : sample_times(rate_hz, cfg.duration_s, rng)) {
      const ClassSignature& s =
          sig[static_cast<std::size_t>(timeline.at(t_ms / 1000.0).label)];
      st.samples.push_back({t_ms, {static_cast<float>(value(s))}});
    }
    streams.push_back(std::move(st));
  };
  scalar_stream(kBarometerOffset, 6.0, [&](const ClassSignature& s) {
    return kSeaLevelHpa + baro_drift + s.baro_offset_hpa +
           rng.normal(0.0, 0.03 * ns);
  });
  scalar_stream(kDistanceOffset, 6.0, [&](const ClassSignature& s) {
    return s.distance_mm + traits.distance_offset +
           rng.normal(0.0, 25.0 * ns);
  });

  {
    SensorStream gas;
    gas.channels = iota_channels(kGasOffset, 2);
    std::array<double, 2> level = sig[kNullClass].gas;
    double prev_s = 0.0;
    for (double t_ms : sample_times(3.0, cfg.duration_s, rng)) {
      const double t = t_ms / 1000.0;
      const ClassSignature& s = sig[static_cast<std::size_t>(timeline.at(t).label)];
      const double alpha = 1.0 - std::exp(-(t - prev_s) / kGasLagS);
      prev_s = t;
      StreamSample sample{t_ms, std::vector<float>(2)};
      for (int j = 0; j < 2; ++j) {
        level[j] += (s.gas[j] - level[j]) * alpha;
        sample.values[j] =
            static_cast<float>(level[j] + rng.normal(0.0, 8.0 * ns));
      }
      gas.samples.push_back(std::move(sample));
    }
    streams.push_back(std::move(gas));
  }

  {
    SensorStream optical;
    optical.channels = iota_channels(kOpticalOffset, 10);
    for (double t_ms : sample_times(6.0, cfg.duration_s, rng)) {
      const ClassSignature& s =
          sig[static_cast<std::size_t>(timeline.at(t_ms / 1000.0).label)];
      StreamSample sample{t_ms, std::vector<float>(10)};
      for (int j = 0; j < 10; ++j) {
        sample.values[j] =
            static_cast<float>(s.optical[j] + rng.normal(0.0, 5.0 * ns));
      }
      optical.samples.push_back(std::move(sample));
    }
    streams.push_back(std::move(optical));
  }

  {
    SensorStream thermal;
    thermal.channels = iota_channels(kThermalOffset, kThermalChannels);
    for (double t_ms : sample_times(3.0, cfg.duration_s, rng)) {
      const ClassSignature& s =
          sig[static_cast<std::size_t>(timeline.at(t_ms / 1000.0).label)];
      StreamSample sample{t_ms, std::vector<float>(kThermalChannels)};
      const double cx = s.blob_x + traits.blob_shift_x;
      const double cy = s.blob_y + traits.blob_shift_y;
      const double inv = s.blob ? 1.0 / (2.0 * s.blob_radius * s.blob_radius)
                                : 0.0;
      for (std::size_t y = 0; y < kThermalHeight; ++y) {
        for (std::size_t x = 0; x < kThermalWidth; ++x) {
          double v = 21.0 + rng.normal(0.0, 0.3 * ns);
          if (s.blob) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            v += s.blob_temp * std::exp(-(dx * dx + dy * dy) * inv);
          }
          sample.values[y * kThermalWidth + x] = static_cast<float>(v);
        }
      }
      thermal.samples.push_back(std::move(sample));
    }
    streams.push_back(std::move(thermal));
  }

  Recording rec;
  rec.subject = subject;
  rec.session = session;
  rec.frames = synchronize(streams);
  rec.labels.reserve(rec.frames.size());
  for (const SensorFrame& f : rec.frames) {
    rec.labels.push_back(timeline.at(f.timestamp_ms / 1000.0).label);
  }
  return rec;
}

}  // namespace

void SynthConfig::validate() const {
  if (subjects < 1 || sessions_per_subject < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "subjects and sessions_per_subject must be at least 1");
  }
  if (window_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window_len must be at least 1");
  }
  if (!(duration_s * kSyncRateHz >= static_cast<double>(window_len))) {
    throw Error(ErrorCode::kInvalidArgument,
                "duration_s must cover one window of " +
                    std::to_string(window_len) + " samples at 6 Hz");
  }
  if (!(noise_scale >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_scale must be >= 0");
  }
}

Dataset synth_generate(const SynthConfig& config) {
  config.validate();
  Rng subject_rng(mix(config.seed));
  Dataset dataset;
  for (int subject = 1; subject <= config.subjects; ++subject) {
    SubjectTraits traits;
    traits.imu_gain = subject_rng.uniform(0.9, 1.1);
    traits.distance_offset = subject_rng.normal(0.0, 20.0);
    traits.blob_shift_x = subject_rng.uniform(-0.5, 0.5);
    traits.blob_shift_y = subject_rng.uniform(-0.5, 0.5);
    for (int session = 1; session <= config.sessions_per_subject; ++session) {
      dataset.push_back(generate_session(config, subject, session, traits));
    }
  }
  return dataset;
}

}  // namespace tinyhar::data
