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

#ifndef TINYHAR_WINDOWING_H_
#define TINYHAR_WINDOWING_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tinyhar/channels.h"
#include "tinyhar/sensor_io.h"
#include "tinyhar/tensor.h"

namespace tinyhar::data {

inline constexpr double kSyncRateHz = 6.0;
inline constexpr double kSyncPeriodMs = 1000.0 / kSyncRateHz;

struct StreamSample {
  double timestamp_ms = 0.0;
  std::vector<float> values;  // one per entry of SensorStream::channels
};

// Samples of one sensor at its native rate. `channels` are frame indices.
struct SensorStream {
  std::vector<std::size_t> channels;
  std::vector<StreamSample> samples;
};

// Resamples streams onto a uniform grid by sample-and-hold. The grid starts
// at the earliest first timestamp and stops at the earliest last timestamp;
// ticks before every stream has produced a sample are dropped. Frame
// channels not covered by any stream are zero. Throws kEmptyStream for an
// empty stream list or stream, kNonMonotonic for a stream whose timestamps
// do not increase and kInvalidArgument for a channel index >= 791.
std::vector<SensorFrame> synchronize(std::span<const SensorStream> streams,
                                     double rate_hz = kSyncRateHz);

// Column projection of frames onto `group`, in ascending channel order.
Tensor2D select_channels(std::span<const SensorFrame> frames,
                         ChannelGroup group);

// A labeled frame sequence. Per-frame subject and session ids let several
// recordings share one sequence; windows never straddle an id change.
struct LabeledSequence {
  Tensor2D data;
  std::vector<int> labels;
  std::vector<int> subjects;
  std::vector<int> sessions;
};

LabeledSequence to_sequence(const Recording& recording, ChannelGroup group);

// Majority label; ties (including any tie involving the null class) map to
// the null class.
int majority_label(std::span<const int> labels);

// Sliding windows of `window_len` frames every `stride` frames, restarted at
// every (subject, session) change. Throws kInvalidArgument when window_len or
// stride is zero or the per-frame vectors disagree in length.
std::vector<WindowedSample> make_windows(const LabeledSequence& sequence,
                                         std::size_t window_len,
                                         std::size_t stride);

// Windows every recording of `dataset` after projecting onto `group`.
std::vector<WindowedSample> make_windows(const Dataset& dataset,
                                         ChannelGroup group,
                                         std::size_t window_len,
                                         std::size_t stride);

// Per-channel z-score statistics (population standard deviation).
struct DatasetStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t channels() const { return mean.size(); }
  bool operator==(const DatasetStats&) const = default;
};

// Channels whose deviation is below this pass through normalize unchanged.
inline constexpr double kMinStddev = 1e-9;

// Throws kEmptyDataset for no samples and kShapeMismatch when the windows
// disagree in channel count.
DatasetStats fit_stats(std::span<const WindowedSample> train);

// Throws kShapeMismatch when a window's channel count differs from the stats.
void normalize_in_place(std::span<WindowedSample> samples,
                        const DatasetStats& stats);
std::vector<WindowedSample> normalize(std::span<const WindowedSample> samples,
                                      const DatasetStats& stats);

void save_stats(const std::filesystem::path& path, const DatasetStats& stats);
DatasetStats load_stats(const std::filesystem::path& path);

struct SessionSplit {
  std::vector<WindowedSample> train;
  std::vector<WindowedSample> test;
};

// Leave-one-session-out split; input order is kept in both halves.
SessionSplit split_by_session(std::span<const WindowedSample> samples,
                              int held_out_session);

}  // namespace tinyhar::data

#endif  // TINYHAR_WINDOWING_H_
