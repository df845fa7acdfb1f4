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

#include "tinyhar/windowing.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"
#include "tinyhar/error.h"

namespace tinyhar::data {
namespace {

constexpr double kTickEpsilonMs = 1e-6;

}  // namespace

std::vector<SensorFrame> synchronize(std::span<const SensorStream> streams,
                                     double rate_hz) {
  if (!(rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sync rate must be positive");
  }
  if (streams.empty()) {
    throw Error(ErrorCode::kEmptyStream, "no sensor streams to synchronize");
  }
  double origin = 0.0;
  double end = 0.0;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const SensorStream& stream = streams[s];
    if (stream.samples.empty()) {
      throw Error(ErrorCode::kEmptyStream,
                  "stream " + std::to_string(s) + " has no samples");
    }
    for (std::size_t c : stream.channels) {
      if (c >= kNumChannels) {
        throw Error(ErrorCode::kInvalidArgument,
                    "stream " + std::to_string(s) + " maps to channel " +
                        std::to_string(c));
      }
    }
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
      if (stream.samples[i].values.size() != stream.channels.size()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "stream " + std::to_string(s) + " sample " +
                        std::to_string(i) + " has the wrong width");
      }
      if (i > 0 && !(stream.samples[i].timestamp_ms >
                     stream.samples[i - 1].timestamp_ms)) {
        throw Error(ErrorCode::kNonMonotonic,
                    "stream " + std::to_string(s) + " sample " +
                        std::to_string(i) + " does not advance in time");
      }
    }
    const double first = stream.samples.front().timestamp_ms;
    const double last = stream.samples.back().timestamp_ms;
    origin = s == 0 ? first : std::min(origin, first);
    end = s == 0 ? last : std::min(end, last);
  }

  const double period = 1000.0 / rate_hz;
  std::vector<std::size_t> cursor(streams.size(), 0);
  std::vector<SensorFrame> frames;
  for (std::size_t k = 0;; ++k) {
    const double tick = origin + static_cast<double>(k) * period;
    if (tick > end + kTickEpsilonMs) break;
    bool ready = true;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const auto& samples = streams[s].samples;
      std::size_t& i = cursor[s];
      while (i < samples.size() &&
             samples[i].timestamp_ms <= tick + kTickEpsilonMs) {
        ++i;
      }
      if (i == 0) ready = false;
    }
    if (!ready) continue;
    SensorFrame frame;
    frame.timestamp_ms = tick;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const StreamSample& held = streams[s].samples[cursor[s] - 1];
      for (std::size_t j = 0; j < streams[s].channels.size(); ++j) {
        frame.values[streams[s].channels[j]] = held.values[j];
      }
    }
    frames.push_back(frame);
  }
  return frames;
}

Tensor2D select_channels(std::span<const SensorFrame> frames,
                         ChannelGroup group) {
  const std::vector<std::size_t>& idx = channel_indices(group);
  Tensor2D out(frames.size(), idx.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::span<float> row = out.row(t);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      row[j] = frames[t].values[idx[j]];
    }
  }
  return out;
}

LabeledSequence to_sequence(const Recording& recording, ChannelGroup group) {
  if (recording.labels.size() != recording.frames.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "recording has " + std::to_string(recording.frames.size()) +
                    " frames but " + std::to_string(recording.labels.size()) +
                    " labels");
  }
  LabeledSequence seq;
  seq.data = select_channels(recording.frames, group);
  seq.labels = recording.labels;
  seq.subjects.assign(recording.frames.size(), recording.subject);
  seq.sessions.assign(recording.frames.size(), recording.session);
  return seq;
}

int majority_label(std::span<const int> labels) {
  std::array<std::size_t, kNumClasses> votes{};
  for (int l : labels) {
    if (l < 0 || l >= kNumClasses) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(l) + " outside 0..14");
    }
    ++votes[static_cast<std::size_t>(l)];
  }
  std::size_t best = 0;
  int winner = kNullClass;
  bool tied = false;
  for (int c = 0; c < kNumClasses; ++c) {
    const std::size_t v = votes[static_cast<std::size_t>(c)];
    if (v > best) {
      best = v;
      winner = c;
      tied = false;
    } else if (v == best && v > 0) {
      tied = true;
    }
  }
  return tied ? kNullClass : winner;
}

std::vector<WindowedSample> make_windows(const LabeledSequence& sequence,
                                         std::size_t window_len,
                                         std::size_t stride) {
  if (window_len == 0 || stride == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "window length and stride must be at least 1");
  }
  const std::size_t n = sequence.data.steps();
  if (sequence.labels.size() != n || sequence.subjects.size() != n ||
      sequence.sessions.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "sequence metadata does not match its frame count");
  }
  const std::size_t channels = sequence.data.channels();
  std::vector<WindowedSample> windows;
  std::size_t run_start = 0;
  while (run_start < n) {
    std::size_t run_end = run_start + 1;
    while (run_end < n &&
           sequence.subjects[run_end] == sequence.subjects[run_start] &&
           sequence.sessions[run_end] == sequence.sessions[run_start]) {
      ++run_end;
    }
    for (std::size_t s = run_start; s + window_len <= run_end; s += stride) {
      WindowedSample w;
      const float* begin = sequence.data.data().data() + s * channels;
      w.window = Tensor2D(window_len, channels,
                          std::vector<float>(begin, begin + window_len * channels));
      w.label = majority_label(
          std::span<const int>(sequence.labels).subspan(s, window_len));
      w.subject = sequence.subjects[s];
      w.session = sequence.sessions[s];
      windows.push_back(std::move(w));
    }
    run_start = run_end;
  }
  return windows;
}

std::vector<WindowedSample> make_windows(const Dataset& dataset,
                                         ChannelGroup group,
                                         std::size_t window_len,
                                         std::size_t stride) {
  std::vector<WindowedSample> all;
  for (const Recording& rec : dataset) {
    std::vector<WindowedSample> w =
        make_windows(to_sequence(rec, group), window_len, stride);
    std::move(w.begin(), w.end(), std::back_inserter(all));
  }
  return all;
}

DatasetStats fit_stats(std::span<const WindowedSample> train) {
  if (train.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit stats on no samples");
  }
  const std::size_t channels = train.front().window.channels();
  std::vector<double> sum(channels, 0.0);
  std::size_t rows = 0;
  for (const WindowedSample& s : train) {
    if (s.window.channels() != channels) {
      throw Error(ErrorCode::kShapeMismatch,
                  "training windows disagree in channel count");
    }
    for (std::size_t t = 0; t < s.window.steps(); ++t) {
      std::span<const float> row = s.window.row(t);
      for (std::size_t c = 0; c < channels; ++c) sum[c] += row[c];
    }
    rows += s.window.steps();
  }
  if (rows == 0) {
    throw Error(ErrorCode::kEmptyDataset, "training windows have no rows");
  }
  DatasetStats stats;
  stats.mean.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    stats.mean[c] = sum[c] / static_cast<double>(rows);
  }
  std::vector<double> sq(channels, 0.0);
  for (const WindowedSample& s : train) {
    for (std::size_t t = 0; t < s.window.steps(); ++t) {
      std::span<const float> row = s.window.row(t);
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = row[c] - stats.mean[c];
        sq[c] += d * d;
      }
    }
  }
  stats.stddev.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    stats.stddev[c] = std::sqrt(sq[c] / static_cast<double>(rows));
  }
  return stats;
}

void normalize_in_place(std::span<WindowedSample> samples,
                        const DatasetStats& stats) {
  const std::size_t channels = stats.channels();
  for (WindowedSample& s : samples) {
    if (s.window.channels() != channels) {
      throw Error(ErrorCode::kShapeMismatch,
                  "window has " + std::to_string(s.window.channels()) +
                      " channels, stats have " + std::to_string(channels));
    }
    for (std::size_t t = 0; t < s.window.steps(); ++t) {
      std::span<float> row = s.window.row(t);
      for (std::size_t c = 0; c < channels; ++c) {
        if (stats.stddev[c] < kMinStddev) continue;
        row[c] = static_cast<float>((row[c] - stats.mean[c]) / stats.stddev[c]);
      }
    }
  }
}

std::vector<WindowedSample> normalize(std::span<const WindowedSample> samples,
                                      const DatasetStats& stats) {
  std::vector<WindowedSample> out(samples.begin(), samples.end());
  normalize_in_place(out, stats);
  return out;
}

void save_stats(const std::filesystem::path& path, const DatasetStats& stats) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["stddev"] = stats.stddev;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

DatasetStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  DatasetStats stats;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    stats.mean = j.at("mean").get<std::vector<double>>();
    stats.stddev = j.at("stddev").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (stats.mean.size() != stats.stddev.size()) {
    throw Error(ErrorCode::kParse,
                path.string() + ": mean and stddev lengths differ");
  }
  return stats;
}

SessionSplit split_by_session(std::span<const WindowedSample> samples,
                              int held_out_session) {
  SessionSplit split;
  for (const WindowedSample& s : samples) {
    (s.session == held_out_session ? split.test : split.train).push_back(s);
  }
  return split;
}

}  // namespace tinyhar::data
