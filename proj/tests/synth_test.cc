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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "tinyhar/error.h"
#include "tinyhar/windowing.h"

namespace tinyhar::data {
namespace {

SynthConfig small_config(std::uint64_t seed = 7) {
  SynthConfig c;
  c.seed = seed;
  c.subjects = 2;
  c.duration_s = 300;
  return c;
}

const Dataset& small_dataset() {
  static const Dataset ds = synth_generate(small_config());
  return ds;
}

TEST(Synth, ShapeAndNumbering) {
  const Dataset& ds = small_dataset();
  ASSERT_EQ(ds.size(), 10u);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(ds[i].subject, int(i / 5) + 1);
    EXPECT_EQ(ds[i].session, int(i % 5) + 1);
    EXPECT_EQ(ds[i].frames.size(), ds[i].labels.size());
    // About 6 frames per second of session.
    EXPECT_NEAR(double(ds[i].frames.size()), 300.0 * 6.0, 12.0);
  }
}

TEST(Synth, SixHzGridAndFiniteValues) {
  for (const Recording& r : small_dataset()) {
    for (std::size_t k = 1; k < r.frames.size(); ++k) {
      ASSERT_NEAR(r.frames[k].timestamp_ms - r.frames[k - 1].timestamp_ms,
                  kSyncPeriodMs, 1e-6);
    }
    for (const SensorFrame& f : r.frames) {
      for (float v : f.values) ASSERT_TRUE(std::isfinite(v));
    }
    for (int l : r.labels) {
      ASSERT_GE(l, 0);
      ASSERT_LT(l, kNumClasses);
    }
  }
}

TEST(Synth, SameSeedIsBitIdentical) {
  EXPECT_EQ(synth_generate(small_config()), small_dataset());
  EXPECT_NE(synth_generate(small_config(8)), small_dataset());
}

TEST(Synth, NullClassIsMostFrequentAndAllClassesAppear) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const Recording& r : small_dataset()) {
    for (int l : r.labels) ++counts[std::size_t(l)];
  }
  for (int c = 1; c < kNumClasses; ++c) {
    EXPECT_GT(counts[0], counts[std::size_t(c)]) << "class " << c;
    EXPECT_GT(counts[std::size_t(c)], 0u) << "class " << c;
  }
}

TEST(Synth, ActivitySegmentsLastThreeToThirtySeconds) {
  for (const Recording& r : small_dataset()) {
    std::size_t start = 0;
    for (std::size_t k = 1; k <= r.labels.size(); ++k) {
      if (k < r.labels.size() && r.labels[k] == r.labels[start]) continue;
      const bool truncated = start == 0 || k == r.labels.size();
      const double seconds = double(k - start) / 6.0;
      if (!truncated) {
        EXPECT_GE(seconds, 3.0 - 0.34);
        EXPECT_LE(seconds, 30.0 + 0.34);
      }
      start = k;
    }
  }
}

// Nearest-centroid oracle on per-window channel means and deviations,
// trained on sessions 1-4 and scored on session 5.
double centroid_accuracy(const Dataset& ds, ChannelGroup group) {
  const std::vector<WindowedSample> windows = make_windows(ds, group, 24, 12);
  const SessionSplit split = split_by_session(windows, 5);
  const std::size_t c = channel_count(group);
  auto features = [&](const WindowedSample& s) {
    std::vector<double> f(2 * c, 0.0);
    const double n = double(s.window.steps());
    for (std::size_t t = 0; t < s.window.steps(); ++t) {
      for (std::size_t j = 0; j < c; ++j) f[j] += s.window.at(t, j) / n;
    }
    for (std::size_t t = 0; t < s.window.steps(); ++t) {
      for (std::size_t j = 0; j < c; ++j) {
        const double d = s.window.at(t, j) - f[j];
        f[c + j] += d * d / n;
      }
    }
    for (std::size_t j = 0; j < c; ++j) f[c + j] = std::sqrt(f[c + j]);
    return f;
  };
  std::vector<std::vector<double>> train;
  for (const WindowedSample& s : split.train) train.push_back(features(s));
  const std::size_t d = 2 * c;
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (const auto& f : train) {
    for (std::size_t k = 0; k < d; ++k) mu[k] += f[k] / double(train.size());
  }
  for (const auto& f : train) {
    for (std::size_t k = 0; k < d; ++k) {
      sd[k] += (f[k] - mu[k]) * (f[k] - mu[k]) / double(train.size());
    }
  }
  for (double& v : sd) v = std::sqrt(v) + 1e-9;
  std::vector<std::vector<double>> centroid(kNumClasses, std::vector<double>(d, 0.0));
  std::vector<double> n(kNumClasses, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto l = std::size_t(split.train[i].label);
    n[l] += 1;
    for (std::size_t k = 0; k < d; ++k) centroid[l][k] += (train[i][k] - mu[k]) / sd[k];
  }
  std::size_t hits = 0;
  for (const WindowedSample& s : split.test) {
    const std::vector<double> f = features(s);
    double best = INFINITY;
    int best_label = 0;
    for (std::size_t l = 0; l < std::size_t(kNumClasses); ++l) {
      if (n[l] == 0) continue;
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double z = (f[k] - mu[k]) / sd[k] - centroid[l][k] / n[l];
        dist += z * z;
      }
      if (dist < best) {
        best = dist;
        best_label = int(l);
      }
    }
    hits += best_label == s.label;
  }
  return double(hits) / double(split.test.size());
}

TEST(Synth, SignalIsLearnableByNearestCentroid) {
  for (ChannelGroup g : kAllChannelGroups) {
    EXPECT_GE(centroid_accuracy(small_dataset(), g), 0.80) << to_string(g);
  }
}

TEST(Synth, RejectsInvalidConfig) {
  SynthConfig c = small_config();
  c.subjects = 0;
  EXPECT_THROW(synth_generate(c), Error);
  c = small_config();
  c.duration_s = 3.0;  // 18 frames < 24-frame window
  EXPECT_THROW(synth_generate(c), Error);
  c = small_config();
  c.noise_scale = -1.0;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace tinyhar::data
