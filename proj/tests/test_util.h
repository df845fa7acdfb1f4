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

// Shared generators and brute-force oracles for the test suites.

#ifndef TINYHAR_TESTS_TEST_UTIL_H_
#define TINYHAR_TESTS_TEST_UTIL_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "tinyhar/model_ir.h"
#include "tinyhar/tensor.h"

namespace tinyhar::testing {

// Hand-rolled generator for property tests; independent of tinyhar::Rng.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  std::vector<float> floats(std::size_t n, double lo, double hi) {
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(uniform(lo, hi));
    return v;
  }
  Tensor2D tensor(std::size_t steps, std::size_t channels, double lo = -1.0,
                  double hi = 1.0) {
    return Tensor2D(steps, channels, floats(steps * channels, lo, hi));
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Graph with one of each trainable layer small enough for fast tests.
inline ir::ModelGraph tiny_mc_cnn(std::size_t channels = 3,
                                  std::size_t window = 12,
                                  std::size_t filters = 8,
                                  std::uint64_t seed = 11) {
  ir::McCnnConfig c;
  c.channels = channels;
  c.window_len = window;
  c.first_filters = filters;
  c.dense_width = 16;
  c.seed = seed;
  return ir::build_mc_cnn(c);
}

// Per-class tallies counted pair by pair, independent of the confusion
// matrix used by the library.
struct MetricOracle {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_f1_pr = 0.0;  // via precision and recall
};

inline MetricOracle brute_force_metrics(std::span<const int> pred,
                                        std::span<const int> label,
                                        int num_classes = kNumClasses) {
  MetricOracle o;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == label[i];
  o.accuracy = pred.empty() ? 0.0 : double(hits) / double(pred.size());
  double sum = 0.0;
  double sum_pr = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && label[i] == c) ++tp;
      if (pred[i] == c && label[i] != c) ++fp;
      if (pred[i] != c && label[i] == c) ++fn;
    }
    if (tp > 0) {
      sum += 2.0 * double(tp) / double(2 * tp + fp + fn);
      const double p = double(tp) / double(tp + fp);
      const double r = double(tp) / double(tp + fn);
      sum_pr += 2.0 * p * r / (p + r);
    }
  }
  o.macro_f1 = sum / num_classes;
  o.macro_f1_pr = sum_pr / num_classes;
  return o;
}

// Imbalanced labels: class 0 about half the time.
inline std::vector<int> imbalanced_labels(Gen& g, std::size_t n) {
  std::vector<int> v(n);
  for (int& x : v) x = g.uniform(0, 1) < 0.5 ? 0 : g.integer(1, kNumClasses - 1);
  return v;
}

// Predictions that copy the label with probability `hit`.
inline std::vector<int> noisy_predictions(Gen& g, std::span<const int> labels,
                                          double hit) {
  std::vector<int> v(labels.begin(), labels.end());
  for (int& x : v) {
    if (g.uniform(0, 1) >= hit) x = g.integer(0, kNumClasses - 1);
  }
  return v;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("tinyhar_tests_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tinyhar::testing

#endif  // TINYHAR_TESTS_TEST_UTIL_H_
