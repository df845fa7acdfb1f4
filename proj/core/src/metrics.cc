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

#include "tinyhar/metrics.h"

#include <string>

#include "tinyhar/error.h"

namespace tinyhar::bench {
namespace {

void check_inputs(std::span<const int> predictions,
                  std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kNumClasses || predictions[i] < 0 ||
        predictions[i] >= kNumClasses) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class id outside 0..14 at index " + std::to_string(i));
    }
  }
}

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  check_inputs(predictions, labels);
  if (labels.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += predictions[i] == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> labels) {
  check_inputs(predictions, labels);
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++m[static_cast<std::size_t>(labels[i])]
       [static_cast<std::size_t>(predictions[i])];
  }
  return m;
}

double macro_f1(const ConfusionMatrix& m, std::size_t num_classes) {
  if (num_classes == 0 || num_classes > kNumClasses) {
    throw Error(ErrorCode::kInvalidArgument,
                "num_classes must lie in 1..15");
  }
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if ((r >= num_classes || k >= num_classes) && m[r][k] != 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "class id at or above num_classes");
      }
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      predicted += m[k][c];
      actual += m[c][k];
    }
    const std::uint64_t tp = m[c][c];
    // F1 = 2 TP / (predicted + actual), which is 0 when TP is 0.
    if (tp > 0) {
      sum += 2.0 * static_cast<double>(tp) /
             static_cast<double>(predicted + actual);
    }
  }
  return sum / static_cast<double>(num_classes);
}

double macro_f1(std::span<const int> predictions, std::span<const int> labels,
                std::size_t num_classes) {
  return macro_f1(confusion(predictions, labels), num_classes);
}

std::uint64_t total(const ConfusionMatrix& matrix) {
  std::uint64_t n = 0;
  for (const auto& row : matrix) {
    for (std::uint64_t v : row) n += v;
  }
  return n;
}

std::uint64_t trace(const ConfusionMatrix& matrix) {
  std::uint64_t n = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) n += matrix[c][c];
  return n;
}

}  // namespace tinyhar::bench
