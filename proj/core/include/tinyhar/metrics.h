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

#ifndef TINYHAR_METRICS_H_
#define TINYHAR_METRICS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "tinyhar/tensor.h"

namespace tinyhar::bench {

// confusion[true][predicted].
using ConfusionMatrix =
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;

// All three throw kShapeMismatch on a length mismatch and kInvalidArgument
// for a label or prediction outside 0..14. Accuracy of an empty set is 0.
double accuracy(std::span<const int> predictions, std::span<const int> labels);
ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> labels);

// Unweighted mean of per-class F1 over classes 0..num_classes-1; a class
// that never occurs in either input contributes 0. Throws kInvalidArgument
// when num_classes is 0 or above 15, or an input class is >= num_classes.
double macro_f1(std::span<const int> predictions, std::span<const int> labels,
                std::size_t num_classes = kNumClasses);
double macro_f1(const ConfusionMatrix& matrix,
                std::size_t num_classes = kNumClasses);

std::uint64_t total(const ConfusionMatrix& matrix);
std::uint64_t trace(const ConfusionMatrix& matrix);

}  // namespace tinyhar::bench

#endif  // TINYHAR_METRICS_H_
