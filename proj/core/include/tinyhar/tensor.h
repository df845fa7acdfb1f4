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

#ifndef TINYHAR_TENSOR_H_
#define TINYHAR_TENSOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tinyhar {

// (time_steps, channels). Dense layers see a single-step tensor.
struct Shape {
  std::size_t steps = 0;
  std::size_t channels = 0;

  std::size_t size() const { return steps * channels; }
  bool operator==(const Shape&) const = default;
};

// Row-major (time, channel) float tensor. Row t holds the readings of all
// channels at time step t, so a window of k consecutive rows is contiguous.
class Tensor2D {
 public:
  Tensor2D() = default;
  Tensor2D(std::size_t steps, std::size_t channels);
  Tensor2D(std::size_t steps, std::size_t channels, std::vector<float> data);

  std::size_t steps() const { return steps_; }
  std::size_t channels() const { return channels_; }
  Shape shape() const { return {steps_, channels_}; }
  std::size_t size() const { return data_.size(); }

  float& at(std::size_t t, std::size_t c) { return data_[t * channels_ + c]; }
  float at(std::size_t t, std::size_t c) const {
    return data_[t * channels_ + c];
  }

  std::span<float> row(std::size_t t) {
    return {data_.data() + t * channels_, channels_};
  }
  std::span<const float> row(std::size_t t) const {
    return {data_.data() + t * channels_, channels_};
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool all_finite() const;

  bool operator==(const Tensor2D&) const = default;

 private:
  std::size_t steps_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

// One classification input: a (window_len x channels) slice of a single
// recording session together with its activity label.
struct WindowedSample {
  Tensor2D window;
  int label = 0;
  int subject = 0;
  int session = 0;
};

inline constexpr int kNumClasses = 15;
inline constexpr int kNullClass = 0;

}  // namespace tinyhar

#endif  // TINYHAR_TENSOR_H_
