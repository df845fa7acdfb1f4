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

#include "tinyhar/model_file.h"

#include <gtest/gtest.h>

#include <cstring>
#include <vector>

#include "test_util.h"
#include "tinyhar/error.h"
#include "tinyhar/quantizer.h"

namespace tinyhar::ir {
namespace {

using testing::Gen;
using testing::tiny_mc_cnn;

ErrorCode decode_error(std::span<const std::uint8_t> bytes) {
  try {
    deserialize(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "malformed bytes were accepted";
  return ErrorCode::kIo;
}

QuantizedModel quantized_tiny(std::uint64_t seed) {
  const ModelGraph g = tiny_mc_cnn(3, 12, 8, seed);
  Gen gen(seed);
  std::vector<Tensor2D> calib;
  for (int i = 0; i < 16; ++i) calib.push_back(gen.tensor(12, 3));
  return quant::quantize_model(g, calib);
}

ModelGraph small_lstm_graph() {
  DeepConvLstmConfig c;
  c.channels = 4;
  c.window_len = 12;
  c.filters = 4;
  c.hidden = 6;
  return build_deep_conv_lstm(c);
}

TEST(ModelFile, DenseSoftmaxFileIsExactly740Bytes) {
  ModelGraph g;
  g.input_shape = {1, 10};
  g.num_classes = 15;
  g.layers = {LayerSpec::dense(10, 15), LayerSpec::softmax()};
  g.params = {LayerParams{std::vector<float>(150, 0.5f), {},
                          std::vector<float>(15, -1.0f)},
              {}};
  const std::vector<std::uint8_t> bytes = serialize(g);
  EXPECT_EQ(bytes.size(), 740u);
  EXPECT_EQ(model_size_bytes(g, Precision::kFloat32), 740u);
  EXPECT_EQ(std::get<ModelGraph>(deserialize(bytes)), g);
}

TEST(ModelFile, HeaderLayout) {
  const std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  EXPECT_EQ(std::memcmp(bytes.data(), "THAR", 4), 0);
  EXPECT_EQ(bytes[4], 1u);  // version, little endian
  EXPECT_EQ(bytes[5] | bytes[6] | bytes[7], 0u);
  EXPECT_EQ(bytes[8], 0u);  // float precision tag
  EXPECT_EQ(bytes[12], 12u);  // steps
  EXPECT_EQ(bytes[16], 3u);   // channels
  EXPECT_EQ(bytes[20], 15u);  // classes
  EXPECT_EQ(bytes[24], 11u);  // layers
}

TEST(ModelFile, FloatRoundTripIsBitExactAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ModelGraph g = tiny_mc_cnn(2 + seed % 5, 8 + seed % 9, 4 * (1 + seed % 4), seed);
    const std::vector<std::uint8_t> bytes = serialize(g);
    EXPECT_EQ(bytes.size(), model_size_bytes(g, Precision::kFloat32));
    const ModelGraph back = std::get<ModelGraph>(deserialize(bytes));
    ASSERT_EQ(back, g) << "seed " << seed;
    EXPECT_EQ(serialize(back), bytes);
  }
}

TEST(ModelFile, LstmGraphRoundTrips) {
  const ModelGraph g = small_lstm_graph();
  const std::vector<std::uint8_t> bytes = serialize(g);
  EXPECT_EQ(bytes.size(), model_size_bytes(g, Precision::kFloat32));
  EXPECT_EQ(std::get<ModelGraph>(deserialize(bytes)), g);
}

TEST(ModelFile, QuantizedRoundTripIsBitExactAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const QuantizedModel m = quantized_tiny(seed);
    const std::vector<std::uint8_t> bytes = serialize(m);
    EXPECT_EQ(bytes.size(), model_size_bytes(m.skeleton(), Precision::kInt8Full));
    EXPECT_EQ(peek_precision(bytes), Precision::kInt8Full);
    const QuantizedModel back = std::get<QuantizedModel>(deserialize(bytes));
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize(back), bytes);
  }
}

TEST(ModelFile, QuantizedLstmRoundTrips) {
  const ModelGraph g = small_lstm_graph();
  Gen gen(3);
  std::vector<Tensor2D> calib;
  for (int i = 0; i < 8; ++i) calib.push_back(gen.tensor(12, 4));
  const QuantizedModel m = quant::quantize_model(g, calib);
  const std::vector<std::uint8_t> bytes = serialize(m);
  EXPECT_EQ(bytes.size(), model_size_bytes(g, Precision::kInt8Full));
  EXPECT_EQ(std::get<QuantizedModel>(deserialize(bytes)), m);
}

TEST(ModelFile, BadMagicIsCorruptHeader) {
  std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  bytes[0] = 'X';
  EXPECT_EQ(decode_error(bytes), ErrorCode::kCorruptHeader);
}

TEST(ModelFile, UnknownVersionIsRejected) {
  std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  bytes[4] = 2;
  EXPECT_EQ(decode_error(bytes), ErrorCode::kVersionMismatch);
}

TEST(ModelFile, UnknownPrecisionTagIsCorruptHeader) {
  std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  bytes[8] = 9;
  EXPECT_EQ(decode_error(bytes), ErrorCode::kCorruptHeader);
}

TEST(ModelFile, EveryTruncationIsRejected) {
  const std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn(2, 8, 4));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const std::span<const std::uint8_t> prefix(bytes.data(), n);
    const ErrorCode code = decode_error(prefix);
    EXPECT_TRUE(code == ErrorCode::kTruncatedPayload ||
                code == ErrorCode::kCorruptHeader)
        << "prefix " << n;
  }
  const std::span<const std::uint8_t> all_but_one(bytes.data(), bytes.size() - 1);
  EXPECT_EQ(decode_error(all_but_one), ErrorCode::kTruncatedPayload);
}

TEST(ModelFile, TrailingGarbageIsRejected) {
  std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  bytes.push_back(0);
  EXPECT_EQ(decode_error(bytes), ErrorCode::kCorruptHeader);
}

TEST(ModelFile, TensorCountDisagreeingWithSpecIsRejected) {
  std::vector<std::uint8_t> bytes = serialize(tiny_mc_cnn());
  // First layer record ends at 32 + 20; the weight count follows.
  bytes[52] ^= 1;
  EXPECT_NE(decode_error(bytes), ErrorCode::kIo);
}

TEST(ModelFile, SaveAndLoadThroughDisk) {
  const auto dir = testing::scratch_dir("model_file");
  const ModelGraph g = tiny_mc_cnn();
  save_model(dir / "f.thar", g);
  EXPECT_EQ(std::get<ModelGraph>(load_model(dir / "f.thar")), g);
  const QuantizedModel m = quantized_tiny(4);
  save_model(dir / "q.thar", m);
  EXPECT_EQ(std::get<QuantizedModel>(load_model(dir / "q.thar")), m);
  EXPECT_THROW(load_model(dir / "missing.thar"), Error);
}

}  // namespace
}  // namespace tinyhar::ir
