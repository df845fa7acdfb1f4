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

#include "tinyhar/model_ir.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "test_util.h"
#include "tinyhar/error.h"

namespace tinyhar::ir {
namespace {

using testing::tiny_mc_cnn;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no tinyhar::Error thrown";
  return ErrorCode::kIo;
}

McCnnConfig mc(std::size_t channels, std::size_t filters) {
  McCnnConfig c;
  c.channels = channels;
  c.first_filters = filters;
  return c;
}

DeepConvLstmConfig dcl(std::size_t channels, std::size_t filters) {
  DeepConvLstmConfig c;
  c.channels = channels;
  c.filters = filters;
  return c;
}

TEST(McCnnBuilder, SecondConvHasQuarterOfFirstFilters) {
  const ModelGraph n3 = build_mc_cnn(mc(23, 400));
  EXPECT_EQ(n3.layers[0].out, 400u);
  EXPECT_EQ(n3.layers[2].out, 100u);
  const ModelGraph n1 = build_mc_cnn(mc(23, 128));
  EXPECT_EQ(n1.layers[2].out, 32u);
}

TEST(McCnnBuilder, RejectsFilterCountNotDivisibleByFour) {
  EXPECT_EQ(code_of([] { build_mc_cnn(mc(23, 130)); }), ErrorCode::kDivisibility);
}

TEST(McCnnBuilder, LayerSequence) {
  const ModelGraph g = build_mc_cnn(mc(23, 128));
  const std::vector<LayerKind> expected = {
      LayerKind::kConv1D,  LayerKind::kReLU,    LayerKind::kConv1D,
      LayerKind::kReLU,    LayerKind::kDropout, LayerKind::kAvgPool1D,
      LayerKind::kFlatten, LayerKind::kDense,   LayerKind::kReLU,
      LayerKind::kDense,   LayerKind::kSoftmax};
  ASSERT_EQ(g.layers.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(g.layers[i].kind, expected[i]) << "layer " << i;
  }
  EXPECT_EQ(g.layers[0].kernel, 3u);
  EXPECT_EQ(g.layers[5].pool, 2u);
  EXPECT_FLOAT_EQ(g.layers[4].rate, 0.2f);
  EXPECT_EQ(g.layers[7].out, 128u);
  // 24 -> 22 -> 20 steps, pooled to 10, times 32 filters.
  EXPECT_EQ(g.layers[7].in, 320u);
}

TEST(McCnnBuilder, ShortWindowUnderflows) {
  McCnnConfig c = mc(23, 128);
  c.window_len = 4;
  EXPECT_EQ(code_of([&] { build_mc_cnn(c); }), ErrorCode::kShapeUnderflow);
  c.window_len = 5;  // 3 -> 1 step, pool 2 leaves nothing
  EXPECT_EQ(code_of([&] { build_mc_cnn(c); }), ErrorCode::kShapeUnderflow);
  c.window_len = 6;
  EXPECT_NO_THROW(build_mc_cnn(c));
}

TEST(DeepConvLstmBuilder, FourUniformConvLayers) {
  const ModelGraph g = build_deep_conv_lstm(dcl(23, 100));
  int convs = 0, lstms = 0;
  for (const LayerSpec& s : g.layers) {
    if (s.kind == LayerKind::kConv1D) {
      ++convs;
      EXPECT_EQ(s.out, 100u);
    }
    if (s.kind == LayerKind::kLSTM) ++lstms;
  }
  EXPECT_EQ(convs, 4);
  EXPECT_EQ(lstms, 2);
  EXPECT_EQ(g.layers.back().kind, LayerKind::kSoftmax);
}

TEST(DeepConvLstmBuilder, FirstConvTakesAllInputChannels) {
  const ModelGraph g = build_deep_conv_lstm(dcl(768, 32));
  EXPECT_EQ(g.layers[0].in, 768u);
}

TEST(DeepConvLstmBuilder, WindowOfThreeUnderflows) {
  DeepConvLstmConfig c = dcl(23, 32);
  c.window_len = 3;
  EXPECT_EQ(code_of([&] { build_deep_conv_lstm(c); }),
            ErrorCode::kShapeUnderflow);
}

TEST(DeepConvLstmBuilder, ForgetGateBiasStartsAtOne) {
  const ModelGraph g = build_deep_conv_lstm(dcl(17, 32));
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    if (g.layers[i].kind != LayerKind::kLSTM) continue;
    const std::size_t h = g.layers[i].out;
    for (std::size_t j = 0; j < 4 * h; ++j) {
      EXPECT_EQ(g.params[i].bias[j], (j >= h && j < 2 * h) ? 1.0f : 0.0f);
    }
  }
}

TEST(ParamCount, HandComputedLayers) {
  auto count_of = [](LayerSpec spec, Shape input) {
    ModelGraph g;
    g.input_shape = input;
    g.layers = {spec};
    g.params.resize(1);
    return param_count(g).total;
  };
  EXPECT_EQ(count_of(LayerSpec::dense(10, 15), {1, 10}), 165u);
  EXPECT_EQ(count_of(LayerSpec::conv1d(23, 400, 3), {24, 23}), 28000u);
  EXPECT_EQ(count_of(LayerSpec::lstm(100, 64), {10, 100}), 42240u);
  EXPECT_EQ(count_of(LayerSpec::relu(), {4, 4}), 0u);
}

// Every sweep configuration: 4 channel groups x 3 filter levels x 2
// architectures.
std::vector<ModelGraph> all_configs() {
  std::vector<ModelGraph> graphs;
  for (std::size_t ch : {17u, 23u, 768u, 791u}) {
    for (std::size_t f : {128u, 256u, 400u}) graphs.push_back(build_mc_cnn(mc(ch, f)));
    for (std::size_t f : {32u, 64u, 100u}) {
      graphs.push_back(build_deep_conv_lstm(dcl(ch, f)));
    }
  }
  return graphs;
}

TEST(ParamCount, MatchesEnumerationOfStoredScalarsForAllConfigs) {
  for (const ModelGraph& g : all_configs()) {
    std::size_t scalars = 0;
    std::size_t biases = 0;
    for (const LayerParams& p : g.params) {
      scalars += p.weights.size() + p.recurrent.size() + p.bias.size();
      biases += p.bias.size();
    }
    const ParamCount pc = param_count(g);
    EXPECT_EQ(pc.total, scalars);
    EXPECT_EQ(pc.bias_total, biases);
    std::size_t sum = 0;
    for (std::size_t n : pc.per_layer) sum += n;
    EXPECT_EQ(sum, pc.total);
  }
}

TEST(Builders, AllSweepConfigsEndInFifteenWayLayer) {
  for (const ModelGraph& g : all_configs()) {
    EXPECT_EQ(g.num_classes, 15u);
    const LayerSpec& dense = g.layers[g.layers.size() - 2];
    EXPECT_EQ(dense.kind, LayerKind::kDense);
    EXPECT_EQ(dense.out, 15u);
    EXPECT_NO_THROW(g.validate());
  }
}

TEST(Builders, McCnnFilterRatioProperty) {
  for (std::size_t f = 4; f <= 64; f += 4) {
    const ModelGraph g = tiny_mc_cnn(5, 12, f);
    EXPECT_EQ(g.layers[0].out, 4 * g.layers[2].out);
  }
}

TEST(Builders, SeededInitIsDeterministicAndBounded) {
  const ModelGraph a = build_mc_cnn(mc(23, 128));
  const ModelGraph b = build_mc_cnn(mc(23, 128));
  EXPECT_EQ(a, b);
  McCnnConfig other = mc(23, 128);
  other.seed = 8;
  EXPECT_NE(a.params[0].weights, build_mc_cnn(other).params[0].weights);
  const float limit = std::sqrt(6.0f / (23 * 3));
  for (float w : a.params[0].weights) EXPECT_LE(std::fabs(w), limit);
}

TEST(ModelSize, DenseGraphFloatPayloadIsFourBytesPerParameter) {
  ModelGraph g;
  g.input_shape = {1, 10};
  g.num_classes = 15;
  g.layers = {LayerSpec::dense(10, 15), LayerSpec::softmax()};
  g.params = {LayerParams{std::vector<float>(150), {}, std::vector<float>(15)},
              {}};
  // 32-byte header, two 20-byte layer records and two 4-byte length
  // prefixes around the 165 parameters.
  const std::size_t overhead = 32 + 2 * 20 + 2 * 4;
  EXPECT_EQ(model_size_bytes(g, Precision::kFloat32) - overhead, 660u);
}

TEST(ModelSize, RatioWithinBandForAllConfigs) {
  for (const ModelGraph& g : all_configs()) {
    const double f = double(model_size_bytes(g, Precision::kFloat32));
    const double q = double(model_size_bytes(g, Precision::kInt8Full));
    EXPECT_LT(q, f);
    EXPECT_GE(f / q, 3.0);
    EXPECT_LE(f / q, 4.5);
  }
}

TEST(Validate, RejectsMismatchedParameterTensor) {
  ModelGraph g = tiny_mc_cnn();
  g.params[0].weights.pop_back();
  EXPECT_THROW(g.validate(), Error);
}

TEST(Validate, RejectsGraphWithoutSoftmax) {
  ModelGraph g = tiny_mc_cnn();
  g.layers.pop_back();
  g.params.pop_back();
  EXPECT_THROW(g.validate(), Error);
}

TEST(OutputShape, DenseNeedsFlattenedInput) {
  EXPECT_EQ(code_of([] { output_shape(LayerSpec::dense(6, 2), {2, 3}); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(output_shape(LayerSpec::flatten(), {2, 3}), (Shape{1, 6}));
}

}  // namespace
}  // namespace tinyhar::ir
