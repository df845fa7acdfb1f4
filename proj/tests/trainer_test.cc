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

#include "tinyhar/trainer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.h"
#include "tinyhar/error.h"
#include "tinyhar/float_engine.h"

namespace tinyhar::fp {
namespace {

using testing::Gen;

// Class 0 lights channel 0, class 1 lights channel 1.
std::vector<WindowedSample> separable_set(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<WindowedSample> set;
  for (std::size_t i = 0; i < n; ++i) {
    WindowedSample s;
    s.label = int(i % 2);
    s.window = g.tensor(8, 2, -0.2, 0.2);
    for (std::size_t t = 0; t < 8; ++t) {
      s.window.at(t, s.label) += 1.0f + float(g.uniform(0, 0.5));
    }
    set.push_back(std::move(s));
  }
  return set;
}

ir::ModelGraph two_class_cnn(std::uint64_t seed = 3) {
  ir::McCnnConfig c;
  c.channels = 2;
  c.window_len = 8;
  c.first_filters = 16;
  c.dense_width = 16;
  c.num_classes = 2;
  c.seed = seed;
  return ir::build_mc_cnn(c);
}

ir::ModelGraph dense_only(std::uint64_t seed) {
  Gen g(seed);
  ir::ModelGraph graph;
  graph.input_shape = {4, 3};
  graph.num_classes = 15;
  graph.layers = {ir::LayerSpec::flatten(), ir::LayerSpec::dense(12, 15),
                  ir::LayerSpec::softmax()};
  graph.params = {{}, {g.floats(180, -0.5, 0.5), {}, g.floats(15, -0.1, 0.1)}, {}};
  return graph;
}

TEST(Train, SeparableToySetIsLearned) {
  const std::vector<WindowedSample> data = separable_set(64, 1);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 8;
  cfg.learning_rate = 3e-3;
  for (std::uint64_t init = 1; init <= 5; ++init) {
    const TrainResult r = train(two_class_cnn(init), data, {}, cfg);
    std::size_t hits = 0;
    for (const WindowedSample& s : data) {
      hits += argmax(forward(r.graph, s.window)) == std::size_t(s.label);
    }
    EXPECT_GE(double(hits) / double(data.size()), 0.99) << "init " << init;
    ASSERT_EQ(r.history.size(), 50u);
    EXPECT_LT(r.history.back().loss, r.history.front().loss);
    EXPECT_TRUE(std::isnan(r.history.back().val_acc));
  }
}

TEST(Train, SgdAlsoReducesLoss) {
  const std::vector<WindowedSample> data = separable_set(32, 2);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.05;
  cfg.optimizer = Optimizer::kSgd;
  const TrainResult r = train(two_class_cnn(), data, data, cfg);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
  EXPECT_FALSE(std::isnan(r.history.back().val_acc));
}

TEST(Train, SameSeedSameHistory) {
  const std::vector<WindowedSample> data = separable_set(24, 3);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 5;
  const TrainResult a = train(two_class_cnn(), data, data, cfg);
  const TrainResult b = train(two_class_cnn(), data, data, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.graph, b.graph);
  cfg.seed = 99;
  EXPECT_NE(train(two_class_cnn(), data, data, cfg).graph, a.graph);
}

TEST(Train, LstmGraphIsUnsupported) {
  ir::DeepConvLstmConfig c;
  c.channels = 2;
  c.window_len = 12;
  c.filters = 4;
  c.hidden = 4;
  std::vector<WindowedSample> data(1);
  data[0].window = Tensor2D(12, 2);
  try {
    train(ir::build_deep_conv_lstm(c), data, {}, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedLayer);
  }
}

TEST(Train, RejectsInvalidConfig) {
  const std::vector<WindowedSample> data = separable_set(4, 4);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(two_class_cnn(), data, {}, cfg), Error);
  cfg = {};
  cfg.learning_rate = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_THROW(train(two_class_cnn(), {}, {}, TrainConfig{}), Error);
}

TEST(Train, HistoryCsvLayout) {
  const std::vector<EpochStats> h = {{1, 0.5, 0.75, 1.0}};
  const std::string csv = history_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,loss,train_acc,val_acc");
  EXPECT_NE(csv.find("\n1,0.5,0.75,1"), std::string::npos);
}

TEST(GradCheck, TinyMcCnnWithinTolerance) {
  ir::McCnnConfig c;
  c.channels = 3;
  c.window_len = 10;
  c.first_filters = 4;
  c.dense_width = 8;
  const ir::ModelGraph graph = ir::build_mc_cnn(c);
  Gen g(20);
  for (int label : {0, 7, 14}) {
    const GradCheckResult r = grad_check(graph, g.tensor(10, 3), label);
    EXPECT_GE(r.checked, 200u);
    EXPECT_LE(r.max_relative_error, 1e-3) << "label " << label;
  }
}

TEST(GradCheck, DenseOnlyWithinTighterTolerance) {
  Gen g(21);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GradCheckResult r = grad_check(dense_only(seed), g.tensor(4, 3), int(seed));
    EXPECT_LE(r.max_relative_error, 1e-4);
  }
}

// x -> Dense(1) -> ReLU -> Dense(2) -> Softmax with x = 1; the hidden
// pre-activation equals 1 + `bias`.
ir::ModelGraph near_kink(float bias) {
  ir::ModelGraph graph;
  graph.input_shape = {1, 1};
  graph.num_classes = 2;
  graph.layers = {ir::LayerSpec::flatten(), ir::LayerSpec::dense(1, 1),
                  ir::LayerSpec::relu(), ir::LayerSpec::dense(1, 2),
                  ir::LayerSpec::softmax()};
  graph.params = {{}, {{1.0f}, {}, {bias}}, {}, {{2.0f, -1.0f}, {}, {0.0f, 0.0f}}, {}};
  return graph;
}

TEST(GradCheck, StepShrinksBelowNearbyKink) {
  // Pre-activation 3e-5 sits inside the default 1e-4 step.
  const GradCheckResult r =
      grad_check(near_kink(-1.0f + 3e-5f), Tensor2D(1, 1, {1.0f}), 0);
  EXPECT_EQ(r.checked, 6u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_LE(r.max_relative_error, 1e-6);
}

TEST(GradCheck, EntriesExactlyOnKinkAreSkipped) {
  const GradCheckResult r = grad_check(near_kink(-1.0f), Tensor2D(1, 1, {1.0f}), 0);
  EXPECT_EQ(r.skipped, 2u);  // first dense weight and bias
  EXPECT_EQ(r.checked, 4u);
  EXPECT_LE(r.max_relative_error, 1e-6);
}

TEST(GradCheck, ZeroInputZeroWeightsGiveZeroConvGradients) {
  ir::ModelGraph graph = testing::tiny_mc_cnn(3, 12, 4);
  for (ir::LayerParams& p : graph.params) {
    std::fill(p.weights.begin(), p.weights.end(), 0.0f);
    std::fill(p.bias.begin(), p.bias.end(), 0.0f);
  }
  const std::vector<LayerGradients> grads =
      analytic_gradients(graph, Tensor2D(12, 3), 2);
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    if (graph.layers[i].kind != ir::LayerKind::kConv1D) continue;
    for (double d : grads[i].weights) EXPECT_EQ(d, 0.0);
  }
}

}  // namespace
}  // namespace tinyhar::fp
