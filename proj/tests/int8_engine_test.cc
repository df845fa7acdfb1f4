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

#include "tinyhar/int8_engine.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "layer_fixtures.h"
#include "test_util.h"
#include "tinyhar/error.h"
#include "tinyhar/float_engine.h"
#include "tinyhar/quantizer.h"
#include "tinyhar/trainer.h"

namespace tinyhar::q8 {
namespace {

using ir::LayerSpec;
using testing::Gen;
using testing::lstm_layer;
using testing::make_layer;
using testing::range_params;

QTensor2D qtensor(std::size_t steps, std::size_t channels,
                  std::vector<std::int8_t> data, QuantParams qp) {
  return QTensor2D{steps, channels, std::move(data), qp};
}

TEST(MultiplyByQuantizedMultiplier, RoundsHalfAwayFromZero) {
  const FixedPointMultiplier half{1 << 30, 0};  // 0.5
  EXPECT_EQ(multiply_by_quantized_multiplier(3, half), 2);
  EXPECT_EQ(multiply_by_quantized_multiplier(-3, half), -2);
  EXPECT_EQ(multiply_by_quantized_multiplier(4, half), 2);
  EXPECT_EQ(multiply_by_quantized_multiplier(0, half), 0);
}

TEST(MultiplyByQuantizedMultiplier, MatchesExactRationalOracle) {
  Gen g(1);
  for (int trial = 0; trial < 20000; ++trial) {
    const FixedPointMultiplier m =
        quant::decompose_multiplier(std::exp(g.uniform(std::log(1e-5), 0.0)));
    const std::int32_t acc = g.integer(-2000000, 2000000);
    const long double exact =
        (long double)acc * m.mantissa * std::ldexp(1.0L, m.exponent - 31);
    const long double mag = std::floor(std::fabs(exact) + 0.5L);
    const std::int64_t want = std::int64_t(exact < 0 ? -mag : mag);
    ASSERT_EQ(multiply_by_quantized_multiplier(acc, m), want) << acc;
  }
}

TEST(Conv1DInt8, ZeroWeightsGiveOutputZeroPoint) {
  const QuantParams in{0.1, 3};
  const QuantParams out{0.05, -7};
  const QuantizedLayer l = make_layer(LayerSpec::conv1d(2, 3, 2),
                                      std::vector<float>(12, 0.0f),
                                      std::vector<float>(3, 0.0f), in, out);
  const QTensor2D y = conv1d_int8(qtensor(4, 2, {1, 2, 3, 4, 5, 6, 7, 8}, in), l);
  EXPECT_EQ(y.steps, 3u);
  for (std::int8_t q : y.data) EXPECT_EQ(q, -7);
}

TEST(Conv1DInt8, HandRequantization) {
  QuantizedLayer l;
  l.spec = LayerSpec::conv1d(1, 1, 1);
  l.output = {0.5, 10};
  l.weight_scale = 0.25;
  l.weights = {4};  // real 1.0
  l.bias = {0};
  l.multiplier = quant::decompose_multiplier(0.5 * 0.25 / 0.5);
  // Input reals 3, -1.5, 0 at scale 0.5.
  const QTensor2D y = conv1d_int8(qtensor(3, 1, {6, -3, 0}, {0.5, 0}), l);
  // acc 24 * 0.25 = 6 -> 16; acc -12 * 0.25 = -3 -> 7.
  EXPECT_EQ(y.data, (std::vector<std::int8_t>{16, 7, 10}));
}

TEST(Conv1DInt8, RandomLayersMatchFloatWithinThreeSteps) {
  Gen g(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = g.size(1, 6), f = g.size(1, 6), k = g.size(1, 4);
    const Tensor2D x = g.tensor(k + g.size(0, 6), c, -2, 2);
    const std::vector<float> w = g.floats(f * k * c, -1, 1);
    const std::vector<float> b = g.floats(f, -0.5, 0.5);
    const Tensor2D ref = fp::conv1d_forward(x, w, b, k);
    const QuantParams in = range_params(x.data());
    const QuantParams out = range_params(ref.data());
    const QuantizedLayer l = make_layer(LayerSpec::conv1d(c, f, k), w, b, in, out);
    const Tensor2D y = dequantize(conv1d_int8(quantize(x, in), l));
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_LE(std::fabs(y.data()[i] - ref.data()[i]), 3 * out.scale);
    }
  }
}

TEST(Conv1DInt8, ChannelMismatchIsError) {
  const QuantizedLayer l = make_layer(LayerSpec::conv1d(2, 1, 1), {1, 1}, {0},
                                      {1, 0}, {1, 0});
  EXPECT_THROW(conv1d_int8(qtensor(2, 1, {1, 2}, {1, 0}), l), Error);
}

TEST(DenseInt8, IdentityScaledLayerPreservesInput) {
  const QuantParams qp{0.1, 0};
  QuantizedLayer l;
  l.spec = LayerSpec::dense(3, 3);
  l.output = qp;
  l.weight_scale = 1.0 / 127.0;
  l.weights = {127, 0, 0, 0, 127, 0, 0, 0, 127};
  l.bias = {0, 0, 0};
  l.multiplier = quant::decompose_multiplier(qp.scale * l.weight_scale / qp.scale);
  const std::vector<std::int8_t> x = {-100, 5, 99};
  const std::vector<std::int8_t> y = dense_int8(x, qp, l);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(y[i] - x[i]), 1);
}

TEST(DenseInt8, LargeWeightsSaturateWithoutWraparound) {
  const QuantParams in{1.0, 0};
  QuantizedLayer l;
  l.spec = LayerSpec::dense(4, 2);
  l.output = {0.01, 0};
  l.weight_scale = 1.0;
  l.weights = {127, 127, 127, 127, -127, -127, -127, -127};
  l.bias = {0, 0};
  l.multiplier = quant::decompose_multiplier(100.0);
  SaturationAudit audit;
  const std::vector<std::int8_t> y =
      dense_int8(std::vector<std::int8_t>{127, 127, 127, 127}, in, l, &audit);
  EXPECT_EQ(y, (std::vector<std::int8_t>{127, -128}));
  EXPECT_EQ(audit.clamped, 2u);
  EXPECT_EQ(audit.total, 2u);
}

TEST(DenseInt8, InputAtZeroPointGivesRequantizedBias) {
  const QuantParams in{0.2, 17};
  const QuantParams out{0.05, -20};
  const std::vector<float> b = {0.5f, -0.25f};
  const QuantizedLayer l = make_layer(LayerSpec::dense(3, 2),
                                      {0.3f, -0.7f, 0.1f, 0.9f, 0.2f, -0.4f}, b,
                                      in, out);
  const std::vector<std::int8_t> y =
      dense_int8(std::vector<std::int8_t>(3, 17), in, l);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(y[i], multiply_by_quantized_multiplier(l.bias[i], l.multiplier) - 20);
  }
}

TEST(AvgPoolInt8, RoundedDivision) {
  const QuantParams qp{1, 0};
  EXPECT_EQ(avg_pool1d_int8(qtensor(2, 1, {2, 4}, qp), 2).data,
            std::vector<std::int8_t>{3});
  EXPECT_EQ(avg_pool1d_int8(qtensor(2, 1, {1, 2}, qp), 2).data,
            std::vector<std::int8_t>{2});
  EXPECT_EQ(avg_pool1d_int8(qtensor(2, 1, {-1, -2}, qp), 2).data,
            std::vector<std::int8_t>{-2});
}

TEST(AvgPoolInt8, WithinOneStepOfFloatPool) {
  Gen g(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t pool = g.size(1, 4), c = g.size(1, 5);
    const Tensor2D x = g.tensor(pool * g.size(1, 5), c, -3, 3);
    const QuantParams qp = range_params(x.data());
    const QTensor2D q = quantize(x, qp);
    const Tensor2D ref = fp::avg_pool1d(dequantize(q), pool);
    const QTensor2D y = avg_pool1d_int8(q, pool);
    EXPECT_EQ(y.qp, qp);
    const Tensor2D yf = dequantize(y);
    for (std::size_t i = 0; i < yf.size(); ++i) {
      EXPECT_LE(std::fabs(yf.data()[i] - ref.data()[i]), qp.scale + 1e-6);
    }
  }
}

TEST(ReluInt8, ClampsAtZeroPoint) {
  const QTensor2D y = relu_int8(qtensor(1, 3, {-50, -5, 40}, {0.1, -5}));
  EXPECT_EQ(y.data, (std::vector<std::int8_t>{-5, -5, 40}));
}

TEST(LstmHybrid, ZeroWeightsGiveZeroPoint) {
  const ir::LayerParams p{std::vector<float>(4 * 3 * 2, 0.0f),
                          std::vector<float>(4 * 3 * 3, 0.0f),
                          std::vector<float>(12, 0.0f)};
  const QuantParams in{0.1, 0};
  const QuantParams out{0.01, 4};
  const QTensor2D y = lstm_hybrid(qtensor(2, 2, {10, -20, 30, 5}, in),
                                  lstm_layer(2, 3, p, in, out));
  for (std::int8_t q : y.data) EXPECT_EQ(q, 4);
}

TEST(LstmHybrid, AgreesWithFloatLstm) {
  Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = g.size(1, 5), h = g.size(1, 6);
    const ir::LayerParams p{g.floats(4 * h * in, -0.8, 0.8),
                            g.floats(4 * h * h, -0.8, 0.8),
                            g.floats(4 * h, -0.3, 0.3)};
    const Tensor2D x = g.tensor(g.size(1, 8), in, -1.5, 1.5);
    const QuantParams in_qp = range_params(x.data());
    const QTensor2D qx = quantize(x, in_qp);
    // The float oracle sees exactly the stored int8 parameters.
    const QuantParams probe_out = range_params(fp::lstm_forward(x, p, h).data());
    const QuantizedLayer probe = lstm_layer(in, h, p, in_qp, probe_out);
    const ir::LayerParams stored = testing::stored_lstm_params(probe, in_qp);
    const Tensor2D ref = fp::lstm_forward(dequantize(qx), stored, h);
    const QuantParams out = range_params(ref.data());
    const QuantizedLayer layer = lstm_layer(in, h, p, in_qp, out);
    const QTensor2D y = lstm_hybrid(qx, layer);
    EXPECT_EQ(y, lstm_hybrid(qx, layer));
    const Tensor2D yf = dequantize(y);
    for (std::size_t i = 0; i < yf.size(); ++i) {
      EXPECT_LE(std::fabs(yf.data()[i] - ref.data()[i]), 3 * out.scale);
    }
  }
}

TEST(SoftmaxInt8, UniformLogits) {
  const QTensor2D y =
      softmax_int8(qtensor(1, 15, std::vector<std::int8_t>(15, 42), {0.1, 0}));
  EXPECT_EQ(y.qp, kSoftmaxOutputParams);
  for (std::int8_t q : y.data) EXPECT_EQ(q, -128 + 17);  // round(256 / 15)
}

TEST(SoftmaxInt8, DominantLogitSaturates) {
  std::vector<std::int8_t> logits(15, -128);
  logits[4] = 127;
  const QTensor2D y = softmax_int8(qtensor(1, 15, logits, {0.5, 0}));
  EXPECT_EQ(y.data[4], 127);
}

TEST(SoftmaxInt8, PermutationEquivariantAndNormalized) {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int8_t> logits(15);
    for (std::int8_t& q : logits) q = std::int8_t(g.integer(-128, 127));
    const QuantParams qp{g.uniform(0.01, 0.2), g.integer(-20, 20)};
    const QTensor2D y = softmax_int8(qtensor(1, 15, logits, qp));
    const std::vector<float> p = quant::dequantize(y.data, y.qp);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    EXPECT_GE(sum, 1.0 - 8.0 / 256);
    EXPECT_LE(sum, 1.0 + 8.0 / 256);
    std::vector<std::size_t> perm(15);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.engine());
    std::vector<std::int8_t> permuted(15);
    for (std::size_t i = 0; i < 15; ++i) permuted[i] = logits[perm[i]];
    const QTensor2D z = softmax_int8(qtensor(1, 15, permuted, qp));
    for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(z.data[i], y.data[perm[i]]);
  }
}

// Trained toy MC-CNN: 15 classes, each a distinct channel/time pattern.
struct Toy {
  ir::ModelGraph graph;
  QuantizedModel model;
  std::vector<WindowedSample> train;
};

WindowedSample toy_sample(Gen& g, int label) {
  WindowedSample s;
  s.label = label;
  s.window = g.tensor(12, 4, -0.3, 0.3);
  for (std::size_t t = 0; t < 12; ++t) {
    const double phase = 0.4 * label * double(t);
    s.window.at(t, std::size_t(label) % 4) += float(std::sin(phase) + 0.1 * label);
    s.window.at(t, std::size_t(label / 4)) += 0.5f;
  }
  return s;
}

const Toy& toy() {
  static const Toy t = [] {
    Gen g(6);
    Toy toy;
    for (int i = 0; i < 600; ++i) toy.train.push_back(toy_sample(g, i % 15));
    fp::TrainConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 16;
    cfg.learning_rate = 3e-3;
    toy.graph = fp::train(testing::tiny_mc_cnn(4, 12, 16), toy.train, {}, cfg).graph;
    toy.model = quant::quantize_model(toy.graph, toy.train);
    return toy;
  }();
  return t;
}

TEST(RunQuantized, AgreesWithFloatOnThousandWindows) {
  const Toy& t = toy();
  Gen g(7);
  std::size_t agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const WindowedSample s = toy_sample(g, i % 15);
    const Prediction p = run_quantized(t.model, s.window);
    agree += p.label == fp::argmax(fp::forward(t.graph, s.window));
    const double sum = std::accumulate(p.probabilities.begin(),
                                       p.probabilities.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 8.0 / 256);
  }
  EXPECT_GE(agree, 950u);
}

TEST(RunQuantized, BitIdenticalAcrossRunsAndExecutors) {
  const Toy& t = toy();
  Gen g(8);
  Executor a(t.model);
  for (int i = 0; i < 20; ++i) {
    const Tensor2D w = toy_sample(g, i % 15).window;
    const Prediction first = a.run(w);
    const Prediction second = run_quantized(t.model, w);
    EXPECT_EQ(first.probabilities, second.probabilities);
    EXPECT_EQ(first.label, second.label);
  }
}

TEST(RunQuantized, TieBreaksToLowestIndex) {
  const Toy& t = toy();
  QuantizedModel m = t.model;
  // Zero final dense weights and bias make every logit identical.
  QuantizedLayer& last = m.layers[m.layers.size() - 2];
  std::fill(last.weights.begin(), last.weights.end(), 0);
  std::fill(last.bias.begin(), last.bias.end(), 0);
  EXPECT_EQ(run_quantized(m, t.train[3].window).label, 0u);
}

TEST(RunQuantized, NothingEscapesInt8AndAuditCounts) {
  const Toy& t = toy();
  Executor e(t.model);
  for (int i = 0; i < 10; ++i) e.run(t.train[i].window);
  EXPECT_GT(e.audit().total, 0u);
  EXPECT_LE(e.audit().clamped, e.audit().total);
  e.reset_audit();
  EXPECT_EQ(e.audit().total, 0u);
}

TEST(RunQuantized, WrongWindowShapeIsError) {
  try {
    run_quantized(toy().model, Tensor2D(5, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Latency, SingleRepetition) {
  const LatencyStats s = timed_inference(toy().model, toy().train[0].window, 1);
  EXPECT_EQ(s.samples, 1u);
  EXPECT_EQ(s.p50_us, s.mean_us);
  EXPECT_THROW(timed_inference(toy().model, toy().train[0].window, 0), Error);
}

TEST(Latency, NearestRankPercentiles) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), Gen(9).engine());
  const LatencyStats s = summarize_latency(v);
  EXPECT_DOUBLE_EQ(s.mean_us, 50.5);
  EXPECT_DOUBLE_EQ(s.p50_us, 50.0);
  EXPECT_DOUBLE_EQ(s.p95_us, 95.0);
}

TEST(Latency, LargerModelTakesLonger) {
  Gen g(10);
  std::vector<Tensor2D> calib = {g.tensor(24, 23)};
  ir::McCnnConfig c;
  c.channels = 23;
  c.first_filters = 128;
  const QuantizedModel n1 = quant::quantize_model(ir::build_mc_cnn(c), calib);
  c.first_filters = 400;
  const QuantizedModel n3 = quant::quantize_model(ir::build_mc_cnn(c), calib);
  const LatencyStats a = timed_inference(n1, calib[0], 60, 5);
  const LatencyStats b = timed_inference(n3, calib[0], 60, 5);
  EXPECT_LT(a.p50_us, b.p50_us);
}

}  // namespace
}  // namespace tinyhar::q8
