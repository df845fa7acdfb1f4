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

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tinyhar/error.h"
#include "tinyhar/random.h"

namespace tinyhar::fp {
namespace {

using ir::LayerKind;

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

void require_trainable(const ir::ModelGraph& graph) {
  for (const ir::LayerSpec& spec : graph.layers) {
    if (spec.kind == LayerKind::kLSTM) {
      throw Error(ErrorCode::kUnsupportedLayer,
                  "training supports Conv1D/ReLU/Dropout/AvgPool1D/Flatten/"
                  "Dense/Softmax only; graph contains an LSTM layer");
    }
  }
}

// A batch of activations: `batch` samples, each (steps x channels), stored
// as a row-major (batch*steps x channels) matrix.
template <typename S>
struct Activation {
  Mat<S> data;
  Shape shape;
};

template <typename S>
struct TrainLayer {
  ir::LayerSpec spec;
  Shape in;
  Shape out;
  Mat<S> weights;  // Conv1D: filters x (kernel*channels); Dense: out x in
  RowVec<S> bias;
  Mat<S> grad_weights;
  RowVec<S> grad_bias;
  Mat<S> m_weights, v_weights;
  RowVec<S> m_bias, v_bias;
  Mat<S> cache;  // im2col patches, dense inputs, or a ReLU/dropout mask
};

template <typename S>
class Network {
 public:
  explicit Network(const ir::ModelGraph& graph) : graph_(graph) {
    const std::vector<Shape> shapes = graph.layer_shapes();
    Shape in = graph.input_shape;
    for (std::size_t i = 0; i < graph.layers.size(); ++i) {
      TrainLayer<S> layer;
      layer.spec = graph.layers[i];
      layer.in = in;
      layer.out = shapes[i];
      const ir::LayerParams& p = graph.params[i];
      if (layer.spec.kind == LayerKind::kConv1D ||
          layer.spec.kind == LayerKind::kDense) {
        const Eigen::Index rows = Eigen::Index(layer.spec.out);
        const Eigen::Index cols = Eigen::Index(p.weights.size()) / rows;
        layer.weights = Eigen::Map<const Mat<float>>(p.weights.data(), rows,
                                                     cols)
                            .template cast<S>();
        layer.bias = Eigen::Map<const RowVec<float>>(p.bias.data(), rows)
                         .template cast<S>();
        layer.grad_weights = Mat<S>::Zero(rows, cols);
        layer.grad_bias = RowVec<S>::Zero(rows);
        layer.m_weights = Mat<S>::Zero(rows, cols);
        layer.v_weights = Mat<S>::Zero(rows, cols);
        layer.m_bias = RowVec<S>::Zero(rows);
        layer.v_bias = RowVec<S>::Zero(rows);
      }
      layers_.push_back(std::move(layer));
      in = shapes[i];
    }
  }

  std::vector<TrainLayer<S>>& layers() { return layers_; }

  // Returns logits (batch x classes); the softmax itself is folded into the
  // loss.
  Mat<S> forward(Activation<S> x, bool training, Rng* rng) {
    const std::size_t batch = std::size_t(x.data.rows()) / x.shape.steps;
    for (TrainLayer<S>& layer : layers_) {
      switch (layer.spec.kind) {
        case LayerKind::kConv1D:
          x = conv_forward(layer, x, batch);
          break;
        case LayerKind::kReLU:
          layer.cache = (x.data.array() > S(0)).template cast<S>();
          x.data = x.data.cwiseMax(S(0));
          break;
        case LayerKind::kDropout:
          if (training && layer.spec.rate > 0.0f) {
            const S keep = S(1) - S(layer.spec.rate);
            layer.cache.resize(x.data.rows(), x.data.cols());
            S* m = layer.cache.data();
            for (Eigen::Index i = 0; i < layer.cache.size(); ++i) {
              m[i] = rng->bernoulli(double(keep)) ? S(1) / keep : S(0);
            }
            x.data.array() *= layer.cache.array();
          } else {
            layer.cache.resize(0, 0);
          }
          break;
        case LayerKind::kAvgPool1D:
          x = pool_forward(layer, x, batch);
          break;
        case LayerKind::kFlatten: {
          Mat<S> flat = Eigen::Map<Mat<S>>(x.data.data(), Eigen::Index(batch),
                                           Eigen::Index(x.shape.size()));
          x.data = std::move(flat);
          x.shape = layer.out;
          break;
        }
        case LayerKind::kDense:
          layer.cache = x.data;
          x.data = x.data * layer.weights.transpose();
          x.data.rowwise() += layer.bias;
          x.shape = layer.out;
          break;
        case LayerKind::kSoftmax:
          break;
        case LayerKind::kLSTM:
          throw Error(ErrorCode::kUnsupportedLayer, "LSTM in trainer");
      }
    }
    return x.data;
  }

  // `grad` is dLoss/dlogits (batch x classes). Accumulates into
  // grad_weights/grad_bias (overwriting previous values).
  void backward(Mat<S> grad) {
    const std::size_t batch = std::size_t(grad.rows());
    for (std::size_t li = layers_.size(); li-- > 0;) {
      TrainLayer<S>& layer = layers_[li];
      switch (layer.spec.kind) {
        case LayerKind::kSoftmax:
          break;
        case LayerKind::kDense:
          layer.grad_weights.noalias() = grad.transpose() * layer.cache;
          layer.grad_bias = grad.colwise().sum();
          if (li > 0) grad = grad * layer.weights;
          break;
        case LayerKind::kFlatten: {
          Mat<S> unflat = Eigen::Map<Mat<S>>(
              grad.data(), Eigen::Index(batch * layer.in.steps),
              Eigen::Index(layer.in.channels));
          grad = std::move(unflat);
          break;
        }
        case LayerKind::kAvgPool1D:
          grad = pool_backward(layer, grad, batch);
          break;
        case LayerKind::kDropout:
          if (layer.cache.size() > 0) grad.array() *= layer.cache.array();
          break;
        case LayerKind::kReLU:
          grad.array() *= layer.cache.array();
          break;
        case LayerKind::kConv1D:
          grad = conv_backward(layer, grad, batch, li > 0);
          break;
        case LayerKind::kLSTM:
          throw Error(ErrorCode::kUnsupportedLayer, "LSTM in trainer");
      }
    }
  }

  void write_back(ir::ModelGraph& graph) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const TrainLayer<S>& layer = layers_[i];
      if (layer.weights.size() == 0) continue;
      ir::LayerParams& p = graph.params[i];
      Eigen::Map<Mat<float>>(p.weights.data(), layer.weights.rows(),
                             layer.weights.cols()) =
          layer.weights.template cast<float>();
      Eigen::Map<RowVec<float>>(p.bias.data(), layer.bias.size()) =
          layer.bias.template cast<float>();
    }
  }

 private:
  Activation<S> conv_forward(TrainLayer<S>& layer, const Activation<S>& x,
                             std::size_t batch) {
    const std::size_t in_steps = layer.in.steps;
    const std::size_t out_steps = layer.out.steps;
    const std::size_t span = layer.spec.kernel * layer.in.channels;
    Mat<S>& patches = layer.cache;
    patches.resize(Eigen::Index(batch * out_steps), Eigen::Index(span));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < out_steps; ++t) {
        const S* src = x.data.data() + (b * in_steps + t) * layer.in.channels;
        std::copy(src, src + span,
                  patches.data() + (b * out_steps + t) * span);
      }
    }
    Activation<S> y;
    y.data.noalias() = patches * layer.weights.transpose();
    y.data.rowwise() += layer.bias;
    y.shape = layer.out;
    return y;
  }

  Mat<S> conv_backward(TrainLayer<S>& layer, const Mat<S>& grad,
                       std::size_t batch, bool need_input_grad) {
    layer.grad_weights.noalias() = grad.transpose() * layer.cache;
    layer.grad_bias = grad.colwise().sum();
    if (!need_input_grad) return {};
    const Mat<S> patch_grad = grad * layer.weights;
    const std::size_t in_steps = layer.in.steps;
    const std::size_t out_steps = layer.out.steps;
    const std::size_t channels = layer.in.channels;
    const std::size_t span = layer.spec.kernel * channels;
    Mat<S> dx = Mat<S>::Zero(Eigen::Index(batch * in_steps),
                             Eigen::Index(channels));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < out_steps; ++t) {
        const S* src = patch_grad.data() + (b * out_steps + t) * span;
        S* dst = dx.data() + (b * in_steps + t) * channels;
        for (std::size_t i = 0; i < span; ++i) dst[i] += src[i];
      }
    }
    return dx;
  }

  Activation<S> pool_forward(TrainLayer<S>& layer, const Activation<S>& x,
                             std::size_t batch) {
    const std::size_t pool = layer.spec.pool;
    const std::size_t in_steps = layer.in.steps;
    const std::size_t out_steps = layer.out.steps;
    Activation<S> y;
    y.shape = layer.out;
    y.data = Mat<S>::Zero(Eigen::Index(batch * out_steps),
                          Eigen::Index(layer.in.channels));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < out_steps; ++t) {
        auto dst = y.data.row(Eigen::Index(b * out_steps + t));
        for (std::size_t k = 0; k < pool; ++k) {
          dst += x.data.row(Eigen::Index(b * in_steps + t * pool + k));
        }
        dst /= S(pool);
      }
    }
    return y;
  }

  Mat<S> pool_backward(TrainLayer<S>& layer, const Mat<S>& grad,
                       std::size_t batch) {
    const std::size_t pool = layer.spec.pool;
    const std::size_t in_steps = layer.in.steps;
    const std::size_t out_steps = layer.out.steps;
    Mat<S> dx = Mat<S>::Zero(Eigen::Index(batch * in_steps),
                             Eigen::Index(layer.in.channels));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < out_steps; ++t) {
        const auto src = grad.row(Eigen::Index(b * out_steps + t)) / S(pool);
        for (std::size_t k = 0; k < pool; ++k) {
          dx.row(Eigen::Index(b * in_steps + t * pool + k)) = src;
        }
      }
    }
    return dx;
  }

  const ir::ModelGraph& graph_;
  std::vector<TrainLayer<S>> layers_;
};

template <typename S>
Activation<S> make_batch(const ir::ModelGraph& graph,
                         std::span<const WindowedSample> samples,
                         std::span<const std::size_t> order) {
  const Shape shape = graph.input_shape;
  Activation<S> x;
  x.shape = shape;
  x.data.resize(Eigen::Index(order.size() * shape.steps),
                Eigen::Index(shape.channels));
  for (std::size_t b = 0; b < order.size(); ++b) {
    const Tensor2D& w = samples[order[b]].window;
    if (w.shape() != shape) {
      throw Error(ErrorCode::kShapeMismatch,
                  "training window shape does not match model input");
    }
    std::transform(w.data().begin(), w.data().end(),
                   x.data.data() + b * shape.size(),
                   [](float v) { return S(v); });
  }
  return x;
}

// Mean cross-entropy of softmax(logits) and its gradient w.r.t. logits.
template <typename S>
S softmax_cross_entropy(const Mat<S>& logits, std::span<const int> labels,
                        Mat<S>* grad, std::size_t* correct) {
  const Eigen::Index batch = logits.rows();
  S loss = 0;
  if (grad) grad->resize(batch, logits.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto z = logits.row(b);
    Eigen::Index best = 0;
    const S max = z.maxCoeff(&best);
    const RowVec<S> e = (z.array() - max).exp().matrix();
    const S sum = e.sum();
    const int y = labels[std::size_t(b)];
    loss += -(z(y) - max - std::log(sum));
    if (correct && best == y) ++*correct;
    if (grad) {
      grad->row(b) = e / sum;
      (*grad)(b, y) -= S(1);
    }
  }
  if (grad) *grad /= S(batch);
  return loss / S(batch);
}

template <typename S>
void apply_update(std::vector<TrainLayer<S>>& layers, const TrainConfig& cfg,
                  std::size_t step) {
  const S lr = S(cfg.learning_rate);
  if (cfg.optimizer == Optimizer::kSgd) {
    for (TrainLayer<S>& l : layers) {
      if (l.weights.size() == 0) continue;
      l.weights -= lr * l.grad_weights;
      l.bias -= lr * l.grad_bias;
    }
    return;
  }
  const S beta1 = S(0.9), beta2 = S(0.999), eps = S(1e-7);
  const S c1 = S(1) - std::pow(beta1, S(step));
  const S c2 = S(1) - std::pow(beta2, S(step));
  const S alpha = lr * std::sqrt(c2) / c1;
  for (TrainLayer<S>& l : layers) {
    if (l.weights.size() == 0) continue;
    l.m_weights = beta1 * l.m_weights + (S(1) - beta1) * l.grad_weights;
    l.v_weights = beta2 * l.v_weights +
                  (S(1) - beta2) * l.grad_weights.cwiseProduct(l.grad_weights);
    l.weights.array() -=
        alpha * l.m_weights.array() / (l.v_weights.array().sqrt() + eps);
    l.m_bias = beta1 * l.m_bias + (S(1) - beta1) * l.grad_bias;
    l.v_bias = beta2 * l.v_bias +
               (S(1) - beta2) * l.grad_bias.cwiseProduct(l.grad_bias);
    l.bias.array() -=
        alpha * l.m_bias.array() / (l.v_bias.array().sqrt() + eps);
  }
}

template <typename S>
double batched_accuracy(Network<S>& net, const ir::ModelGraph& graph,
                        std::span<const WindowedSample> samples,
                        std::size_t batch_size) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t correct = 0;
  std::vector<std::size_t> order(batch_size);
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, samples.size() - start);
    order.resize(n);
    std::iota(order.begin(), order.end(), start);
    const Mat<S> logits =
        net.forward(make_batch<S>(graph, samples, order), false, nullptr);
    for (std::size_t b = 0; b < n; ++b) {
      Eigen::Index best = 0;
      logits.row(Eigen::Index(b)).maxCoeff(&best);
      if (best == samples[start + b].label) ++correct;
    }
  }
  return double(correct) / double(samples.size());
}

void check_labels(std::span<const WindowedSample> samples,
                  std::size_t classes) {
  for (const WindowedSample& s : samples) {
    if (s.label < 0 || std::size_t(s.label) >= classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(s.label) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  }
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  }
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning_rate must lie in (0, 1)");
  }
}

TrainResult train(const ir::ModelGraph& graph,
                  std::span<const WindowedSample> train_set,
                  std::span<const WindowedSample> val_set,
                  const TrainConfig& config) {
  config.validate();
  graph.validate();
  require_trainable(graph);
  if (train_set.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "training set is empty");
  }
  check_labels(train_set, graph.num_classes);
  check_labels(val_set, graph.num_classes);

  Network<float> net(graph);
  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> labels;
  std::size_t step = 0;

  TrainResult result;
  result.graph = graph;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      const std::span<const std::size_t> idx(order.data() + start, n);
      labels.resize(n);
      for (std::size_t b = 0; b < n; ++b) labels[b] = train_set[idx[b]].label;
      const Mat<float> logits =
          net.forward(make_batch<float>(graph, train_set, idx), true, &rng);
      Mat<float> grad;
      loss_sum += double(softmax_cross_entropy<float>(logits, labels, &grad,
                                                      &correct)) *
                  double(n);
      net.backward(std::move(grad));
      apply_update(net.layers(), config, ++step);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / double(train_set.size());
    stats.train_acc = double(correct) / double(train_set.size());
    stats.val_acc = batched_accuracy(net, graph, val_set, 128);
    result.history.push_back(stats);
  }
  net.write_back(result.graph);
  return result;
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,loss,train_acc,val_acc\n";
  char buf[64];
  auto num = [&](double v) {
    if (std::isnan(v)) {
      out += "nan";
      return;
    }
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, end);
  };
  for (const EpochStats& s : history) {
    out += std::to_string(s.epoch);
    out += ',';
    num(s.loss);
    out += ',';
    num(s.train_acc);
    out += ',';
    num(s.val_acc);
    out += '\n';
  }
  return out;
}

namespace {

double window_loss(Network<double>& net, const ir::ModelGraph& graph,
                   const WindowedSample& sample) {
  const std::size_t idx = 0;
  const Mat<double> logits = net.forward(
      make_batch<double>(graph, std::span(&sample, 1), std::span(&idx, 1)),
      false, nullptr);
  const int label = sample.label;
  return softmax_cross_entropy<double>(logits, std::span(&label, 1), nullptr,
                                       nullptr);
}

}  // namespace

std::vector<LayerGradients> analytic_gradients(const ir::ModelGraph& graph,
                                               const Tensor2D& window,
                                               int label) {
  graph.validate();
  require_trainable(graph);
  WindowedSample sample{window, label, 0, 0};
  check_labels(std::span(&sample, 1), graph.num_classes);
  Network<double> net(graph);
  const std::size_t idx = 0;
  const Mat<double> logits = net.forward(
      make_batch<double>(graph, std::span(&sample, 1), std::span(&idx, 1)),
      false, nullptr);
  Mat<double> grad;
  softmax_cross_entropy<double>(logits, std::span(&label, 1), &grad, nullptr);
  net.backward(std::move(grad));
  std::vector<LayerGradients> out(graph.layers.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const TrainLayer<double>& l = net.layers()[i];
    if (l.weights.size() == 0) continue;
    out[i].weights.assign(l.grad_weights.data(),
                          l.grad_weights.data() + l.grad_weights.size());
    out[i].bias.assign(l.grad_bias.data(),
                       l.grad_bias.data() + l.grad_bias.size());
  }
  return out;
}

GradCheckResult grad_check(const ir::ModelGraph& graph, const Tensor2D& window,
                           int label, const GradCheckOptions& options) {
  const std::vector<LayerGradients> analytic =
      analytic_gradients(graph, window, label);
  const WindowedSample sample{window, label, 0, 0};

  // (layer, is_bias, index) for every parameter.
  struct Ref {
    std::size_t layer;
    bool bias;
    std::size_t index;
  };
  std::vector<Ref> all;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    for (std::size_t j = 0; j < analytic[i].weights.size(); ++j) {
      all.push_back({i, false, j});
    }
    for (std::size_t j = 0; j < analytic[i].bias.size(); ++j) {
      all.push_back({i, true, j});
    }
  }
  Rng rng(options.seed);
  if (all.size() > options.samples) {
    for (std::size_t i = 0; i < options.samples; ++i) {
      std::swap(all[i], all[i + rng.index(all.size() - i)]);
    }
    all.resize(options.samples);
  }

  Network<double> net(graph);
  // ReLU masks of the last forward pass, flattened.
  const auto relu_pattern = [&net] {
    std::vector<double> mask;
    for (const TrainLayer<double>& l : net.layers()) {
      if (l.spec.kind != LayerKind::kReLU) continue;
      mask.insert(mask.end(), l.cache.data(), l.cache.data() + l.cache.size());
    }
    return mask;
  };
  window_loss(net, graph, sample);
  const std::vector<double> base = relu_pattern();

  GradCheckResult result;
  for (const Ref& ref : all) {
    TrainLayer<double>& layer = net.layers()[ref.layer];
    double& param = ref.bias ? layer.bias(Eigen::Index(ref.index))
                             : layer.weights.data()[ref.index];
    const double saved = param;
    // A step that moves any ReLU input across zero measures the kink, not
    // the derivative; shrink it a few times before giving up on the entry.
    double h = options.step;
    bool smooth = false;
    double numeric = 0.0;
    for (int attempt = 0; attempt < 4 && !smooth; ++attempt, h *= 0.1) {
      param = saved + h;
      const double plus = window_loss(net, graph, sample);
      smooth = relu_pattern() == base;
      param = saved - h;
      const double minus = window_loss(net, graph, sample);
      smooth = smooth && relu_pattern() == base;
      numeric = (plus - minus) / (2.0 * h);
    }
    param = saved;
    if (!smooth) {
      ++result.skipped;
      continue;
    }
    const double a = ref.bias ? analytic[ref.layer].bias[ref.index]
                              : analytic[ref.layer].weights[ref.index];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace tinyhar::fp
