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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tinyhar/error.h"

namespace tinyhar::ir {
namespace {

constexpr std::size_t kHeaderBytes = 32;
constexpr std::size_t kQuantParamBytes = 12;
constexpr std::size_t kLayerRecordBytes = 20;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void zeros(std::size_t n) { out_.insert(out_.end(), n, 0); }

  void count(std::size_t n) {
    if (n > 0xFFFFFFFFu) {
      throw Error(ErrorCode::kInvalidArgument, "tensor too large to encode");
    }
    u32(static_cast<std::uint32_t>(n));
  }

  void floats(const std::vector<float>& v) {
    count(v.size());
    for (float x : v) f32(x);
  }
  void int8s(const std::vector<std::int8_t>& v) {
    count(v.size());
    for (std::int8_t x : v) u8(std::bit_cast<std::uint8_t>(x));
  }
  void int32s(const std::vector<std::int32_t>& v) {
    count(v.size());
    for (std::int32_t x : v) i32(x);
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(in_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return std::bit_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

  std::size_t expect_count(std::size_t expected, const char* what) {
    const std::uint32_t n = u32();
    if (n != expected) {
      throw Error(ErrorCode::kCorruptHeader,
                  std::string(what) + " tensor holds " + std::to_string(n) +
                      " values, layer spec requires " +
                      std::to_string(expected));
    }
    return n;
  }

  std::vector<float> floats(std::size_t expected, const char* what) {
    const std::size_t n = expect_count(expected, what);
    need(4 * n);
    std::vector<float> v(n);
    for (float& x : v) x = f32();
    return v;
  }
  std::vector<std::int8_t> int8s(std::size_t expected, const char* what) {
    const std::size_t n = expect_count(expected, what);
    need(n);
    std::vector<std::int8_t> v(n);
    for (std::int8_t& x : v) x = std::bit_cast<std::int8_t>(in_[pos_++]);
    return v;
  }
  std::vector<std::int32_t> int32s(std::size_t expected, const char* what) {
    const std::size_t n = expect_count(expected, what);
    need(4 * n);
    std::vector<std::int32_t> v(n);
    for (std::int32_t& x : v) x = i32();
    return v;
  }

  bool at_end() const { return pos_ == in_.size(); }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedPayload,
                  "model file ends at byte " + std::to_string(in_.size()) +
                      ", needed " + std::to_string(pos_ + n));
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t narrow(std::size_t v) {
  if (v > 0xFFFFFFFFu) {
    throw Error(ErrorCode::kInvalidArgument, "dimension too large to encode");
  }
  return static_cast<std::uint32_t>(v);
}

void write_header(ByteWriter& w, Precision precision, const Shape& input,
                  std::size_t num_classes, std::size_t layer_count) {
  for (char c : kModelMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kModelVersion);
  w.u8(static_cast<std::uint8_t>(precision));
  w.zeros(3);
  w.u32(narrow(input.steps));
  w.u32(narrow(input.channels));
  w.u32(narrow(num_classes));
  w.u32(narrow(layer_count));
  w.u32(0);
}

void write_layer_record(ByteWriter& w, const LayerSpec& spec) {
  w.u8(static_cast<std::uint8_t>(spec.kind));
  w.zeros(3);
  std::uint32_t a = 0, b = 0, c = 0;
  switch (spec.kind) {
    case LayerKind::kConv1D:
      a = narrow(spec.in), b = narrow(spec.out), c = narrow(spec.kernel);
      break;
    case LayerKind::kDense:
    case LayerKind::kLSTM:
      a = narrow(spec.in), b = narrow(spec.out);
      break;
    case LayerKind::kAvgPool1D:
      a = narrow(spec.pool);
      break;
    default:
      break;
  }
  w.u32(a);
  w.u32(b);
  w.u32(c);
  w.f32(spec.kind == LayerKind::kDropout ? spec.rate : 0.0f);
}

LayerSpec read_layer_record(ByteReader& r) {
  const std::uint8_t kind = r.u8();
  r.skip(3);
  if (kind > static_cast<std::uint8_t>(LayerKind::kFlatten)) {
    throw Error(ErrorCode::kCorruptHeader,
                "unknown layer kind " + std::to_string(kind));
  }
  const std::uint32_t a = r.u32(), b = r.u32(), c = r.u32();
  const float rate = r.f32();
  LayerSpec spec;
  spec.kind = static_cast<LayerKind>(kind);
  switch (spec.kind) {
    case LayerKind::kConv1D:
      spec = LayerSpec::conv1d(a, b, c);
      break;
    case LayerKind::kDense:
      spec = LayerSpec::dense(a, b);
      break;
    case LayerKind::kLSTM:
      spec = LayerSpec::lstm(a, b);
      break;
    case LayerKind::kAvgPool1D:
      spec = LayerSpec::avg_pool1d(a);
      break;
    case LayerKind::kDropout:
      spec = LayerSpec::dropout(rate);
      break;
    default:
      break;
  }
  return spec;
}

void write_qp(ByteWriter& w, const QuantParams& qp) {
  w.f64(qp.scale);
  w.i32(qp.zero_point);
}

QuantParams read_qp(ByteReader& r) {
  QuantParams qp;
  qp.scale = r.f64();
  qp.zero_point = r.i32();
  return qp;
}

struct Header {
  Precision precision;
  Shape input;
  std::size_t num_classes;
  std::size_t layer_count;
};

Header read_header(ByteReader& r) {
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kModelMagic, 4) != 0) {
    throw Error(ErrorCode::kCorruptHeader, "bad magic, not a .thar model");
  }
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model file version " + std::to_string(version) +
                    ", this build reads version " +
                    std::to_string(kModelVersion));
  }
  const std::uint8_t precision = r.u8();
  if (precision > static_cast<std::uint8_t>(Precision::kInt8Full)) {
    throw Error(ErrorCode::kCorruptHeader,
                "unknown precision tag " + std::to_string(precision));
  }
  r.skip(3);
  Header h;
  h.precision = static_cast<Precision>(precision);
  h.input.steps = r.u32();
  h.input.channels = r.u32();
  h.num_classes = r.u32();
  h.layer_count = r.u32();
  r.skip(4);
  return h;
}

std::size_t float_tensor_bytes(std::size_t n) { return 4 + 4 * n; }

}  // namespace

std::vector<std::uint8_t> serialize(const ModelGraph& graph) {
  graph.validate();
  ByteWriter w;
  write_header(w, Precision::kFloat32, graph.input_shape, graph.num_classes,
               graph.layers.size());
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const LayerSpec& spec = graph.layers[i];
    write_layer_record(w, spec);
    if (!spec.has_params()) continue;
    const LayerParams& p = graph.params[i];
    w.floats(p.weights);
    if (spec.kind == LayerKind::kLSTM) w.floats(p.recurrent);
    w.floats(p.bias);
  }
  return w.take();
}

std::vector<std::uint8_t> serialize(const QuantizedModel& model) {
  ByteWriter w;
  write_header(w, Precision::kInt8Full, model.input_shape, model.num_classes,
               model.layers.size());
  write_qp(w, model.input);
  for (const QuantizedLayer& layer : model.layers) {
    write_layer_record(w, layer.spec);
    write_qp(w, layer.output);
    if (!layer.spec.has_params()) continue;
    w.f64(layer.weight_scale);
    if (layer.spec.kind == LayerKind::kLSTM) w.f64(layer.recurrent_scale);
    w.i32(layer.multiplier.mantissa);
    w.i32(layer.multiplier.exponent);
    w.int8s(layer.weights);
    if (layer.spec.kind == LayerKind::kLSTM) w.int8s(layer.recurrent);
    w.int32s(layer.bias);
  }
  return w.take();
}

Precision peek_precision(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  return read_header(r).precision;
}

LoadedModel deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const Header h = read_header(r);
  LoadedModel result;
  if (h.precision == Precision::kFloat32) {
    ModelGraph g;
    g.input_shape = h.input;
    g.num_classes = h.num_classes;
    for (std::size_t i = 0; i < h.layer_count; ++i) {
      const LayerSpec spec = read_layer_record(r);
      LayerParams p;
      if (spec.has_params()) {
        p.weights = r.floats(expected_weight_count(spec), "weight");
        if (spec.kind == LayerKind::kLSTM) {
          p.recurrent = r.floats(expected_recurrent_count(spec), "recurrent");
        }
        p.bias = r.floats(expected_bias_count(spec), "bias");
      }
      g.layers.push_back(spec);
      g.params.push_back(std::move(p));
    }
    if (!r.at_end()) {
      throw Error(ErrorCode::kCorruptHeader, "trailing bytes after payload");
    }
    g.validate();
    result = std::move(g);
  } else {
    QuantizedModel m;
    m.input_shape = h.input;
    m.num_classes = h.num_classes;
    m.input = read_qp(r);
    for (std::size_t i = 0; i < h.layer_count; ++i) {
      QuantizedLayer layer;
      layer.spec = read_layer_record(r);
      layer.output = read_qp(r);
      if (layer.spec.has_params()) {
        const bool lstm = layer.spec.kind == LayerKind::kLSTM;
        layer.weight_scale = r.f64();
        if (lstm) layer.recurrent_scale = r.f64();
        layer.multiplier.mantissa = r.i32();
        layer.multiplier.exponent = r.i32();
        layer.weights = r.int8s(expected_weight_count(layer.spec), "weight");
        if (lstm) {
          layer.recurrent =
              r.int8s(expected_recurrent_count(layer.spec), "recurrent");
        }
        layer.bias = r.int32s(expected_bias_count(layer.spec), "bias");
      }
      m.layers.push_back(std::move(layer));
    }
    if (!r.at_end()) {
      throw Error(ErrorCode::kCorruptHeader, "trailing bytes after payload");
    }
    m.skeleton().validate();
    result = std::move(m);
  }
  return result;
}

std::size_t model_size_bytes(const ModelGraph& graph, Precision precision) {
  std::size_t bytes = kHeaderBytes;
  if (precision == Precision::kInt8Full) bytes += kQuantParamBytes;
  for (const LayerSpec& spec : graph.layers) {
    bytes += kLayerRecordBytes;
    const bool lstm = spec.kind == LayerKind::kLSTM;
    if (precision == Precision::kFloat32) {
      if (!spec.has_params()) continue;
      bytes += float_tensor_bytes(expected_weight_count(spec));
      if (lstm) bytes += float_tensor_bytes(expected_recurrent_count(spec));
      bytes += float_tensor_bytes(expected_bias_count(spec));
    } else {
      bytes += kQuantParamBytes;
      if (!spec.has_params()) continue;
      bytes += 8 + (lstm ? 8 : 0) + 8;
      bytes += 4 + expected_weight_count(spec);
      if (lstm) bytes += 4 + expected_recurrent_count(spec);
      bytes += 4 + 4 * expected_bias_count(spec);
    }
  }
  return bytes;
}

void save_model(const std::filesystem::path& path, const ModelGraph& graph) {
  write_file_bytes(path, serialize(graph));
}

void save_model(const std::filesystem::path& path,
                const QuantizedModel& model) {
  write_file_bytes(path, serialize(model));
}

LoadedModel load_model(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  return deserialize(bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in),
          std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace tinyhar::ir
