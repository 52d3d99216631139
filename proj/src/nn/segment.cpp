// Copyright 2026 The svfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svfl/nn/segment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "svfl/common/error.hpp"
#include "svfl/nn/kernels.hpp"

namespace svfl::nn {

std::string to_string(Activation a) {
  return a == Activation::ReLU ? "relu" : "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "identity" || name == "linear") return Activation::Identity;
  throw SpecError("unknown activation '" + std::string(name) + "'");
}

void SegmentSpec::validate() const {
  if (layers.empty()) throw SpecError("segment has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].in == 0 || layers[i].out == 0) {
      throw SpecError("layer " + std::to_string(i) + " has a zero dimension");
    }
    if (i + 1 < layers.size() && layers[i].out != layers[i + 1].in) {
      throw SpecError("layer " + std::to_string(i) + " outputs " + std::to_string(layers[i].out) +
                      " but layer " + std::to_string(i + 1) + " expects " +
                      std::to_string(layers[i + 1].in));
    }
  }
}

namespace {

std::size_t parse_dim(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw SpecError("bad layer dimension '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SegmentSpec SegmentSpec::parse(std::string_view text) {
  SegmentSpec spec;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

    auto colon = item.find(':');
    auto dims = item.substr(0, colon);
    auto act = colon == std::string_view::npos ? std::string_view{"identity"}
                                               : item.substr(colon + 1);
    auto x = dims.find('x');
    if (x == std::string_view::npos) throw SpecError("layer '" + std::string(item) + "' lacks 'x'");
    spec.layers.push_back({parse_dim(dims.substr(0, x)), parse_dim(dims.substr(x + 1)),
                           parse_activation(act)});
  }
  spec.validate();
  return spec;
}

std::string SegmentSpec::to_string() const {
  std::string out;
  for (const auto& l : layers) {
    if (!out.empty()) out += ',';
    out += std::to_string(l.in) + "x" + std::to_string(l.out) + ":" + nn::to_string(l.activation);
  }
  return out;
}

ModelSegment ModelSegment::init(const SegmentSpec& spec, std::uint64_t seed) {
  spec.validate();
  // mt19937_64 output is fixed by the standard; the mapping to [0,1) below
  // is ours, so the parameters do not depend on the library's distributions.
  std::mt19937_64 rng(seed);
  ModelSegment seg;
  for (const auto& shape : spec.layers) {
    DenseLayer layer;
    layer.activation = shape.activation;
    layer.weights = Matrix(shape.out, shape.in);
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.in));
    for (double& w : layer.weights.data()) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w = (2.0 * u - 1.0) * bound;
    }
    layer.bias.assign(shape.out, 0.0);
    layer.grad_weights = Matrix(shape.out, shape.in);
    layer.grad_bias.assign(shape.out, 0.0);
    seg.layers_.push_back(std::move(layer));
  }
  return seg;
}

namespace {

void apply_activation(Activation a, Matrix& m) {
  if (a == Activation::ReLU) {
    for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
  }
}

}  // namespace

Matrix ModelSegment::forward(const Matrix& input) {
  if (layers_.empty()) throw StateError("forward on an empty segment");
  if (input.cols() != input_width()) {
    throw DimensionError("segment expects " + std::to_string(input_width()) +
                         " input columns, got " + std::to_string(input.cols()));
  }
  const Matrix* x = &input;
  for (auto& layer : layers_) {
    layer.cached_input = *x;
    Matrix y(x->rows(), layer.out());
    kernels::affine_forward(*x, layer.weights, layer.bias, y);
    apply_activation(layer.activation, y);
    layer.cached_output = std::move(y);
    x = &*layer.cached_output;
  }
  return *x;
}

Matrix ModelSegment::infer(const Matrix& input) const {
  if (layers_.empty()) throw StateError("infer on an empty segment");
  if (input.cols() != input_width()) {
    throw DimensionError("segment expects " + std::to_string(input_width()) +
                         " input columns, got " + std::to_string(input.cols()));
  }
  Matrix x = input;
  for (const auto& layer : layers_) {
    Matrix y(x.rows(), layer.out());
    kernels::affine_forward(x, layer.weights, layer.bias, y);
    apply_activation(layer.activation, y);
    x = std::move(y);
  }
  return x;
}

Matrix ModelSegment::backward(const Matrix& grad_output, bool need_input_grad) {
  if (layers_.empty() || !layers_.back().cached_output) {
    throw StateError("backward called without a preceding forward");
  }
  const Matrix& out = *layers_.back().cached_output;
  if (grad_output.rows() != out.rows() || grad_output.cols() != out.cols()) {
    throw DimensionError("grad_output shape does not match the cached forward output");
  }

  Matrix grad = grad_output;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    auto& layer = layers_[li];
    if (!layer.cached_input || !layer.cached_output) {
      throw StateError("layer cache missing during backward");
    }
    if (layer.activation == Activation::ReLU) {
      auto y = layer.cached_output->data();
      auto g = grad.data();
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(y[k] > 0.0)) g[k] = 0.0;
      }
    }
    kernels::accumulate_param_grad(grad, *layer.cached_input, layer.grad_weights,
                                   layer.grad_bias);
    if (li == 0 && !need_input_grad) return {};
    Matrix grad_in(grad.rows(), layer.in());
    kernels::input_grad(grad, layer.weights, grad_in);
    grad = std::move(grad_in);
  }
  return grad;
}

void ModelSegment::sgd_step(double lr) {
  for (auto& layer : layers_) {
    auto w = layer.weights.data();
    auto gw = layer.grad_weights.data();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * gw[k];
    for (std::size_t k = 0; k < layer.bias.size(); ++k) layer.bias[k] -= lr * layer.grad_bias[k];
    layer.cached_input.reset();
    layer.cached_output.reset();
  }
  zero_grad();
}

void ModelSegment::zero_grad() {
  for (auto& layer : layers_) {
    layer.grad_weights.fill(0.0);
    std::fill(layer.grad_bias.begin(), layer.grad_bias.end(), 0.0);
  }
}

SegmentSpec ModelSegment::spec() const {
  SegmentSpec s;
  for (const auto& l : layers_) s.layers.push_back({l.in(), l.out(), l.activation});
  return s;
}

std::size_t ModelSegment::input_width() const {
  return layers_.empty() ? 0 : layers_.front().in();
}

std::size_t ModelSegment::output_width() const {
  return layers_.empty() ? 0 : layers_.back().out();
}

std::size_t ModelSegment::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> ModelSegment::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

std::vector<double> ModelSegment::flat_gradients() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.grad_weights.data().begin(), l.grad_weights.data().end());
    out.insert(out.end(), l.grad_bias.begin(), l.grad_bias.end());
  }
  return out;
}

std::uint64_t ModelSegment::activation_pattern() const {
  // FNV-1a over the ReLU masks.
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& l : layers_) {
    if (l.activation != Activation::ReLU || !l.cached_output) continue;
    for (double v : l.cached_output->data()) {
      h ^= v > 0.0 ? 1U : 0U;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void ModelSegment::serialize(ByteWriter& out) const {
  out.u32_le(static_cast<std::uint32_t>(layers_.size()));
  for (const auto& l : layers_) {
    out.u8(static_cast<std::uint8_t>(l.activation));
    write_matrix(out, l.weights);
    for (double b : l.bias) out.f64_le(b);
  }
}

ModelSegment ModelSegment::deserialize(ByteReader& in) {
  const std::uint32_t n = in.u32_le();
  ModelSegment seg;
  SegmentSpec spec;
  for (std::uint32_t i = 0; i < n; ++i) {
    DenseLayer layer;
    const std::uint8_t act = in.u8();
    if (act > 1) throw FormatError("unknown activation code");
    layer.activation = static_cast<Activation>(act);
    layer.weights = read_matrix(in);
    layer.bias.resize(layer.weights.rows());
    for (double& b : layer.bias) b = in.f64_le();
    layer.grad_weights = Matrix(layer.weights.rows(), layer.weights.cols());
    layer.grad_bias.assign(layer.weights.rows(), 0.0);
    spec.layers.push_back({layer.in(), layer.out(), layer.activation});
    seg.layers_.push_back(std::move(layer));
  }
  try {
    spec.validate();
  } catch (const SpecError& e) {
    throw FormatError(std::string("serialized segment: ") + e.what());
  }
  return seg;
}

bool ModelSegment::same_parameters(const ModelSegment& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.activation != b.activation || !(a.weights == b.weights) || a.bias != b.bias) return false;
  }
  return true;
}

}  // namespace svfl::nn
