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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svfl/common/bytes.hpp"
#include "svfl/nn/matrix.hpp"

namespace svfl::nn {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1 };

std::string to_string(Activation a);
Activation parse_activation(std::string_view name);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::Identity;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Shape of one party's stack of dense layers.
struct SegmentSpec {
  std::vector<LayerShape> layers;

  std::size_t input_width() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_width() const { return layers.empty() ? 0 : layers.back().out; }

  // Throws SpecError unless the chain is non-empty, every dim is positive and
  // out[i] == in[i+1].
  void validate() const;

  // "392x64:relu" or "128x500:relu,500x10:identity"
  static SegmentSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::Identity;

  Matrix grad_weights;
  std::vector<double> grad_bias;

  // Set by forward(), consumed by backward(), dropped by sgd_step().
  std::optional<Matrix> cached_input;
  std::optional<Matrix> cached_output;

  std::size_t in() const { return weights.cols(); }
  std::size_t out() const { return weights.rows(); }
};

// A contiguous stack of dense layers held by one party.
//
// forward() caches what backward() needs; backward() accumulates parameter
// gradients; sgd_step() applies and clears them. infer() is a pure forward
// pass that leaves the segment untouched.
class ModelSegment {
 public:
  ModelSegment() = default;

  // Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero. The
  // draw is a fixed function of (spec, seed) on every platform.
  static ModelSegment init(const SegmentSpec& spec, std::uint64_t seed);

  Matrix forward(const Matrix& input);
  Matrix infer(const Matrix& input) const;

  // Returns d(loss)/d(input). When need_input_grad is false the input
  // gradient is skipped and an empty matrix comes back; parameter gradients
  // are accumulated either way.
  Matrix backward(const Matrix& grad_output, bool need_input_grad = true);

  void sgd_step(double lr);
  void zero_grad();

  SegmentSpec spec() const;
  std::size_t input_width() const;
  std::size_t output_width() const;
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Flat views over every parameter / gradient, layer by layer, weights
  // before bias.
  std::vector<double> flat_parameters() const;
  std::vector<double> flat_gradients() const;

  // Fingerprint of the ReLU on/off pattern of the last forward() call.
  std::uint64_t activation_pattern() const;

  // Spec plus every parameter (no gradients, no caches).
  void serialize(ByteWriter& out) const;
  static ModelSegment deserialize(ByteReader& in);

  bool same_parameters(const ModelSegment& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace svfl::nn
