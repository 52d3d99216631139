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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "svfl/nn/loss.hpp"
#include "svfl/nn/matrix.hpp"
#include "svfl/nn/segment.hpp"

namespace svfl::nn {

// Gradients smaller than this are compared absolutely: the relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-4;

struct LossProbe {
  double loss = 0.0;
  // ReLU mask fingerprint. A central difference whose two sides see
  // different masks straddles a kink and is not a valid derivative estimate.
  std::uint64_t pattern = 0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

// Perturbs every entry of `params` by +-epsilon, calls `probe` and compares
// the central difference against `analytic` (same flat layout).
GradCheckReport gradcheck(std::span<const std::span<double>> params,
                          std::span<const double> analytic,
                          const std::function<LossProbe()>& probe, double epsilon);

// Softmax cross-entropy of the segment's output against `labels`, checked
// over every weight and bias. Leaves parameters unchanged and gradients zero.
double finite_diff_gradcheck(ModelSegment& segment, const Matrix& input,
                             std::span<const Label> labels, double epsilon = 1e-5);

// Mutable spans over every parameter of the segment, weights before bias.
std::vector<std::span<double>> parameter_spans(ModelSegment& segment);

}  // namespace svfl::nn
