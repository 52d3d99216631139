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

#include "svfl/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svfl/common/error.hpp"

namespace svfl::nn {

GradCheckReport gradcheck(std::span<const std::span<double>> params,
                          std::span<const double> analytic,
                          const std::function<LossProbe()>& probe, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("gradcheck epsilon must be positive");
  GradCheckReport report;
  std::size_t flat = 0;
  for (auto block : params) {
    for (double& p : block) {
      if (flat >= analytic.size()) throw DimensionError("gradcheck: analytic gradient too short");
      const double saved = p;
      p = saved + epsilon;
      const LossProbe plus = probe();
      p = saved - epsilon;
      const LossProbe minus = probe();
      p = saved;

      const double a = analytic[flat++];
      if (plus.pattern != minus.pattern) {
        ++report.skipped_kinks;
        continue;
      }
      const double numeric = (plus.loss - minus.loss) / (2.0 * epsilon);
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      double err = std::abs(a - numeric) / denom;
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
      report.max_relative_error = std::max(report.max_relative_error, err);
      ++report.checked;
    }
  }
  if (flat != analytic.size()) throw DimensionError("gradcheck: analytic gradient too long");
  return report;
}

std::vector<std::span<double>> parameter_spans(ModelSegment& segment) {
  std::vector<std::span<double>> out;
  for (auto& layer : segment.layers()) {
    out.push_back(layer.weights.data());
    out.emplace_back(layer.bias);
  }
  return out;
}

double finite_diff_gradcheck(ModelSegment& segment, const Matrix& input,
                             std::span<const Label> labels, double epsilon) {
  segment.zero_grad();
  auto logits = segment.forward(input);
  auto base = softmax_cross_entropy(logits, labels);
  segment.backward(base.grad_logits);
  const auto analytic = segment.flat_gradients();
  segment.zero_grad();

  auto probe = [&] {
    auto out = segment.forward(input);
    return LossProbe{softmax_cross_entropy(out, labels).loss, segment.activation_pattern()};
  };
  auto spans = parameter_spans(segment);
  auto report = gradcheck(spans, analytic, probe, epsilon);
  segment.sgd_step(0.0);  // drops caches; parameters untouched
  return report.max_relative_error;
}

}  // namespace svfl::nn
