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

#include "svfl/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "svfl/common/error.hpp"

namespace svfl::nn {

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto z = logits.row(i);
    auto out = p.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      out[c] = std::exp(z[c] - zmax);
      sum += out[c];
    }
    for (double& v : out) v /= sum;
  }
  return p;
}

LossResult softmax_cross_entropy(const Matrix& logits, std::span<const Label> labels) {
  const std::size_t batch = logits.rows();
  const std::size_t classes = logits.cols();
  if (labels.size() != batch) {
    throw InputError("label count " + std::to_string(labels.size()) + " != batch " +
                     std::to_string(batch));
  }
  if (classes == 0) throw InputError("logits have no classes");
  for (Label y : labels) {
    if (y >= classes) throw InputError("label " + std::to_string(y) + " out of range");
  }

  LossResult r;
  r.grad_logits = Matrix(batch, classes);
  if (batch == 0) return r;

  const double inv_batch = 1.0 / static_cast<double>(batch);
  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    auto z = logits.row(i);
    auto g = r.grad_logits.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      g[c] = std::exp(z[c] - zmax);
      sum += g[c];
    }
    // -ln softmax[y] = ln(sum) - (z[y] - zmax)
    total += std::log(sum) - (z[labels[i]] - zmax);
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = g[c] / sum;
      g[c] = (p - (c == labels[i] ? 1.0 : 0.0)) * inv_batch;
    }
  }
  r.loss = total * inv_batch;
  return r;
}

std::vector<Label> argmax_rows(const Matrix& m) {
  std::vector<Label> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    out[i] = static_cast<Label>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

std::size_t count_correct(const Matrix& logits, std::span<const Label> labels) {
  if (labels.size() != logits.rows()) throw InputError("count_correct: label count mismatch");
  auto pred = argmax_rows(logits);
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) n += pred[i] == labels[i] ? 1 : 0;
  return n;
}

}  // namespace svfl::nn
