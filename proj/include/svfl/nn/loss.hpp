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
#include <span>
#include <vector>

#include "svfl/nn/matrix.hpp"

namespace svfl::nn {

using Label = std::uint32_t;

struct LossResult {
  double loss = 0.0;   // mean over the batch of -ln p[label]
  Matrix grad_logits;  // (softmax - onehot) / B
};

// Row-wise softmax with the row max subtracted first.
Matrix softmax(const Matrix& logits);

LossResult softmax_cross_entropy(const Matrix& logits, std::span<const Label> labels);

// Index of the largest entry in each row; ties resolve to the lowest index.
std::vector<Label> argmax_rows(const Matrix& m);

std::size_t count_correct(const Matrix& logits, std::span<const Label> labels);

}  // namespace svfl::nn
