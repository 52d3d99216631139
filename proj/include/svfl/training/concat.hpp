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
#include <vector>

#include "svfl/nn/matrix.hpp"

namespace svfl::training {

// Column-wise concatenation: parts[order[0]] | parts[order[1]] | ...
// Throws ProtocolError if the parts disagree on row count or `order` is not
// a permutation of the part indices.
nn::Matrix concat_activations(const std::vector<nn::Matrix>& parts,
                              const std::vector<std::size_t>& order);

// Inverse of concat_activations: returns one block per part, where part j
// has widths[j] columns and the blocks sit in `order` along the columns.
// Throws ProtocolError if the widths do not add up to grad.cols().
std::vector<nn::Matrix> slice_gradient(const nn::Matrix& grad, const std::vector<std::size_t>& widths,
                                       const std::vector<std::size_t>& order);

// 0, 1, ..., n-1
std::vector<std::size_t> ascending_order(std::size_t n);

}  // namespace svfl::training
