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


#include "svfl/training/concat.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "svfl/common/error.hpp"

namespace svfl::training {

namespace {

void check_order(const std::vector<std::size_t>& order, std::size_t parts) {
  if (order.size() != parts) throw ProtocolError("owner order does not cover every part");
  std::vector<bool> seen(parts, false);
  for (auto j : order) {
    if (j >= parts || seen[j]) throw ProtocolError("owner order is not a permutation");
    seen[j] = true;
  }
}

}  // namespace

std::vector<std::size_t> ascending_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

nn::Matrix concat_activations(const std::vector<nn::Matrix>& parts,
                              const std::vector<std::size_t>& order) {
  if (parts.empty()) throw ProtocolError("nothing to concatenate");
  check_order(order, parts.size());
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw ProtocolError("activation batch sizes differ: " + std::to_string(p.rows()) + " vs " +
                          std::to_string(rows));
    }
    cols += p.cols();
  }
  nn::Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto dst = out.row(r).begin();
    for (auto j : order) {
      auto src = parts[j].row(r);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

std::vector<nn::Matrix> slice_gradient(const nn::Matrix& grad, const std::vector<std::size_t>& widths,
                                       const std::vector<std::size_t>& order) {
  check_order(order, widths.size());
  const std::size_t total = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
  if (total != grad.cols()) {
    throw ProtocolError("slice widths sum to " + std::to_string(total) + " but gradient has " +
                        std::to_string(grad.cols()) + " columns");
  }
  std::vector<nn::Matrix> out(widths.size());
  for (std::size_t j = 0; j < widths.size(); ++j) out[j] = nn::Matrix(grad.rows(), widths[j]);
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    auto src = grad.row(r).begin();
    for (auto j : order) {
      auto dst = out[j].row(r);
      std::copy(src, src + static_cast<std::ptrdiff_t>(widths[j]), dst.begin());
      src += static_cast<std::ptrdiff_t>(widths[j]);
    }
  }
  return out;
}

}  // namespace svfl::training
