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
#include <vector>

#include "svfl/common/bytes.hpp"
#include "svfl/nn/matrix.hpp"
#include "svfl/nn/segment.hpp"

namespace svfl::training {

// Payloads of the training messages. Integers are big-endian; matrices use
// the little-endian matrix blob.

enum class EvalSplit : std::uint8_t { Train = 0, Validation = 1 };

// MODEL_SEGMENT: owner_lr (IEEE-754 bits, u64) | serialized segment
struct SetupMsg {
  double owner_lr = 0;
  nn::ModelSegment segment;
};

// PERMUTATION: epoch u32 | count u32 | count x u32 row index
struct PermutationMsg {
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> indices;
  friend bool operator==(const PermutationMsg&, const PermutationMsg&) = default;
};

// BATCH_REQUEST: epoch u32 | batch u32 | begin u32 | end u32, a range of
// positions in the epoch's permutation.
struct BatchRequestMsg {
  std::uint32_t epoch = 0;
  std::uint32_t batch = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  friend bool operator==(const BatchRequestMsg&, const BatchRequestMsg&) = default;
};

// FORWARD and GRAD: owner u8 | epoch u32 | batch u32 | matrix
struct BatchTensorMsg {
  std::uint8_t owner = 0;
  std::uint32_t epoch = 0;
  std::uint32_t batch = 0;
  nn::Matrix values;
  friend bool operator==(const BatchTensorMsg&, const BatchTensorMsg&) = default;
};

// EVAL_REQUEST: split u8 | begin u32 | end u32, rows of the aligned set.
struct EvalRequestMsg {
  EvalSplit split = EvalSplit::Validation;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  friend bool operator==(const EvalRequestMsg&, const EvalRequestMsg&) = default;
};

// EVAL_FORWARD: owner u8 | split u8 | begin u32 | end u32 | matrix
struct EvalForwardMsg {
  std::uint8_t owner = 0;
  EvalRequestMsg request;
  nn::Matrix values;
  friend bool operator==(const EvalForwardMsg&, const EvalForwardMsg&) = default;
};

Bytes encode(const SetupMsg& m);
Bytes encode(const PermutationMsg& m);
Bytes encode(const BatchRequestMsg& m);
Bytes encode(const BatchTensorMsg& m);
Bytes encode(const EvalRequestMsg& m);
Bytes encode(const EvalForwardMsg& m);

// Each decoder requires the payload to be consumed exactly and throws
// FormatError otherwise.
SetupMsg decode_setup(ByteSpan payload);
PermutationMsg decode_permutation(ByteSpan payload);
BatchRequestMsg decode_batch_request(ByteSpan payload);
BatchTensorMsg decode_batch_tensor(ByteSpan payload);
EvalRequestMsg decode_eval_request(ByteSpan payload);
EvalForwardMsg decode_eval_forward(ByteSpan payload);

}  // namespace svfl::training
