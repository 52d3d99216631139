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


#include "svfl/training/messages.hpp"

#include <bit>

#include "svfl/common/error.hpp"

namespace svfl::training {

namespace {

EvalSplit read_split(ByteReader& in) {
  const std::uint8_t s = in.u8();
  if (s > 1) throw FormatError("unknown evaluation split " + std::to_string(s));
  return static_cast<EvalSplit>(s);
}

void write_request(ByteWriter& out, const EvalRequestMsg& m) {
  out.u8(static_cast<std::uint8_t>(m.split));
  out.u32_be(m.begin);
  out.u32_be(m.end);
}

EvalRequestMsg read_request(ByteReader& in) {
  EvalRequestMsg m;
  m.split = read_split(in);
  m.begin = in.u32_be();
  m.end = in.u32_be();
  if (m.end < m.begin) throw FormatError("evaluation range is reversed");
  return m;
}

}  // namespace

Bytes encode(const SetupMsg& m) {
  ByteWriter out;
  out.u64_be(std::bit_cast<std::uint64_t>(m.owner_lr));
  m.segment.serialize(out);
  return std::move(out).take();
}

SetupMsg decode_setup(ByteSpan payload) {
  ByteReader in(payload);
  SetupMsg m;
  m.owner_lr = std::bit_cast<double>(in.u64_be());
  m.segment = nn::ModelSegment::deserialize(in);
  in.expect_done("MODEL_SEGMENT");
  return m;
}

Bytes encode(const PermutationMsg& m) {
  ByteWriter out(8 + 4 * m.indices.size());
  out.u32_be(m.epoch);
  out.u32_be(static_cast<std::uint32_t>(m.indices.size()));
  for (auto i : m.indices) out.u32_be(i);
  return std::move(out).take();
}

PermutationMsg decode_permutation(ByteSpan payload) {
  ByteReader in(payload);
  PermutationMsg m;
  m.epoch = in.u32_be();
  const std::uint32_t n = in.u32_be();
  if (in.remaining() != std::size_t{n} * 4) throw FormatError("PERMUTATION: wrong length");
  m.indices.resize(n);
  for (auto& i : m.indices) i = in.u32_be();
  return m;
}

Bytes encode(const BatchRequestMsg& m) {
  ByteWriter out(16);
  out.u32_be(m.epoch);
  out.u32_be(m.batch);
  out.u32_be(m.begin);
  out.u32_be(m.end);
  return std::move(out).take();
}

BatchRequestMsg decode_batch_request(ByteSpan payload) {
  ByteReader in(payload);
  BatchRequestMsg m;
  m.epoch = in.u32_be();
  m.batch = in.u32_be();
  m.begin = in.u32_be();
  m.end = in.u32_be();
  in.expect_done("BATCH_REQUEST");
  if (m.end <= m.begin) throw FormatError("BATCH_REQUEST: empty or reversed range");
  return m;
}

Bytes encode(const BatchTensorMsg& m) {
  ByteWriter out(17 + 8 * m.values.rows() * m.values.cols());
  out.u8(m.owner);
  out.u32_be(m.epoch);
  out.u32_be(m.batch);
  nn::write_matrix(out, m.values);
  return std::move(out).take();
}

BatchTensorMsg decode_batch_tensor(ByteSpan payload) {
  ByteReader in(payload);
  BatchTensorMsg m;
  m.owner = in.u8();
  m.epoch = in.u32_be();
  m.batch = in.u32_be();
  m.values = nn::read_matrix(in);
  in.expect_done("batch tensor");
  return m;
}

Bytes encode(const EvalRequestMsg& m) {
  ByteWriter out(9);
  write_request(out, m);
  return std::move(out).take();
}

EvalRequestMsg decode_eval_request(ByteSpan payload) {
  ByteReader in(payload);
  auto m = read_request(in);
  in.expect_done("EVAL_REQUEST");
  return m;
}

Bytes encode(const EvalForwardMsg& m) {
  ByteWriter out(18 + 8 * m.values.rows() * m.values.cols());
  out.u8(m.owner);
  write_request(out, m.request);
  nn::write_matrix(out, m.values);
  return std::move(out).take();
}

EvalForwardMsg decode_eval_forward(ByteSpan payload) {
  ByteReader in(payload);
  EvalForwardMsg m;
  m.owner = in.u8();
  m.request = read_request(in);
  m.values = nn::read_matrix(in);
  in.expect_done("EVAL_FORWARD");
  return m;
}

}  // namespace svfl::training
