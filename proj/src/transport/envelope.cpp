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


#include "svfl/transport/envelope.hpp"

#include <algorithm>
#include <string>

#include "svfl/common/error.hpp"

namespace svfl::transport {

bool is_registered(std::uint8_t code) {
  return (code >= 0x10 && code <= 0x14) || (code >= 0x20 && code <= 0x28) || code == 0x2F;
}

std::string_view msg_type_name(MsgType type) {
  switch (type) {
    case MsgType::PsiBlind: return "PSI_BLIND";
    case MsgType::PsiEval: return "PSI_EVAL";
    case MsgType::PsiDigest: return "PSI_DIGEST";
    case MsgType::GlobalIds: return "GLOBAL_IDS";
    case MsgType::LinkError: return "LINK_ERROR";
    case MsgType::Permutation: return "PERMUTATION";
    case MsgType::BatchRequest: return "BATCH_REQUEST";
    case MsgType::Forward: return "FORWARD";
    case MsgType::Grad: return "GRAD";
    case MsgType::EvalRequest: return "EVAL_REQUEST";
    case MsgType::EvalForward: return "EVAL_FORWARD";
    case MsgType::EndTraining: return "END_TRAINING";
    case MsgType::Metrics: return "METRICS";
    case MsgType::ModelSegment: return "MODEL_SEGMENT";
    case MsgType::Abort: return "ABORT";
  }
  return "UNKNOWN";
}

Bytes encode_envelope(const Envelope& envelope) {
  if (envelope.payload.size() > kMaxPayload) {
    throw FramingError("payload of " + std::to_string(envelope.payload.size()) +
                       " bytes exceeds the 64 MiB frame limit");
  }
  ByteWriter out(kHeaderSize + envelope.payload.size());
  out.raw(ByteSpan(kEnvelopeMagic));
  out.u16_be(kEnvelopeVersion);
  out.raw(ByteSpan(envelope.session));
  out.u8(envelope.sender);
  out.u8(static_cast<std::uint8_t>(envelope.type));
  out.u32_be(static_cast<std::uint32_t>(envelope.payload.size()));
  out.raw(ByteSpan(envelope.payload));
  return std::move(out).take();
}

FrameHeader decode_header(ByteSpan header) {
  if (header.size() < kHeaderSize) throw FramingError("truncated frame header");
  if (!std::equal(kEnvelopeMagic.begin(), kEnvelopeMagic.end(), header.begin())) {
    throw FramingError("bad frame magic");
  }
  ByteReader in(header.first(kHeaderSize));
  in.raw(4);
  const std::uint16_t version = in.u16_be();
  if (version != kEnvelopeVersion) {
    throw FramingError("unsupported frame version " + std::to_string(version));
  }
  FrameHeader h;
  auto session = in.raw(h.session.size());
  std::copy(session.begin(), session.end(), h.session.begin());
  h.sender = in.u8();
  const std::uint8_t type = in.u8();
  if (!is_registered(type)) throw FramingError("unknown message type " + std::to_string(type));
  h.type = static_cast<MsgType>(type);
  h.payload_len = in.u32_be();
  if (h.payload_len > kMaxPayload) {
    throw FramingError("frame length " + std::to_string(h.payload_len) + " exceeds 64 MiB");
  }
  return h;
}

Envelope decode_envelope(ByteSpan frame) {
  const FrameHeader h = decode_header(frame);
  if (frame.size() != kHeaderSize + h.payload_len) {
    throw FramingError("frame holds " + std::to_string(frame.size() - kHeaderSize) +
                       " payload bytes, header says " + std::to_string(h.payload_len));
  }
  auto payload = frame.subspan(kHeaderSize);
  return Envelope{h.session, h.sender, h.type, Bytes(payload.begin(), payload.end())};
}

}  // namespace svfl::transport
