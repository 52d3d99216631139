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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "svfl/common/bytes.hpp"

namespace svfl::transport {

inline constexpr std::array<std::uint8_t, 4> kEnvelopeMagic{'P', 'Y', 'V', 'M'};
inline constexpr std::uint16_t kEnvelopeVersion = 1;
inline constexpr std::size_t kHeaderSize = 20;
inline constexpr std::size_t kMaxPayload = std::size_t{64} << 20;

using SessionId = std::array<std::uint8_t, 8>;

// Party codes: the data scientist is 0, owners are 1..N.
using PartyCode = std::uint8_t;
inline constexpr PartyCode kScientist = 0;

enum class MsgType : std::uint8_t {
  PsiBlind = 0x10,
  PsiEval = 0x11,
  PsiDigest = 0x12,
  GlobalIds = 0x13,
  LinkError = 0x14,
  Permutation = 0x20,
  BatchRequest = 0x21,
  Forward = 0x22,
  Grad = 0x23,
  EvalRequest = 0x24,
  EvalForward = 0x25,
  EndTraining = 0x26,
  Metrics = 0x27,
  ModelSegment = 0x28,
  Abort = 0x2F,
};

bool is_registered(std::uint8_t code);
std::string_view msg_type_name(MsgType type);

struct Envelope {
  SessionId session{};
  PartyCode sender = kScientist;
  MsgType type = MsgType::Abort;
  Bytes payload;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// Header fields decoded from the first kHeaderSize bytes of a frame.
struct FrameHeader {
  SessionId session{};
  PartyCode sender = 0;
  MsgType type = MsgType::Abort;
  std::uint32_t payload_len = 0;
};

// "PYVM" | version u16 | session 8 bytes | sender u8 | type u8 |
// payload_len u32 | payload. Integers are big-endian.
Bytes encode_envelope(const Envelope& envelope);

// Throws FramingError on bad magic, unsupported version, unknown type,
// oversized length or a short header.
FrameHeader decode_header(ByteSpan header);

// Decodes exactly one complete frame; trailing or missing bytes are a
// FramingError.
Envelope decode_envelope(ByteSpan frame);

}  // namespace svfl::transport
