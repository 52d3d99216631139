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

#include <optional>
#include <string_view>

#include "svfl/transport/channel.hpp"

namespace svfl::transport {

// One party's view of a channel: stamps outgoing envelopes and checks
// incoming ones against the session and the expected message type.
class Peer {
 public:
  // A party that does not know the session id yet adopts it from the
  // first envelope it receives.
  Peer(Channel& channel, PartyCode self, std::optional<SessionId> session, Millis timeout);

  void send(MsgType type, Bytes payload);

  // Receives one envelope and requires `type`. LINK_ERROR from the peer
  // raises LinkageError, ABORT raises ProtocolError, anything else
  // unexpected raises ProtocolError.
  Envelope expect(MsgType type);
  // Like expect() but accepts any of the listed types.
  Envelope expect_one_of(std::initializer_list<MsgType> types);

  // Best-effort notification of the peer; never throws.
  void notify(MsgType type, std::string_view reason) noexcept;

  Channel& channel() { return channel_; }
  PartyCode self() const { return self_; }
  const std::optional<SessionId>& session() const { return session_; }
  Millis timeout() const { return timeout_; }

 private:
  Channel& channel_;
  PartyCode self_;
  std::optional<SessionId> session_;
  Millis timeout_;
};

// Random 8-byte session id from the system CSPRNG.
SessionId random_session_id();

}  // namespace svfl::transport
