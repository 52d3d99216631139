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


#include "svfl/transport/peer.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "svfl/common/error.hpp"

namespace svfl::transport {

Peer::Peer(Channel& channel, PartyCode self, std::optional<SessionId> session, Millis timeout)
    : channel_(channel), self_(self), session_(session), timeout_(timeout) {}

void Peer::send(MsgType type, Bytes payload) {
  if (!session_) throw StateError("no session established yet");
  channel_.send(Envelope{*session_, self_, type, std::move(payload)});
}

Envelope Peer::expect(MsgType type) { return expect_one_of({type}); }

Envelope Peer::expect_one_of(std::initializer_list<MsgType> types) {
  Envelope env = channel_.recv(timeout_);
  if (!session_) session_ = env.session;
  if (env.session != *session_) throw ProtocolError("envelope from a different session");
  if (std::find(types.begin(), types.end(), env.type) != types.end()) return env;
  const std::string text(env.payload.begin(), env.payload.end());
  if (env.type == MsgType::LinkError) throw LinkageError("peer reported: " + text);
  if (env.type == MsgType::Abort) throw ProtocolError("peer aborted: " + text);
  throw ProtocolError("unexpected " + std::string(msg_type_name(env.type)) + " while waiting for " +
                      std::string(msg_type_name(*types.begin())));
}

void Peer::notify(MsgType type, std::string_view reason) noexcept {
  try {
    if (session_) channel_.send(Envelope{*session_, self_, type, Bytes(reason.begin(), reason.end())});
  } catch (...) {
  }
}

SessionId random_session_id() {
  std::random_device rd;
  SessionId id{};
  for (auto& b : id) b = static_cast<std::uint8_t>(rd());
  return id;
}

}  // namespace svfl::transport
