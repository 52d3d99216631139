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

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "svfl/transport/envelope.hpp"

namespace svfl::transport {

using Millis = std::chrono::milliseconds;

// Ordered, reliable, bidirectional message pipe. One sender task and one
// receiver task per endpoint.
class Channel {
 public:
  virtual ~Channel() = default;

  // Throws DisconnectError once either side has closed.
  virtual void send(const Envelope& envelope) = 0;
  // Throws TimeoutError after `timeout`, DisconnectError when the peer
  // closed and nothing is left to read, FramingError on a malformed frame.
  virtual Envelope recv(Millis timeout) = 0;
  virtual void close() = 0;
};

// Two connected in-memory endpoints. Frames are encoded on send and
// decoded on receive, so framing errors surface as with TCP.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> loopback_pair();

// Dials host:port, retrying refused connections until `timeout` elapses.
// Throws TimeoutError if no connection could be made.
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port, Millis timeout);

class TcpListener {
 public:
  // Binds and listens; port 0 picks an ephemeral port.
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Throws TimeoutError if nobody connects within `timeout`.
  std::unique_ptr<Channel> accept(Millis timeout);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// One observed frame.
struct LogRecord {
  std::string channel;  // name given to the receiving LoggingChannel
  PartyCode from = 0;
  PartyCode to = 0;
  Envelope envelope;
};

// Thread-safe record of every frame delivered through LoggingChannels.
class MessageLog {
 public:
  void add(LogRecord record);
  std::vector<LogRecord> records() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<LogRecord> records_;
};

// Decorator that records each received frame as delivered from its sender
// code to `self`. Wrapping every endpoint logs all delivered traffic.
class LoggingChannel final : public Channel {
 public:
  LoggingChannel(std::unique_ptr<Channel> inner, std::shared_ptr<MessageLog> log,
                 PartyCode self, std::string name);

  void send(const Envelope& envelope) override;
  Envelope recv(Millis timeout) override;
  void close() override;

 private:
  std::unique_ptr<Channel> inner_;
  std::shared_ptr<MessageLog> log_;
  PartyCode self_;
  std::string name_;
};

}  // namespace svfl::transport
