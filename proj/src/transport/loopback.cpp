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


#include <condition_variable>
#include <deque>

#include "svfl/common/error.hpp"
#include "svfl/transport/channel.hpp"

namespace svfl::transport {

namespace {

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> frames;
  bool closed = false;

  void close() {
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class LoopbackChannel final : public Channel {
 public:
  LoopbackChannel(std::shared_ptr<Pipe> out, std::shared_ptr<Pipe> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~LoopbackChannel() override { close(); }

  void send(const Envelope& envelope) override {
    Bytes frame = encode_envelope(envelope);
    {
      std::lock_guard lock(out_->mu);
      if (out_->closed) throw DisconnectError("loopback channel closed");
      out_->frames.push_back(std::move(frame));
    }
    out_->cv.notify_one();
  }

  Envelope recv(Millis timeout) override {
    std::unique_lock lock(in_->mu);
    if (!in_->cv.wait_for(lock, timeout, [&] { return !in_->frames.empty() || in_->closed; })) {
      throw TimeoutError("receive timed out after " + std::to_string(timeout.count()) + " ms");
    }
    if (in_->frames.empty()) throw DisconnectError("peer closed the loopback channel");
    Bytes frame = std::move(in_->frames.front());
    in_->frames.pop_front();
    lock.unlock();
    return decode_envelope(frame);
  }

  void close() override {
    out_->close();
    in_->close();
  }

 private:
  std::shared_ptr<Pipe> out_;
  std::shared_ptr<Pipe> in_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> loopback_pair() {
  auto a_to_b = std::make_shared<Pipe>();
  auto b_to_a = std::make_shared<Pipe>();
  return {std::make_unique<LoopbackChannel>(a_to_b, b_to_a),
          std::make_unique<LoopbackChannel>(b_to_a, a_to_b)};
}

void MessageLog::add(LogRecord record) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(record));
}

std::vector<LogRecord> MessageLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

void MessageLog::clear() {
  std::lock_guard lock(mu_);
  records_.clear();
}

LoggingChannel::LoggingChannel(std::unique_ptr<Channel> inner, std::shared_ptr<MessageLog> log,
                               PartyCode self, std::string name)
    : inner_(std::move(inner)), log_(std::move(log)), self_(self), name_(std::move(name)) {}

void LoggingChannel::send(const Envelope& envelope) { inner_->send(envelope); }

Envelope LoggingChannel::recv(Millis timeout) {
  Envelope env = inner_->recv(timeout);
  log_->add(LogRecord{name_, env.sender, self_, env});
  return env;
}

void LoggingChannel::close() { inner_->close(); }

}  // namespace svfl::transport
