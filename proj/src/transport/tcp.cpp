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


#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "svfl/common/error.hpp"
#include "svfl/transport/channel.hpp"

namespace svfl::transport {

namespace {

using Clock = std::chrono::steady_clock;

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::ceil<Millis>(deadline - Clock::now()).count();
  return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
  return res;
}

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const Envelope& envelope) override {
    std::lock_guard lock(send_mu_);
    if (fd_ < 0) throw DisconnectError("channel closed");
    const Bytes frame = encode_envelope(envelope);
    std::size_t off = 0;
    while (off < frame.size()) {
      const ssize_t n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET) throw DisconnectError("peer closed connection");
        throw TransportError(sys_error("send"));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  Envelope recv(Millis timeout) override {
    const auto deadline = Clock::now() + timeout;
    fill(kHeaderSize, deadline);
    const FrameHeader h = decode_header(rx_);
    const std::size_t total = kHeaderSize + h.payload_len;
    fill(total, deadline);
    Envelope env = decode_envelope(ByteSpan(rx_).first(total));
    rx_.erase(rx_.begin(), rx_.begin() + static_cast<std::ptrdiff_t>(total));
    return env;
  }

  void close() override {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  // Reads until rx_ holds at least `want` bytes. A timeout keeps partial
  // data buffered for the next call.
  void fill(std::size_t want, Clock::time_point deadline) {
    std::uint8_t buf[1 << 16];
    while (rx_.size() < want) {
      pollfd p{fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw TransportError(sys_error("poll"));
      }
      if (rc == 0) {
        if (Clock::now() < deadline) continue;
        throw TimeoutError("receive timed out");
      }
      const ssize_t n = ::recv(fd_, buf, std::min(sizeof(buf), want - rx_.size()), 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        if (errno == ECONNRESET) throw DisconnectError("peer reset connection");
        throw TransportError(sys_error("recv"));
      }
      if (n == 0) {
        if (rx_.empty()) throw DisconnectError("peer closed connection");
        throw FramingError("connection closed inside a frame");
      }
      rx_.insert(rx_.end(), buf, buf + n);
    }
  }

  int fd_;
  std::mutex send_mu_;
  Bytes rx_;
};

}  // namespace

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::string last = "no attempt made";
  for (;;) {
    addrinfo* res = resolve(host, port, false);
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        freeaddrinfo(res);
        return std::make_unique<TcpChannel>(fd);
      }
      last = sys_error("connect");
      ::close(fd);
    }
    freeaddrinfo(res);
    if (Clock::now() >= deadline) {
      throw TimeoutError("cannot connect to " + host + ":" + std::to_string(port) + " (" + last +
                         ")");
    }
    std::this_thread::sleep_for(Millis(std::min(100, remaining_ms(deadline) + 1)));
  }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  addrinfo* res = resolve(host, port, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    freeaddrinfo(res);
    throw TransportError(sys_error("socket"));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
  freeaddrinfo(res);
  if (rc != 0 || ::listen(fd_, 8) != 0) {
    const std::string msg = sys_error("bind/listen on port " + std::to_string(port));
    ::close(fd_);
    throw TransportError(msg);
  }
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept(Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("poll"));
    }
    if (rc == 0) {
      if (Clock::now() < deadline) continue;
      throw TimeoutError("no connection on port " + std::to_string(port_) + " within " +
                         std::to_string(timeout.count()) + " ms");
    }
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      throw TransportError(sys_error("accept"));
    }
    return std::make_unique<TcpChannel>(fd);
  }
}

}  // namespace svfl::transport
