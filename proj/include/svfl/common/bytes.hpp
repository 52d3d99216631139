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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svfl/common/error.hpp"

namespace svfl {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

inline ByteSpan as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Append-only buffer with explicit byte order per call.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { buf_.reserve(reserve); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16_be(std::uint16_t v) { put_be(v, 2); }
  void u32_be(std::uint32_t v) { put_be(v, 4); }
  void u64_be(std::uint64_t v) { put_be(v, 8); }
  void u32_le(std::uint32_t v) { put_le(v, 4); }
  void u64_le(std::uint64_t v) { put_le(v, 8); }
  void f64_le(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }

  void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void raw(std::string_view s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  std::size_t size() const { return buf_.size(); }
  const Bytes& bytes() const& { return buf_; }
  Bytes take() && { return std::move(buf_); }

 private:
  void put_be(std::uint64_t v, int n) {
    for (int i = n - 1; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes buf_;
};

// Bounds-checked cursor over a byte span. Reading past the end throws
// FormatError so callers never see a partially decoded value.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_be(1)); }
  std::uint16_t u16_be() { return static_cast<std::uint16_t>(get_be(2)); }
  std::uint32_t u32_be() { return static_cast<std::uint32_t>(get_be(4)); }
  std::uint64_t u64_be() { return get_be(8); }
  std::uint32_t u32_le() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64_le() { return get_le(8); }
  double f64_le() { return std::bit_cast<double>(get_le(8)); }

  ByteSpan raw(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::string str(std::size_t n) {
    auto s = raw(n);
    return {s.begin(), s.end()};
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }

  void expect_done(const char* what) const {
    if (!done()) throw FormatError(std::string(what) + ": trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) throw FormatError("unexpected end of data");
  }
  std::uint64_t get_be(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t get_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_++]} << (8 * i);
    return v;
  }

  ByteSpan data_;
  std::size_t pos_ = 0;
};

}  // namespace svfl
