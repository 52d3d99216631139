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

#include <cstddef>
#include <cstdint>

#include "svfl/common/bytes.hpp"

namespace svfl::psi {

struct BloomParams {
  std::uint64_t bits = 0;    // m
  std::uint32_t hashes = 0;  // k

  friend bool operator==(const BloomParams&, const BloomParams&) = default;
};

// m = ceil(-n ln(fpr) / ln(2)^2), k = max(1, round(m/n * ln 2)).
// Throws InputError unless n >= 1 and 0 < fpr < 1.
BloomParams derive_bloom_params(std::uint64_t n, double fpr);

// Bloom filter over byte strings. Probe i of item x lands on bit
// (h1(x) + i * h2(x) + (i^3 - i) / 6) mod m, where h1 and h2 are the leading 8 bytes
// (big-endian) of two domain-separated SHA-256 digests of x. Bit j lives in
// byte j / 8 under mask 1 << (j % 8).
class BloomFilter {
 public:
  BloomFilter() = default;
  BloomFilter(std::uint64_t capacity, double target_fpr);
  BloomFilter(BloomParams params, Bytes bits);

  void insert(ByteSpan item);
  bool contains(ByteSpan item) const;

  std::uint64_t bit_count() const { return params_.bits; }
  std::uint32_t hash_count() const { return params_.hashes; }
  std::uint64_t capacity() const { return capacity_; }
  double target_fpr() const { return target_fpr_; }
  const Bytes& bits() const { return bits_; }

  // m (u64 BE), k (u32 BE), ceil(m/8) bytes of bits.
  void serialize(ByteWriter& out) const;
  static BloomFilter deserialize(ByteReader& in);

 private:
  template <typename F>
  void for_each_probe(ByteSpan item, F&& f) const;

  BloomParams params_;
  std::uint64_t capacity_ = 0;
  double target_fpr_ = 0.0;
  Bytes bits_;
};

}  // namespace svfl::psi
