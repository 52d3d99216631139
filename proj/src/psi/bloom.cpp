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

#include "svfl/psi/bloom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svfl/common/error.hpp"
#include "svfl/common/sha256.hpp"

namespace svfl::psi {

namespace {

// Frames larger than this are rejected before allocating.
constexpr std::uint64_t kMaxBits = std::uint64_t{1} << 35;

std::uint64_t leading_u64(const Digest256& d) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

BloomParams derive_bloom_params(std::uint64_t n, double fpr) {
  if (n < 1) throw InputError("bloom capacity must be at least 1");
  if (!(fpr > 0.0 && fpr < 1.0)) throw InputError("bloom fpr must lie in (0, 1)");
  const double ln2 = std::numbers::ln2;
  const double nd = static_cast<double>(n);
  const double m = std::ceil(-nd * std::log(fpr) / (ln2 * ln2));
  BloomParams p;
  p.bits = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
  const double k = std::round(static_cast<double>(p.bits) / nd * ln2);
  p.hashes = static_cast<std::uint32_t>(std::max(1.0, k));
  return p;
}

BloomFilter::BloomFilter(std::uint64_t capacity, double target_fpr)
    : params_(derive_bloom_params(capacity, target_fpr)),
      capacity_(capacity),
      target_fpr_(target_fpr),
      bits_((params_.bits + 7) / 8, 0) {}

BloomFilter::BloomFilter(BloomParams params, Bytes bits) : params_(params), bits_(std::move(bits)) {
  if (params_.bits == 0 || params_.hashes == 0) throw FormatError("bloom filter with m or k zero");
  if (bits_.size() != (params_.bits + 7) / 8) throw FormatError("bloom bit array length mismatch");
}

template <typename F>
void BloomFilter::for_each_probe(ByteSpan item, F&& f) const {
  const std::uint64_t m = params_.bits;
  const std::uint64_t h1 = leading_u64(sha256({as_bytes("svfl-bloom-1"), item})) % m;
  const std::uint64_t h2 = leading_u64(sha256({as_bytes("svfl-bloom-2"), item})) % m;
  // The cubic term keeps probes apart when h2 is small or shared.
  for (std::uint32_t i = 0; i < params_.hashes; ++i) {
    const std::uint64_t cubic = (std::uint64_t{i} * i * i - i) / 6;
    const auto bit = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h1) + static_cast<unsigned __int128>(i) * h2 + cubic) % m);
    f(bit);
  }
}

void BloomFilter::insert(ByteSpan item) {
  if (bits_.empty()) throw StateError("insert into an unsized bloom filter");
  for_each_probe(item, [&](std::uint64_t bit) {
    bits_[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
  });
}

bool BloomFilter::contains(ByteSpan item) const {
  if (bits_.empty()) return false;
  bool hit = true;
  for_each_probe(item, [&](std::uint64_t bit) {
    if ((bits_[bit / 8] & (1U << (bit % 8))) == 0) hit = false;
  });
  return hit;
}

void BloomFilter::serialize(ByteWriter& out) const {
  out.u64_be(params_.bits);
  out.u32_be(params_.hashes);
  out.raw(bits_);
}

BloomFilter BloomFilter::deserialize(ByteReader& in) {
  BloomParams p;
  p.bits = in.u64_be();
  p.hashes = in.u32_be();
  if (p.bits == 0 || p.bits > kMaxBits) {
    throw FormatError("bloom filter size " + std::to_string(p.bits) + " out of range");
  }
  if (p.hashes == 0 || p.hashes > 1024) throw FormatError("bloom hash count out of range");
  auto raw = in.raw((p.bits + 7) / 8);
  return BloomFilter(p, Bytes(raw.begin(), raw.end()));
}

}  // namespace svfl::psi
