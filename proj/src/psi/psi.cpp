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

#include "svfl/psi/psi.hpp"

#include <atomic>
#include <cstdint>
#include <limits>

#include "svfl/common/error.hpp"
#include "svfl/common/sha256.hpp"

namespace svfl::psi {

namespace {

// Applies f(i) for i in [0, n), serially or across OpenMP threads. Each f(i)
// touches only slot i, so the two paths produce identical results.
template <typename F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace

GroupElement hash_to_group(ByteSpan id, const GroupParams& params) {
  const std::size_t bits = mpz_sizeinbase(params.p.get_mpz_t(), 2);
  // 128 extra bits so the reduction mod p is close to uniform.
  const std::size_t blocks = (bits + 128 + 255) / 256;
  for (std::uint32_t counter = 0;; ++counter) {
    Bytes wide;
    wide.reserve(blocks * 32);
    for (std::uint32_t b = 0; b < blocks; ++b) {
      ByteWriter hdr;
      hdr.u32_be(counter);
      hdr.u32_be(b);
      auto d = sha256({as_bytes("svfl-hash-to-group"), hdr.bytes(), id});
      wide.insert(wide.end(), d.begin(), d.end());
    }
    mpz_class h;
    mpz_import(h.get_mpz_t(), wide.size(), 1, 1, 1, 0, wide.data());
    h %= params.p;
    mpz_class e = h * h % params.p;
    if (e != 0 && e != 1) return GroupElement(std::move(e));
  }
}

GroupElement hash_to_group(std::string_view id, const GroupParams& params) {
  return hash_to_group(as_bytes(id), params);
}

std::vector<GroupElement> blind(const std::vector<std::string>& ids, const SecretScalar& client_key,
                                const GroupParams& params, Exec exec) {
  std::vector<GroupElement> out(ids.size());
  for_each_index(ids.size(), exec, [&](std::size_t i) {
    out[i] = pow(hash_to_group(ids[i], params), client_key, params);
  });
  return out;
}

std::vector<GroupElement> evaluate(const std::vector<GroupElement>& blinded,
                                   const SecretScalar& server_key, const GroupParams& params,
                                   Exec exec) {
  std::vector<GroupElement> out(blinded.size());
  std::atomic<bool> bad{false};
  for_each_index(blinded.size(), exec, [&](std::size_t i) {
    if (!blinded[i].in_subgroup(params)) {
      bad.store(true, std::memory_order_relaxed);
      return;
    }
    out[i] = pow(blinded[i], server_key, params);
  });
  if (bad.load()) throw ProtocolError("PSI evaluate: element outside the prime-order subgroup");
  return out;
}

BloomFilter build_server_digest(const std::vector<std::string>& ids, const SecretScalar& server_key,
                                double fpr, const GroupParams& params, Exec exec) {
  if (ids.empty()) throw InputError("server digest needs at least one id");
  std::vector<Bytes> encoded(ids.size());
  for_each_index(ids.size(), exec, [&](std::size_t i) {
    encoded[i] = pow(hash_to_group(ids[i], params), server_key, params).to_fixed_bytes(params);
  });
  BloomFilter filter(ids.size(), fpr);
  for (const auto& e : encoded) filter.insert(e);
  return filter;
}

std::vector<std::size_t> unblind_match(const std::vector<GroupElement>& doubly_blinded,
                                       const SecretScalar& client_key, const BloomFilter& digest,
                                       const GroupParams& params, Exec exec) {
  const SecretScalar inv = client_key.inverse(params);
  std::vector<std::uint8_t> hit(doubly_blinded.size(), 0);
  std::atomic<bool> bad{false};
  for_each_index(doubly_blinded.size(), exec, [&](std::size_t i) {
    if (!doubly_blinded[i].in_subgroup(params)) {
      bad.store(true, std::memory_order_relaxed);
      return;
    }
    hit[i] = digest.contains(pow(doubly_blinded[i], inv, params).to_fixed_bytes(params)) ? 1 : 0;
  });
  if (bad.load()) throw ProtocolError("PSI unblind: element outside the prime-order subgroup");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    if (hit[i] != 0) out.push_back(i);
  }
  return out;
}

Bytes encode_elements(const std::vector<GroupElement>& elements) {
  if (elements.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("too many elements for one PSI message");
  }
  ByteWriter out;
  out.u32_be(static_cast<std::uint32_t>(elements.size()));
  for (const auto& e : elements) {
    auto b = e.to_bytes();
    if (b.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InputError("group element too large to encode");
    }
    out.u16_be(static_cast<std::uint16_t>(b.size()));
    out.raw(b);
  }
  return std::move(out).take();
}

std::vector<GroupElement> decode_elements(ByteSpan payload) {
  ByteReader in(payload);
  const std::uint32_t n = in.u32_be();
  if (n > in.remaining() / 2) throw FormatError("PSI element count exceeds payload");
  std::vector<GroupElement> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint16_t len = in.u16_be();
    out.push_back(GroupElement::from_bytes(in.raw(len)));
  }
  in.expect_done("PSI element list");
  return out;
}

Bytes encode_digest(const BloomFilter& digest) {
  ByteWriter out;
  digest.serialize(out);
  return std::move(out).take();
}

BloomFilter decode_digest(ByteSpan payload) {
  ByteReader in(payload);
  auto f = BloomFilter::deserialize(in);
  in.expect_done("PSI digest");
  return f;
}

}  // namespace svfl::psi
