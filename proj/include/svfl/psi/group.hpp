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

// Prime-order subgroup of Z_p^* for a safe prime p = 2q + 1. The order-q
// subgroup is exactly the quadratic residues mod p.

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "svfl/common/bytes.hpp"

namespace svfl::psi {

struct GroupParams {
  mpz_class p;  // safe prime
  mpz_class q;  // (p - 1) / 2, prime
  mpz_class g;  // generator of the order-q subgroup
  std::string name;

  // 2048-bit MODP group from RFC 3526 with g = 4 (= 2^2, a residue).
  static const GroupParams& modp2048();
  // p = 2^64 - 1469, the largest 64-bit safe prime. Unit tests only.
  static const GroupParams& toy64();
  // "modp2048" or "toy64".
  static const GroupParams& by_name(std::string_view name);

  // Byte length of p; fixed width used when elements are hashed.
  std::size_t element_bytes() const;

  // Probabilistic primality of p and q, p = 2q + 1, g^q = 1, g != 1.
  bool validate() const;
};

class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(mpz_class v) : value_(std::move(v)) {}

  const mpz_class& value() const { return value_; }

  // Fixed-width big-endian encoding (params.element_bytes()).
  Bytes to_fixed_bytes(const GroupParams& params) const;
  // Minimal big-endian magnitude.
  Bytes to_bytes() const;
  static GroupElement from_bytes(ByteSpan bytes);

  // 1 < v < p and v is a quadratic residue (Legendre symbol 1), which for a
  // safe prime is equivalent to v^q = 1 mod p.
  bool in_subgroup(const GroupParams& params) const;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.value_ == b.value_;
  }

 private:
  mpz_class value_;
};

class SecretScalar {
 public:
  // Uniform in [1, q-1] from the OS CSPRNG.
  static SecretScalar generate(const GroupParams& params);
  // Uniform in [1, q-1] expanded from a seed with SHA-256. For reproducible
  // test runs; a seeded secret is only as secret as its seed.
  static SecretScalar from_seed(const GroupParams& params, std::uint64_t seed);
  // Throws KeyError unless 1 <= k <= q-1.
  static SecretScalar from_value(const GroupParams& params, mpz_class k);

  const mpz_class& value() const { return k_; }

  // k^-1 mod q.
  SecretScalar inverse(const GroupParams& params) const;

 private:
  explicit SecretScalar(mpz_class k) : k_(std::move(k)) {}
  mpz_class k_;
};

// base^exp mod p.
GroupElement pow(const GroupElement& base, const SecretScalar& exp, const GroupParams& params);

}  // namespace svfl::psi
