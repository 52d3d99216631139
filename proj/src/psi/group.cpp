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

#include "svfl/psi/group.hpp"

#include <openssl/bn.h>
#include <openssl/rand.h>

#include <memory>
#include <vector>

#include "svfl/common/error.hpp"
#include "svfl/common/sha256.hpp"

namespace svfl::psi {

namespace {

constexpr const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

GroupParams make_params(const mpz_class& p, std::string name) {
  GroupParams gp;
  gp.p = p;
  gp.q = (p - 1) / 2;
  gp.g = 4;
  gp.name = std::move(name);
  return gp;
}

mpz_class import_be(ByteSpan bytes) {
  mpz_class z;
  if (!bytes.empty()) mpz_import(z.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return z;
}

// Uniform in [1, q-1]: 64 bits of surplus entropy make the modulo bias
// negligible.
SecretScalar scalar_from_entropy(const GroupParams& params, ByteSpan entropy) {
  mpz_class r = import_be(entropy);
  mpz_class k = r % (params.q - 1) + 1;
  return SecretScalar::from_value(params, std::move(k));
}

using BnPtr = std::unique_ptr<BIGNUM, decltype(&BN_clear_free)>;
using BnCtxPtr = std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)>;
using MontPtr = std::unique_ptr<BN_MONT_CTX, decltype(&BN_MONT_CTX_free)>;

BnPtr to_bn(const mpz_class& z) {
  Bytes bytes((mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8);
  std::size_t count = 0;
  if (z != 0) mpz_export(bytes.data(), &count, 1, 1, 1, 0, z.get_mpz_t());
  BnPtr bn(BN_bin2bn(bytes.data(), static_cast<int>(count), nullptr), &BN_clear_free);
  if (!bn) throw Error("BN_bin2bn failed");
  return bn;
}

mpz_class from_bn(const BIGNUM* bn) {
  Bytes bytes(static_cast<std::size_t>(BN_num_bytes(bn)));
  BN_bn2bin(bn, bytes.data());
  return import_be(bytes);
}

// Per-thread Montgomery state for the most recently used modulus.
struct MontState {
  mpz_class p;
  BnPtr modulus{nullptr, &BN_clear_free};
  MontPtr mont{nullptr, &BN_MONT_CTX_free};
  BnCtxPtr ctx{BN_CTX_new(), &BN_CTX_free};

  void prepare(const mpz_class& modulus_value) {
    if (mont && p == modulus_value) return;
    modulus = to_bn(modulus_value);
    mont.reset(BN_MONT_CTX_new());
    if (!ctx || !mont || BN_MONT_CTX_set(mont.get(), modulus.get(), ctx.get()) != 1) {
      throw Error("BN_MONT_CTX_set failed");
    }
    p = modulus_value;
  }
};

std::size_t entropy_bytes(const GroupParams& params) {
  return (mpz_sizeinbase(params.q.get_mpz_t(), 2) + 7) / 8 + 8;
}

}  // namespace

const GroupParams& GroupParams::modp2048() {
  static const GroupParams params = make_params(mpz_class(kModp2048Hex, 16), "modp2048");
  return params;
}

const GroupParams& GroupParams::toy64() {
  static const GroupParams params = make_params(mpz_class("18446744073709550147", 10), "toy64");
  return params;
}

const GroupParams& GroupParams::by_name(std::string_view name) {
  if (name == "modp2048") return modp2048();
  if (name == "toy64") return toy64();
  throw InputError("unknown PSI group '" + std::string(name) + "'");
}

std::size_t GroupParams::element_bytes() const {
  return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8;
}

bool GroupParams::validate() const {
  if (mpz_probab_prime_p(p.get_mpz_t(), 32) == 0) return false;
  if (mpz_probab_prime_p(q.get_mpz_t(), 32) == 0) return false;
  if (p != 2 * q + 1) return false;
  if (g <= 1 || g >= p) return false;
  mpz_class r;
  mpz_powm(r.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  return r == 1;
}

Bytes GroupElement::to_fixed_bytes(const GroupParams& params) const {
  const std::size_t width = params.element_bytes();
  Bytes minimal = to_bytes();
  if (minimal.size() > width) throw InputError("group element wider than modulus");
  Bytes out(width - minimal.size(), 0);
  out.insert(out.end(), minimal.begin(), minimal.end());
  return out;
}

Bytes GroupElement::to_bytes() const {
  if (value_ == 0) return {};
  Bytes out((mpz_sizeinbase(value_.get_mpz_t(), 2) + 7) / 8);
  std::size_t count = 0;
  mpz_export(out.data(), &count, 1, 1, 1, 0, value_.get_mpz_t());
  out.resize(count);
  return out;
}

GroupElement GroupElement::from_bytes(ByteSpan bytes) { return GroupElement(import_be(bytes)); }

bool GroupElement::in_subgroup(const GroupParams& params) const {
  if (value_ <= 1 || value_ >= params.p) return false;
  return mpz_legendre(value_.get_mpz_t(), params.p.get_mpz_t()) == 1;
}

SecretScalar SecretScalar::generate(const GroupParams& params) {
  Bytes entropy(entropy_bytes(params));
  if (RAND_bytes(entropy.data(), static_cast<int>(entropy.size())) != 1) {
    throw KeyError("OS random source unavailable");
  }
  return scalar_from_entropy(params, entropy);
}

SecretScalar SecretScalar::from_seed(const GroupParams& params, std::uint64_t seed) {
  const std::size_t need = entropy_bytes(params);
  ByteWriter seed_bytes;
  seed_bytes.u64_be(seed);
  Bytes entropy;
  for (std::uint32_t block = 0; entropy.size() < need; ++block) {
    ByteWriter ctr;
    ctr.u32_be(block);
    auto d = sha256({as_bytes("svfl-psi-secret"), seed_bytes.bytes(), ctr.bytes()});
    entropy.insert(entropy.end(), d.begin(), d.end());
  }
  entropy.resize(need);
  return scalar_from_entropy(params, entropy);
}

SecretScalar SecretScalar::from_value(const GroupParams& params, mpz_class k) {
  if (k < 1 || k >= params.q) throw KeyError("secret scalar outside [1, q-1]");
  return SecretScalar(std::move(k));
}

SecretScalar SecretScalar::inverse(const GroupParams& params) const {
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), k_.get_mpz_t(), params.q.get_mpz_t()) == 0) {
    throw KeyError("secret scalar has no inverse mod q");
  }
  return SecretScalar(std::move(inv));
}

// Constant-time in the exponent, which is always a secret here.
GroupElement pow(const GroupElement& base, const SecretScalar& exp, const GroupParams& params) {
  thread_local MontState state;
  state.prepare(params.p);
  mpz_class reduced = base.value() % params.p;
  if (reduced < 0) reduced += params.p;
  const BnPtr b = to_bn(reduced);
  const BnPtr e = to_bn(exp.value());
  BnPtr r(BN_new(), &BN_clear_free);
  if (!r || BN_mod_exp_mont_consttime(r.get(), b.get(), e.get(), state.modulus.get(),
                                      state.ctx.get(), state.mont.get()) != 1) {
    throw Error("modular exponentiation failed");
  }
  return GroupElement(from_bn(r.get()));
}

}  // namespace svfl::psi
