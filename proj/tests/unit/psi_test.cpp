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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include "svfl/common/error.hpp"
#include "svfl/psi/psi.hpp"

namespace svfl::psi {
namespace {

using u128 = unsigned __int128;

// Independent modular exponentiation for the 64-bit test group.
std::uint64_t powmod64(std::uint64_t base, const mpz_class& exp, std::uint64_t mod) {
  std::uint64_t result = 1;
  std::uint64_t b = base % mod;
  const std::size_t nbits = mpz_sizeinbase(exp.get_mpz_t(), 2);
  for (std::size_t i = 0; i < nbits; ++i) {
    if (mpz_tstbit(exp.get_mpz_t(), i)) result = static_cast<std::uint64_t>(u128{result} * b % mod);
    b = static_cast<std::uint64_t>(u128{b} * b % mod);
  }
  return result;
}

std::uint64_t as_u64(const mpz_class& z) { return mpz_get_ui(z.get_mpz_t()); }

const GroupParams& toy() { return GroupParams::toy64(); }
constexpr std::uint64_t kToyP = 18446744073709550147ULL;
constexpr std::uint64_t kToyQ = 9223372036854775073ULL;

std::vector<std::string> make_ids(std::size_t n, const std::string& prefix) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

TEST(BloomParams, ClosedForm) {
  EXPECT_EQ(derive_bloom_params(1000, 0.001), (BloomParams{14378, 10}));
  EXPECT_EQ(derive_bloom_params(1, 0.5), (BloomParams{2, 1}));
  EXPECT_EQ(derive_bloom_params(1000, 1e-6), (BloomParams{28756, 20}));
}

TEST(BloomParams, FprNearOneKeepsOneHash) {
  auto p = derive_bloom_params(10, 0.999999);
  EXPECT_GE(p.hashes, 1u);
  EXPECT_LE(p.bits, 2u);
}

TEST(BloomFilterProbes, BitPositionsMatchReference) {
  // Positions from an independent hashlib computation of
  // (h1 + i*h2 + (i^3 - i)/6) mod 1000.
  const std::vector<std::pair<Bytes, std::vector<int>>> cases{
      {Bytes{'a', 'b', 'c'}, {554, 629, 705, 783, 864}},
      {Bytes{0, 1, 2, 3, 4, 5, 6, 7}, {811, 670, 530, 392, 257}},
  };
  for (const auto& [item, positions] : cases) {
    BloomFilter f(BloomParams{1000, 5}, Bytes(125, 0));
    f.insert(item);
    Bytes want(125, 0);
    for (int j : positions) want[static_cast<std::size_t>(j / 8)] |= static_cast<std::uint8_t>(1U << (j % 8));
    EXPECT_EQ(f.bits(), want);
  }
}

TEST(BloomParams, RejectsOutOfRange) {
  EXPECT_THROW(derive_bloom_params(0, 0.1), InputError);
  EXPECT_THROW(derive_bloom_params(10, 0.0), InputError);
  EXPECT_THROW(derive_bloom_params(10, 1.0), InputError);
  EXPECT_THROW(derive_bloom_params(10, std::nan("")), InputError);
}

TEST(Bloom, NoFalseNegativesAndSerializes) {
  BloomFilter f(500, 0.01);
  for (int i = 0; i < 500; ++i) f.insert(as_bytes("item" + std::to_string(i)));
  ByteWriter w;
  f.serialize(w);
  EXPECT_EQ(w.size(), 12 + (f.bit_count() + 7) / 8);
  ByteReader r(w.bytes());
  auto g = BloomFilter::deserialize(r);
  for (int i = 0; i < 500; ++i) EXPECT_TRUE(g.contains(as_bytes("item" + std::to_string(i))));
  EXPECT_EQ(g.bits(), f.bits());
}

TEST(Bloom, RejectsMalformedHeader) {
  ByteWriter w;
  w.u64_be(0);
  w.u32_be(3);
  ByteReader r(w.bytes());
  EXPECT_THROW(BloomFilter::deserialize(r), FormatError);

  ByteWriter t;
  t.u64_be(64);
  t.u32_be(3);
  t.raw(Bytes(4, 0));  // needs 8
  ByteReader rt(t.bytes());
  EXPECT_THROW(BloomFilter::deserialize(rt), FormatError);
}

TEST(Group, BuiltInParamsAreSafePrimeGroups) {
  EXPECT_TRUE(GroupParams::toy64().validate());
  EXPECT_TRUE(GroupParams::modp2048().validate());
  EXPECT_EQ(GroupParams::modp2048().element_bytes(), 256u);
  EXPECT_EQ(GroupParams::toy64().element_bytes(), 8u);
  EXPECT_EQ(as_u64(toy().q), kToyQ);
}

TEST(Group, LegendreMembershipAgreesWithExponentOracle) {
  std::mt19937_64 rng(4);
  int members = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = 2 + rng() % (kToyP - 3);
    const bool oracle = powmod64(v, mpz_class(std::to_string(kToyQ)), kToyP) == 1;
    EXPECT_EQ(GroupElement(mpz_class(std::to_string(v))).in_subgroup(toy()), oracle) << v;
    members += oracle ? 1 : 0;
  }
  // Residues are half of Z_p^*.
  EXPECT_NEAR(members, 1000, 150);
  EXPECT_FALSE(GroupElement(mpz_class(0)).in_subgroup(toy()));
  EXPECT_FALSE(GroupElement(mpz_class(1)).in_subgroup(toy()));
  EXPECT_FALSE(GroupElement(toy().p).in_subgroup(toy()));
}

TEST(Secret, RangeAndInverse) {
  EXPECT_THROW(SecretScalar::from_value(toy(), 0), KeyError);
  EXPECT_THROW(SecretScalar::from_value(toy(), toy().q), KeyError);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto k = SecretScalar::from_seed(toy(), seed);
    EXPECT_GE(k.value(), 1);
    EXPECT_LT(k.value(), toy().q);
    auto inv = k.inverse(toy());
    EXPECT_EQ(k.value() * inv.value() % toy().q, 1);
  }
  auto a = SecretScalar::generate(GroupParams::modp2048());
  auto b = SecretScalar::generate(GroupParams::modp2048());
  EXPECT_NE(a.value(), b.value());
  EXPECT_EQ(SecretScalar::from_seed(toy(), 9).value(), SecretScalar::from_seed(toy(), 9).value());
}

TEST(HashToGroup, DeterministicAndInSubgroup) {
  for (const auto* params : {&GroupParams::toy64(), &GroupParams::modp2048()}) {
    auto a = hash_to_group("alice", *params);
    EXPECT_EQ(a, hash_to_group("alice", *params));
    mpz_class r;
    mpz_powm(r.get_mpz_t(), a.value().get_mpz_t(), params->q.get_mpz_t(), params->p.get_mpz_t());
    EXPECT_EQ(r, 1);
    EXPECT_NE(a, hash_to_group("alicf", *params));
  }
  for (int i = 0; i < 200; ++i) {
    auto e = hash_to_group("id-" + std::to_string(i), toy());
    EXPECT_EQ(powmod64(as_u64(e.value()), toy().q, kToyP), 1u);
  }
}

TEST(GroupPow, MatchesIndependentExponentiation) {
  for (int i = 0; i < 6; ++i) {
    for (const auto* params : {&GroupParams::toy64(), &GroupParams::modp2048()}) {
      auto base = hash_to_group("base-" + std::to_string(i), *params);
      auto k = SecretScalar::from_seed(*params, 40 + i);
      mpz_class r;
      mpz_powm(r.get_mpz_t(), base.value().get_mpz_t(), k.value().get_mpz_t(),
               params->p.get_mpz_t());
      EXPECT_EQ(pow(base, k, *params).value(), r);
    }
    auto base = hash_to_group("toy-" + std::to_string(i), toy());
    auto k = SecretScalar::from_seed(toy(), 70 + i);
    EXPECT_EQ(as_u64(pow(base, k, toy()).value()), powmod64(as_u64(base.value()), k.value(), kToyP));
  }
}

TEST(HashToGroup, EmptyIdIsValid) {
  auto e = hash_to_group(std::string_view{}, toy());
  EXPECT_TRUE(e.in_subgroup(toy()));
}

TEST(Blind, UnitExponentIsHashToGroup) {
  auto one = SecretScalar::from_value(toy(), 1);
  auto ids = make_ids(5, "x");
  auto out = blind(ids, one, toy());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(out[i], hash_to_group(ids[i], toy()));
  EXPECT_TRUE(blind({}, one, toy()).empty());
}

TEST(Evaluate, MatchesExponentOracle) {
  auto kc = SecretScalar::from_seed(toy(), 1);
  auto ks = SecretScalar::from_seed(toy(), 2);
  auto ids = make_ids(5, "user");
  auto blinded = blind(ids, kc, toy());
  auto evaluated = evaluate(blinded, ks, toy());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::uint64_t h = as_u64(hash_to_group(ids[i], toy()).value());
    const std::uint64_t b = powmod64(h, kc.value(), kToyP);
    EXPECT_EQ(as_u64(blinded[i].value()), b);
    EXPECT_EQ(as_u64(evaluated[i].value()), powmod64(b, ks.value(), kToyP));
  }
}

TEST(Evaluate, UnitExponentAndCommutativity) {
  auto one = SecretScalar::from_value(toy(), 1);
  auto a = SecretScalar::from_seed(toy(), 10);
  auto b = SecretScalar::from_seed(toy(), 11);
  std::vector<std::string> ids{"x", "y", "z"};
  auto blinded = blind(ids, a, toy());
  EXPECT_EQ(evaluate(blinded, one, toy()), blinded);
  EXPECT_EQ(evaluate(blind(ids, a, toy()), b, toy()), evaluate(blind(ids, b, toy()), a, toy()));
}

TEST(Evaluate, RejectsNonMembers) {
  auto ks = SecretScalar::from_seed(toy(), 2);
  // p = 3 mod 8, so 2 is a non-residue.
  std::vector<GroupElement> bad{hash_to_group("ok", toy()), GroupElement(mpz_class(2))};
  EXPECT_THROW(evaluate(bad, ks, toy()), ProtocolError);
  std::vector<GroupElement> zero{GroupElement(mpz_class(0))};
  EXPECT_THROW(evaluate(zero, ks, toy()), ProtocolError);
}

TEST(Unblind, InvertsClientBlinding) {
  auto kc = SecretScalar::from_seed(toy(), 21);
  auto ks = SecretScalar::from_seed(toy(), 22);
  std::vector<std::string> ids{"x"};
  auto doubly = evaluate(blind(ids, kc, toy()), ks, toy());
  auto unblinded = pow(doubly[0], kc.inverse(toy()), toy());
  EXPECT_EQ(unblinded, pow(hash_to_group("x", toy()), ks, toy()));
}

std::vector<std::size_t> run_psi(const std::vector<std::string>& client,
                                 const std::vector<std::string>& server, double fpr,
                                 const GroupParams& params, std::uint64_t seed) {
  auto kc = SecretScalar::from_seed(params, seed);
  auto ks = SecretScalar::from_seed(params, seed + 1000);
  auto doubly = evaluate(blind(client, kc, params), ks, params);
  auto digest = build_server_digest(server, ks, fpr, params);
  return unblind_match(doubly, kc, digest, params);
}

TEST(Protocol, SmallIntersection) {
  std::vector<std::string> client{"a", "b", "c"}, server{"b", "c", "d"};
  EXPECT_EQ(run_psi(client, server, kDefaultFpr, toy(), 1), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(run_psi(client, server, kDefaultFpr, GroupParams::modp2048(), 1),
            (std::vector<std::size_t>{1, 2}));
}

TEST(Protocol, DisjointAndSubset) {
  EXPECT_TRUE(run_psi(make_ids(50, "c"), make_ids(50, "s"), kDefaultFpr, toy(), 3).empty());
  auto client = make_ids(20, "u");
  auto server = make_ids(40, "u");
  std::vector<std::size_t> all(20);
  for (std::size_t i = 0; i < 20; ++i) all[i] = i;
  EXPECT_EQ(run_psi(client, server, kDefaultFpr, toy(), 4), all);
}

TEST(Protocol, DigestSizeFollowsSizing) {
  auto ks = SecretScalar::from_seed(toy(), 5);
  auto digest = build_server_digest(make_ids(1000, "s"), ks, 0.001, toy());
  EXPECT_EQ(digest.bit_count(), 14378u);
  EXPECT_EQ(digest.hash_count(), 10u);
  EXPECT_THROW(build_server_digest({}, ks, 0.001, toy()), InputError);
}

TEST(Protocol, DigestAdmitsEveryServerItem) {
  auto ks = SecretScalar::from_seed(toy(), 6);
  auto ids = make_ids(300, "s");
  auto digest = build_server_digest(ids, ks, 0.01, toy());
  for (const auto& id : ids) {
    EXPECT_TRUE(digest.contains(pow(hash_to_group(id, toy()), ks, toy()).to_fixed_bytes(toy())));
  }
}

TEST(Protocol, NoFalsePositivesAtDefaultRateOnThousandProbes) {
  // Expected false positives: 1000 * 1e-6 = 0.001.
  auto ks = SecretScalar::from_seed(toy(), 7);
  auto digest = build_server_digest(make_ids(1000, "member"), ks, 1e-6, toy());
  int hits = 0;
  for (const auto& id : make_ids(1000, "outsider")) {
    hits += digest.contains(pow(hash_to_group(id, toy()), ks, toy()).to_fixed_bytes(toy())) ? 1 : 0;
  }
  EXPECT_EQ(hits, 0);
}

TEST(Protocol, SerialAndParallelAgree) {
  auto kc = SecretScalar::from_seed(toy(), 8);
  auto ks = SecretScalar::from_seed(toy(), 9);
  auto ids = make_ids(64, "p");
  auto bs = blind(ids, kc, toy(), Exec::Serial);
  auto bp = blind(ids, kc, toy(), Exec::Parallel);
  EXPECT_EQ(bs, bp);
  EXPECT_EQ(evaluate(bs, ks, toy(), Exec::Serial), evaluate(bp, ks, toy(), Exec::Parallel));
  auto ds = build_server_digest(ids, ks, 0.01, toy(), Exec::Serial);
  auto dp = build_server_digest(ids, ks, 0.01, toy(), Exec::Parallel);
  EXPECT_EQ(ds.bits(), dp.bits());
  auto e = evaluate(bs, ks, toy());
  EXPECT_EQ(unblind_match(e, kc, ds, toy(), Exec::Serial),
            unblind_match(e, kc, dp, toy(), Exec::Parallel));
}

TEST(Wire, ElementListLayout) {
  std::vector<GroupElement> es{GroupElement(mpz_class(0x0102)), GroupElement(mpz_class(7))};
  const Bytes expect{0, 0, 0, 2, 0, 2, 0x01, 0x02, 0, 1, 7};
  EXPECT_EQ(encode_elements(es), expect);
  EXPECT_EQ(decode_elements(expect), es);
}

TEST(Wire, ElementListRejectsTruncation) {
  Bytes bad{0, 0, 0, 2, 0, 2, 0x01};
  EXPECT_THROW(decode_elements(bad), FormatError);
  Bytes trailing{0, 0, 0, 0, 9};
  EXPECT_THROW(decode_elements(trailing), FormatError);
}

TEST(Property, WireRoundTrips) {
  std::mt19937_64 rng(55);
  const auto& params = GroupParams::modp2048();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GroupElement> es;
    const std::size_t n = rng() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      es.push_back(hash_to_group("e" + std::to_string(rng()), params));
    }
    EXPECT_EQ(decode_elements(encode_elements(es)), es);

    BloomFilter f(1 + rng() % 200, 0.001 + 0.2 * static_cast<double>(rng() % 100) / 100.0);
    for (std::size_t i = 0; i < 30; ++i) f.insert(as_bytes(std::to_string(rng())));
    auto g = decode_digest(encode_digest(f));
    EXPECT_EQ(g.bits(), f.bits());
    EXPECT_EQ(g.bit_count(), f.bit_count());
    EXPECT_EQ(g.hash_count(), f.hash_count());
  }
}

}  // namespace
}  // namespace svfl::psi
