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

// Diffie-Hellman PSI with a Bloom-filter digest.
//
//   client                                   server
//   A_i = H(c_i)^kc          ---- blind --->
//                            <--- eval ----  A_i^ks          (same order)
//                            <--- digest --  Bloom{ H(s_j)^ks }
//   (A_i^ks)^(kc^-1) = H(c_i)^ks; report i if it is in the digest.
//
// The client learns which of its own items the server holds; the server
// learns only the client's set size.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "svfl/common/bytes.hpp"
#include "svfl/nn/kernels.hpp"
#include "svfl/psi/bloom.hpp"
#include "svfl/psi/group.hpp"

namespace svfl::psi {

using nn::Exec;

inline constexpr double kDefaultFpr = 1e-6;

// SHA-256 counter expansion of the id reduced mod p, then squared into the
// residue subgroup. Retries with the next counter on 0 or 1.
GroupElement hash_to_group(ByteSpan id, const GroupParams& params);
GroupElement hash_to_group(std::string_view id, const GroupParams& params);

// Batch operations. Element i of the output corresponds to element i of the
// input; Exec::Parallel spreads the exponentiations over OpenMP threads.
std::vector<GroupElement> blind(const std::vector<std::string>& ids, const SecretScalar& client_key,
                                const GroupParams& params, Exec exec = nn::default_exec());

// Throws ProtocolError if any input lies outside the order-q subgroup.
std::vector<GroupElement> evaluate(const std::vector<GroupElement>& blinded,
                                   const SecretScalar& server_key, const GroupParams& params,
                                   Exec exec = nn::default_exec());

// Bloom digest of H(id)^ks over the server's ids, sized for |ids| at `fpr`.
BloomFilter build_server_digest(const std::vector<std::string>& ids, const SecretScalar& server_key,
                                double fpr, const GroupParams& params,
                                Exec exec = nn::default_exec());

// Positions i (ascending) whose unblinded value is in the digest.
std::vector<std::size_t> unblind_match(const std::vector<GroupElement>& doubly_blinded,
                                       const SecretScalar& client_key, const BloomFilter& digest,
                                       const GroupParams& params, Exec exec = nn::default_exec());

// Wire forms carried inside transport envelopes.
//   elements: count (u32 BE), then per element length (u16 BE) + big-endian
//   magnitude.
Bytes encode_elements(const std::vector<GroupElement>& elements);
std::vector<GroupElement> decode_elements(ByteSpan payload);
Bytes encode_digest(const BloomFilter& digest);
BloomFilter decode_digest(ByteSpan payload);

}  // namespace svfl::psi
