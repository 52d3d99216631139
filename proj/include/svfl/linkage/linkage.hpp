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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svfl/common/bytes.hpp"
#include "svfl/data/dataset_id.hpp"
#include "svfl/data/partition.hpp"
#include "svfl/nn/kernels.hpp"
#include "svfl/psi/psi.hpp"
#include "svfl/transport/peer.hpp"

namespace svfl::linkage {

// Ids held by every party, sorted ascending. Byte order of DatasetId equals
// the order of the canonical strings.
struct GlobalIntersection {
  std::vector<data::DatasetId> ids;
  friend bool operator==(const GlobalIntersection&, const GlobalIntersection&) = default;
};

struct LinkOptions {
  std::string group = "modp2048";
  double fpr = psi::kDefaultFpr;
  // Deterministic PSI secrets for tests; random keys when unset.
  std::optional<std::uint64_t> key_seed;
  nn::Exec exec = nn::default_exec();
};

// Data scientist side. Runs one PSI session per owner as the client, all
// sessions concurrently, then intersects the results with `label_ids` and
// sends the sorted global list to every owner. The per-owner intersections
// never leave this function.
// Throws InputError on empty or duplicate label ids, EmptyIntersectionError
// when nothing is shared (owners are told), and rethrows the first session
// failure after notifying all owners.
GlobalIntersection scientist_link(const std::vector<data::DatasetId>& label_ids,
                                  const std::vector<transport::Peer*>& owners,
                                  const LinkOptions& options = {});

// Data owner side: serves PSI over partition.ids, receives the global list
// and aligns to it. Group and fpr come from the scientist.
// Throws LinkageError if the global list names an id not held locally (the
// scientist is told) or if the scientist reports a linkage failure.
data::FeaturePartition owner_link(transport::Peer& scientist,
                                  const data::FeaturePartition& partition,
                                  std::optional<std::uint64_t> key_seed = std::nullopt,
                                  nn::Exec exec = nn::default_exec());

// PSI_BLIND payload: group name length u8 | name | fpr (IEEE-754 bits, u64
// BE) | element list.
struct BlindRequest {
  std::string group;
  double fpr = 0;
  std::vector<psi::GroupElement> elements;
};
Bytes encode_blind_request(const BlindRequest& request);
BlindRequest decode_blind_request(ByteSpan payload);

// GLOBAL_IDS payload: count u32 BE | count x 16-byte id.
Bytes encode_global_ids(const GlobalIntersection& global);
GlobalIntersection decode_global_ids(ByteSpan payload);

}  // namespace svfl::linkage
