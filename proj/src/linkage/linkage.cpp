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


#include "svfl/linkage/linkage.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <set>
#include <thread>

#include "svfl/common/error.hpp"

namespace svfl::linkage {

namespace {

using transport::MsgType;

psi::SecretScalar make_key(const psi::GroupParams& params, std::optional<std::uint64_t> seed,
                           std::uint64_t salt) {
  return seed ? psi::SecretScalar::from_seed(params, *seed + salt)
              : psi::SecretScalar::generate(params);
}

// Client half of one PSI session; returns the owner's share of `ids`.
std::set<data::DatasetId> run_client(transport::Peer& owner,
                                     const std::vector<data::DatasetId>& ids,
                                     const std::vector<std::string>& id_strings,
                                     const psi::SecretScalar& key, const LinkOptions& options) {
  const auto& params = psi::GroupParams::by_name(options.group);
  BlindRequest request{options.group, options.fpr, psi::blind(id_strings, key, params, options.exec)};
  owner.send(MsgType::PsiBlind, encode_blind_request(request));

  const auto evaluated = psi::decode_elements(owner.expect(MsgType::PsiEval).payload);
  if (evaluated.size() != ids.size()) {
    throw ProtocolError("owner returned " + std::to_string(evaluated.size()) +
                        " evaluated elements for " + std::to_string(ids.size()) + " blinded");
  }
  for (const auto& e : evaluated) {
    if (!e.in_subgroup(params)) throw ProtocolError("evaluated element outside the subgroup");
  }
  const auto digest = psi::decode_digest(owner.expect(MsgType::PsiDigest).payload);
  std::set<data::DatasetId> shared;
  for (auto i : psi::unblind_match(evaluated, key, digest, params, options.exec)) {
    shared.insert(ids[i]);
  }
  return shared;
}

void notify_all(const std::vector<transport::Peer*>& owners, std::string_view reason) {
  for (auto* o : owners) o->notify(MsgType::LinkError, reason);
}

}  // namespace

GlobalIntersection scientist_link(const std::vector<data::DatasetId>& label_ids,
                                  const std::vector<transport::Peer*>& owners,
                                  const LinkOptions& options) {
  if (owners.empty()) throw InputError("linkage needs at least one data owner");
  if (label_ids.empty()) throw InputError("linkage needs a non-empty label id list");
  {
    std::set<data::DatasetId> uniq(label_ids.begin(), label_ids.end());
    if (uniq.size() != label_ids.size()) throw InputError("label ids are not unique");
  }
  const auto& params = psi::GroupParams::by_name(options.group);
  const auto id_strings = data::to_strings(label_ids);

  std::vector<std::set<data::DatasetId>> shared(owners.size());
  std::vector<std::exception_ptr> errors(owners.size());
  {
    std::vector<std::thread> sessions;
    for (std::size_t j = 0; j < owners.size(); ++j) {
      sessions.emplace_back([&, j] {
        try {
          const auto key = make_key(params, options.key_seed, j);
          shared[j] = run_client(*owners[j], label_ids, id_strings, key, options);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& t : sessions) t.join();
  }
  for (std::size_t j = 0; j < owners.size(); ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const std::exception& e) {
      notify_all(owners, std::string("PSI with owner failed: ") + e.what());
    }
    std::rethrow_exception(errors[j]);
  }

  // label_ids are the client set, so each shared[j] is already inside it.
  GlobalIntersection global;
  for (const auto& id : shared[0]) {
    bool everywhere = true;
    for (std::size_t j = 1; j < shared.size() && everywhere; ++j) everywhere = shared[j].count(id) > 0;
    if (everywhere) global.ids.push_back(id);
  }
  if (global.ids.empty()) {
    notify_all(owners, "empty global intersection");
    throw EmptyIntersectionError("global intersection is empty; training is impossible");
  }
  const Bytes payload = encode_global_ids(global);
  for (auto* o : owners) o->send(MsgType::GlobalIds, payload);
  return global;
}

data::FeaturePartition owner_link(transport::Peer& scientist,
                                  const data::FeaturePartition& partition,
                                  std::optional<std::uint64_t> key_seed, nn::Exec exec) {
  try {
    const auto request = decode_blind_request(scientist.expect(MsgType::PsiBlind).payload);
    const auto& params = psi::GroupParams::by_name(request.group);
    const auto key = make_key(params, key_seed, 0);
    scientist.send(MsgType::PsiEval,
                   psi::encode_elements(psi::evaluate(request.elements, key, params, exec)));
    scientist.send(MsgType::PsiDigest,
                   psi::encode_digest(psi::build_server_digest(
                       data::to_strings(partition.ids), key, request.fpr, params, exec)));
  } catch (const LinkageError&) {
    throw;
  } catch (const InputError& e) {
    scientist.notify(MsgType::LinkError, e.what());
    throw ProtocolError(std::string("PSI request rejected: ") + e.what());
  } catch (const Error& e) {
    scientist.notify(MsgType::LinkError, e.what());
    throw;
  }

  const auto global = decode_global_ids(scientist.expect(MsgType::GlobalIds).payload);
  try {
    return data::align_to(partition, global.ids);
  } catch (const LinkageError& e) {
    scientist.notify(MsgType::LinkError, e.what());
    throw;
  }
}

Bytes encode_blind_request(const BlindRequest& request) {
  if (request.group.size() > 255) throw InputError("group name too long");
  ByteWriter out;
  out.u8(static_cast<std::uint8_t>(request.group.size()));
  out.raw(request.group);
  out.u64_be(std::bit_cast<std::uint64_t>(request.fpr));
  out.raw(ByteSpan(psi::encode_elements(request.elements)));
  return std::move(out).take();
}

BlindRequest decode_blind_request(ByteSpan payload) {
  ByteReader in(payload);
  BlindRequest r;
  r.group = in.str(in.u8());
  r.fpr = std::bit_cast<double>(in.u64_be());
  if (!(r.fpr > 0.0 && r.fpr < 1.0)) throw ProtocolError("PSI_BLIND: fpr outside (0, 1)");
  r.elements = psi::decode_elements(in.raw(in.remaining()));
  return r;
}

Bytes encode_global_ids(const GlobalIntersection& global) {
  ByteWriter out(4 + 16 * global.ids.size());
  out.u32_be(static_cast<std::uint32_t>(global.ids.size()));
  for (const auto& id : global.ids) out.raw(ByteSpan(id.raw()));
  return std::move(out).take();
}

GlobalIntersection decode_global_ids(ByteSpan payload) {
  ByteReader in(payload);
  const std::uint32_t n = in.u32_be();
  if (in.remaining() != std::size_t{n} * 16) throw FormatError("GLOBAL_IDS: wrong length");
  GlobalIntersection g;
  g.ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    data::DatasetId::Raw raw{};
    auto b = in.raw(16);
    std::copy(b.begin(), b.end(), raw.begin());
    g.ids.emplace_back(raw);
  }
  if (!std::is_sorted(g.ids.begin(), g.ids.end()) ||
      std::adjacent_find(g.ids.begin(), g.ids.end()) != g.ids.end()) {
    throw ProtocolError("GLOBAL_IDS: ids are not strictly ascending");
  }
  return g;
}

}  // namespace svfl::linkage
