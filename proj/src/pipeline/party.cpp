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


#include "svfl/pipeline/party.hpp"

#include <chrono>
#include <exception>
#include <future>
#include <string>

#include "svfl/common/error.hpp"

namespace svfl::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

InitSeeds derive_init_seeds(std::uint64_t master, std::size_t owner_count) {
  InitSeeds s;
  s.head = master * 1000003ULL + 17;
  for (std::size_t j = 0; j < owner_count; ++j) s.owners.push_back(s.head + 1 + j);
  return s;
}

ScientistOutcome scientist_party(const std::vector<transport::Peer*>& owners,
                                 const ScientistInputs& inputs,
                                 const training::TrainingConfig& config,
                                 const linkage::LinkOptions& link, const InitSeeds& seeds,
                                 const training::ScientistHooks& hooks) {
  config.validate(owners.size());
  if (seeds.owners.size() != owners.size()) throw SpecError("one init seed per owner needed");
  ScientistOutcome out;

  auto t0 = Clock::now();
  out.train_ids = linkage::scientist_link(inputs.train.ids, owners, link);
  const auto train = data::align_to(inputs.train, out.train_ids.ids);
  std::optional<data::LabeledSet> validation;
  if (inputs.validation) {
    out.validation_ids = linkage::scientist_link(inputs.validation->ids, owners, link);
    validation = data::align_to(*inputs.validation, out.validation_ids->ids);
  }
  out.link_seconds = seconds_since(t0);

  out.head = nn::ModelSegment::init(config.scientist_spec, seeds.head);
  std::vector<nn::ModelSegment> owner_segments;
  for (std::size_t j = 0; j < owners.size(); ++j) {
    owner_segments.push_back(nn::ModelSegment::init(config.owner_specs[j], seeds.owners[j]));
  }
  t0 = Clock::now();
  out.metrics = training::run_scientist(config, out.head, owner_segments, train,
                                        validation ? &*validation : nullptr, owners, hooks);
  out.train_seconds = seconds_since(t0);
  return out;
}

OwnerOutcome owner_party(transport::Peer& scientist, const OwnerInputs& inputs,
                         std::optional<std::uint64_t> psi_key_seed, nn::Exec exec) {
  OwnerOutcome out;
  out.train = linkage::owner_link(scientist, inputs.train, psi_key_seed, exec);
  if (inputs.validation) {
    out.validation = linkage::owner_link(scientist, *inputs.validation, psi_key_seed, exec);
  }
  auto setup = training::receive_setup(scientist);
  out.segment = training::run_owner(scientist, std::move(setup.segment), out.train,
                                    out.validation ? &*out.validation : nullptr, setup.owner_lr);
  return out;
}

SimulationResult simulate(const ScientistInputs& scientist, const std::vector<OwnerInputs>& owners,
                          const training::TrainingConfig& config,
                          const linkage::LinkOptions& link, const InitSeeds& seeds,
                          transport::Millis timeout, const training::ScientistHooks& hooks,
                          const ChannelFactory& connect) {
  SimulationResult result;
  result.log = std::make_shared<transport::MessageLog>();
  std::vector<std::unique_ptr<transport::Channel>> sci_ends, owner_ends;
  for (std::size_t j = 0; j < owners.size(); ++j) {
    auto [a, b] = connect();
    const auto code = static_cast<transport::PartyCode>(j + 1);
    sci_ends.push_back(std::make_unique<transport::LoggingChannel>(
        std::move(a), result.log, transport::kScientist, "scientist<-owner" + std::to_string(code)));
    owner_ends.push_back(std::make_unique<transport::LoggingChannel>(
        std::move(b), result.log, code, "owner" + std::to_string(code) + "<-scientist"));
  }

  std::vector<std::future<OwnerOutcome>> futures;
  for (std::size_t j = 0; j < owners.size(); ++j) {
    futures.push_back(std::async(std::launch::async, [&, j] {
      transport::Peer peer(*owner_ends[j], static_cast<transport::PartyCode>(j + 1), std::nullopt,
                           timeout);
      auto key_seed = link.key_seed ? std::optional<std::uint64_t>(*link.key_seed + 1000 + j)
                                    : std::nullopt;
      try {
        return owner_party(peer, owners[j], key_seed, link.exec);
      } catch (...) {
        owner_ends[j]->close();
        throw;
      }
    }));
  }

  std::exception_ptr sci_error;
  {
    std::vector<transport::Peer> peers;
    for (auto& ch : sci_ends) {
      peers.emplace_back(*ch, transport::kScientist, transport::random_session_id(), timeout);
    }
    std::vector<transport::Peer*> ptrs;
    for (auto& p : peers) ptrs.push_back(&p);
    try {
      result.scientist = scientist_party(ptrs, scientist, config, link, seeds, hooks);
    } catch (...) {
      sci_error = std::current_exception();
      for (auto& ch : sci_ends) ch->close();
    }
  }

  std::exception_ptr owner_error;
  for (auto& f : futures) {
    try {
      result.owners.push_back(f.get());
    } catch (...) {
      if (!owner_error) owner_error = std::current_exception();
    }
  }
  if (sci_error) std::rethrow_exception(sci_error);
  if (owner_error) std::rethrow_exception(owner_error);
  return result;
}

}  // namespace svfl::pipeline
