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
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "svfl/data/partition.hpp"
#include "svfl/linkage/linkage.hpp"
#include "svfl/nn/segment.hpp"
#include "svfl/training/split.hpp"
#include "svfl/transport/channel.hpp"
#include "svfl/transport/peer.hpp"

namespace svfl::pipeline {

struct ScientistInputs {
  data::LabeledSet train;
  std::optional<data::LabeledSet> validation;
};

struct ScientistOutcome {
  linkage::GlobalIntersection train_ids;
  std::optional<linkage::GlobalIntersection> validation_ids;
  std::vector<training::EpochMetrics> metrics;
  nn::ModelSegment head;
  double link_seconds = 0;
  double train_seconds = 0;
};

struct OwnerInputs {
  data::FeaturePartition train;
  std::optional<data::FeaturePartition> validation;
};

struct OwnerOutcome {
  data::FeaturePartition train;  // aligned
  std::optional<data::FeaturePartition> validation;
  nn::ModelSegment segment;
};

// Initial parameters: the scientist initialises its head and every owner
// segment (owner j from owner_seeds[j]) and ships the owner segments.
struct InitSeeds {
  std::uint64_t head = 0;
  std::vector<std::uint64_t> owners;
};
InitSeeds derive_init_seeds(std::uint64_t master, std::size_t owner_count);

// Links the training set (and the validation set when present), aligns the
// labels to the global order, then runs lock-step training.
ScientistOutcome scientist_party(const std::vector<transport::Peer*>& owners,
                                 const ScientistInputs& inputs,
                                 const training::TrainingConfig& config,
                                 const linkage::LinkOptions& link, const InitSeeds& seeds,
                                 const training::ScientistHooks& hooks = {});

// Mirror image for one owner. `psi_key_seed` fixes the PSI secret for
// tests; random when unset.
OwnerOutcome owner_party(transport::Peer& scientist, const OwnerInputs& inputs,
                         std::optional<std::uint64_t> psi_key_seed = std::nullopt,
                         nn::Exec exec = nn::default_exec());

struct SimulationResult {
  ScientistOutcome scientist;
  std::vector<OwnerOutcome> owners;
  std::shared_ptr<transport::MessageLog> log;
};

// Returns the (scientist end, owner end) of a fresh connection.
using ChannelFactory =
    std::function<std::pair<std::unique_ptr<transport::Channel>, std::unique_ptr<transport::Channel>>()>;

// Scientist and owners in one process, one thread per owner, over logged
// channels from `connect` (loopback by default). Owner j gets party code
// j + 1. Rethrows the scientist's error if it failed, otherwise the first
// owner error.
SimulationResult simulate(const ScientistInputs& scientist, const std::vector<OwnerInputs>& owners,
                          const training::TrainingConfig& config,
                          const linkage::LinkOptions& link, const InitSeeds& seeds,
                          transport::Millis timeout, const training::ScientistHooks& hooks = {},
                          const ChannelFactory& connect = transport::loopback_pair);

}  // namespace svfl::pipeline
