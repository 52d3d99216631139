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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "svfl/data/partition.hpp"
#include "svfl/nn/segment.hpp"
#include "svfl/training/messages.hpp"
#include "svfl/transport/peer.hpp"

namespace svfl::training {

struct TrainingConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double owner_lr = 0.01;
  double scientist_lr = 0.1;
  std::uint64_t shuffle_seed = 0;
  // Epoch e uses seeded_permutation(n, shuffle_seed + e); identity when off.
  bool shuffle = true;
  // Concatenation order over owner indices; empty means ascending.
  std::vector<std::size_t> owner_order;
  std::vector<nn::SegmentSpec> owner_specs;
  nn::SegmentSpec scientist_spec;
  // Rows per EVAL_REQUEST.
  std::size_t eval_chunk = 1000;

  std::vector<std::size_t> resolved_order() const;
  std::vector<std::size_t> owner_widths() const;
  // Throws SpecError on a bad shape chain, zero batch size, a bad order, or
  // owner output widths that do not sum to the scientist input width.
  void validate(std::size_t owner_count) const;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double train_accuracy = 0;
  double validation_accuracy = 0;
  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct StepInfo {
  std::size_t epoch = 0;  // 0-based
  std::size_t batch = 0;
  std::size_t rows = 0;
  double loss = 0;
};

struct ScientistHooks {
  // After each scientist step, before gradients go out.
  std::function<void(const StepInfo&, const nn::ModelSegment& head)> on_step;
  std::function<void(const EpochMetrics&)> on_epoch;
};

// Lock-step training driver held by the data scientist. `owners[j]` talks
// to owner j; `train` and `validation` are aligned to the owners' rows.
// Sends owner_segments[j] to owner j first and END_TRAINING last. On any
// failure the owners are sent ABORT and the error is rethrown.
std::vector<EpochMetrics> run_scientist(const TrainingConfig& config, nn::ModelSegment& head,
                                        const std::vector<nn::ModelSegment>& owner_segments,
                                        const data::LabeledSet& train,
                                        const data::LabeledSet* validation,
                                        const std::vector<transport::Peer*>& owners,
                                        const ScientistHooks& hooks = {});

// Forward-only pass over rows [0, labels.size()) of `split` in chunks.
// Returns the fraction of rows whose argmax matches the label.
double evaluate(const TrainingConfig& config, const nn::ModelSegment& head,
                const data::LabeledSet& labels, EvalSplit split,
                const std::vector<transport::Peer*>& owners);

// Owner side: the segment and learning rate the scientist sends before
// training.
SetupMsg receive_setup(transport::Peer& scientist);

// Serves batch and evaluation requests until END_TRAINING and returns the
// trained segment. Throws ProtocolError (after telling the scientist) on
// out-of-sequence messages or shape violations.
nn::ModelSegment run_owner(transport::Peer& scientist, nn::ModelSegment segment,
                           const data::FeaturePartition& train,
                           const data::FeaturePartition* validation, double owner_lr);

// "epoch,train_loss,train_acc,val_acc"
std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics);

}  // namespace svfl::training
