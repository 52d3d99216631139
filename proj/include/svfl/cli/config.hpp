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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svfl/linkage/linkage.hpp"
#include "svfl/training/split.hpp"

namespace svfl::cli {

// Everything a command needs. Defaults reproduce the MNIST experiment.
struct RunConfig {
  // Training.
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double owner_lr = 0.01;
  double scientist_lr = 0.1;
  bool shuffle = true;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t init_seed = 0;
  std::string owner_spec = "392x64:relu";
  std::string scientist_spec = "128x500:relu,500x10:identity";
  std::size_t eval_chunk = 1000;

  // Data preparation.
  std::string mnist_dir = "data/mnist";
  std::string data_dir = "run";
  std::size_t rows = 20000;
  std::size_t validation_rows = 10000;
  double keep_fraction = 1.0;
  std::uint64_t split_seed = 0;

  // File overrides; empty means the standard name inside data_dir.
  std::string partition;
  std::string validation_partition;
  std::string labels;
  std::string validation_labels;
  std::string metrics = "metrics.csv";

  // Linkage.
  std::string group = "modp2048";
  double fpr = 1e-6;
  std::optional<std::uint64_t> psi_seed;

  // Network.
  std::size_t party = 1;
  std::string listen;  // empty means 127.0.0.1:(9000 + party)
  std::string owners = "127.0.0.1:9001,127.0.0.1:9002";
  std::uint64_t connect_timeout_ms = 60000;
  std::uint64_t recv_timeout_ms = 3600000;

  std::string exec = "parallel";  // or "serial"
};

struct ConfigKey {
  std::string name;
  std::string help;
};

// Every key accepted in config files and as --key-name flags.
const std::vector<ConfigKey>& config_keys();

// Throws InputError on an unknown key or an unparsable value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" lines; '#' starts a comment. Throws InputError if the
// file is missing or a line is malformed.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Environment variable naming the config file when --config is absent.
inline constexpr const char* kConfigEnv = "SVFL_CONFIG";

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
// "host:port"; throws InputError.
Endpoint parse_endpoint(std::string_view text);
std::vector<Endpoint> parse_endpoints(std::string_view comma_list);

// Derived settings. Two owners hold the left and right image halves.
inline constexpr std::size_t kOwnerCount = 2;
training::TrainingConfig training_config(const RunConfig& config, std::size_t owner_count = kOwnerCount);
linkage::LinkOptions link_options(const RunConfig& config);
Endpoint listen_endpoint(const RunConfig& config);

// Standard file names inside data_dir. Owner j (0-based) holds half j.
std::filesystem::path partition_path(const RunConfig& config, std::size_t owner, bool validation);
std::filesystem::path labels_path(const RunConfig& config, bool validation);

}  // namespace svfl::cli
