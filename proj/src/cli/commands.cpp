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


#include "svfl/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <unordered_set>

#include "svfl/common/error.hpp"
#include "svfl/data/mnist.hpp"
#include "svfl/data/partition.hpp"
#include "svfl/nn/kernels.hpp"
#include "svfl/pipeline/party.hpp"
#include "svfl/psi/psi.hpp"
#include "svfl/transport/channel.hpp"
#include "svfl/transport/peer.hpp"

namespace svfl::cli {

namespace {

using Millis = transport::Millis;

// splitmix64 finaliser: independent-looking seeds from (seed, tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void apply_exec(const RunConfig& config) {
  if (config.exec == "parallel") {
    nn::set_default_exec(nn::Exec::Parallel);
  } else if (config.exec == "serial") {
    nn::set_default_exec(nn::Exec::Serial);
  } else {
    throw InputError("exec must be 'parallel' or 'serial', not '" + config.exec + "'");
  }
}

void require_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw InputError("missing file " + path.string());
}

data::FeaturePartition load_partition(const std::filesystem::path& path) {
  require_file(path);
  return data::read_partition(path);
}

data::LabeledSet load_labels(const std::filesystem::path& path) {
  require_file(path);
  return data::read_labels(path);
}

// Validation files are optional, but a half-present pair is an error.
bool has_validation_labels(const RunConfig& config) {
  return std::filesystem::exists(labels_path(config, true));
}

std::optional<std::uint64_t> owner_psi_seed(const RunConfig& config, std::size_t owner) {
  if (!config.psi_seed) return std::nullopt;
  return *config.psi_seed + 1000 + owner;
}

pipeline::ScientistInputs scientist_inputs(const RunConfig& config) {
  pipeline::ScientistInputs in;
  in.train = load_labels(labels_path(config, false));
  if (has_validation_labels(config)) in.validation = load_labels(labels_path(config, true));
  return in;
}

pipeline::OwnerInputs owner_inputs(const RunConfig& config, std::size_t owner, bool validation) {
  pipeline::OwnerInputs in;
  in.train = load_partition(partition_path(config, owner, false));
  if (validation) in.validation = load_partition(partition_path(config, owner, true));
  return in;
}

void write_csv(const RunConfig& config, const std::vector<training::EpochMetrics>& metrics) {
  training::write_metrics_csv(config.metrics, metrics);
}

training::ScientistHooks progress_hooks(std::ostream& log) {
  training::ScientistHooks hooks;
  hooks.on_epoch = [&log](const training::EpochMetrics& m) {
    char line[160];
    std::snprintf(line, sizeof(line), "epoch %zu: loss %.4f  train_acc %.4f  val_acc %.4f\n",
                  m.epoch, m.train_loss, m.train_accuracy, m.validation_accuracy);
    log << line << std::flush;
  };
  return hooks;
}

RunSummary summarize(const pipeline::ScientistOutcome& out, std::ostream& log) {
  char line[160];
  std::snprintf(line, sizeof(line), "linked %zu training rows; linkage %.2f s, training %.2f s\n",
                out.train_ids.ids.size(), out.link_seconds, out.train_seconds);
  log << line << std::flush;
  return {out.metrics, out.train_ids.ids.size(), out.link_seconds, out.train_seconds};
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const LinkageError*>(&error)) return kExitLinkage;
  if (dynamic_cast<const ProtocolError*>(&error)) return kExitProtocol;
  if (dynamic_cast<const TransportError*>(&error)) return kExitTransport;
  if (dynamic_cast<const InputError*>(&error) || dynamic_cast<const FormatError*>(&error) ||
      dynamic_cast<const SpecError*>(&error)) {
    return kExitInput;
  }
  return kExitFailure;
}

void split_data(const RunConfig& config, std::ostream& log) {
  const auto files = data::find_mnist_files(config.mnist_dir);
  if (!files) throw InputError("MNIST IDX files not found in " + config.mnist_dir);
  if (config.rows == 0) throw InputError("rows must be positive");
  if (!(config.keep_fraction > 0.0 && config.keep_fraction <= 1.0)) {
    throw InputError("keep_fraction must be in (0, 1]");
  }

  auto write_split = [&](const std::filesystem::path& images, const std::filesystem::path& labels,
                         std::size_t rows, bool validation) {
    const auto set = data::load_mnist_idx(images, labels, rows);
    if (set.labels.size() < rows) {
      throw InputError(images.string() + " holds only " + std::to_string(set.labels.size()) +
                       " images, " + std::to_string(rows) + " requested");
    }
    const std::uint64_t base = derive_seed(config.split_seed, validation ? 1 : 0);
    const auto ids = data::assign_ids(rows, base);
    auto halves = data::vertical_split(set.images, ids);
    halves.first.owner_label = "left";
    halves.second.owner_label = "right";
    const data::FeaturePartition* parts[] = {&halves.first, &halves.second};
    std::size_t kept_rows = 0;
    for (std::size_t j = 0; j < kOwnerCount; ++j) {
      const auto kept = data::scramble(*parts[j], config.keep_fraction, derive_seed(base, 10 + j));
      kept_rows = kept.rows();
      RunConfig standard = config;
      standard.partition.clear();
      standard.validation_partition.clear();
      data::write_partition(kept, partition_path(standard, j, validation));
    }
    RunConfig standard = config;
    standard.labels.clear();
    standard.validation_labels.clear();
    data::write_labels(data::LabeledSet{ids, set.labels}, labels_path(standard, validation));
    log << (validation ? "validation" : "training") << ": " << rows << " rows, "
        << kept_rows << " kept per owner\n";
  };

  std::filesystem::create_directories(config.data_dir);
  write_split(files->train_images, files->train_labels, config.rows, false);
  if (config.validation_rows > 0) {
    write_split(files->test_images, files->test_labels, config.validation_rows, true);
  }
}

RunSummary simulate(const RunConfig& config, std::ostream& log) {
  apply_exec(config);
  const auto tc = training_config(config);
  const auto sci = scientist_inputs(config);
  std::vector<pipeline::OwnerInputs> owners;
  for (std::size_t j = 0; j < kOwnerCount; ++j) {
    owners.push_back(owner_inputs(config, j, sci.validation.has_value()));
  }
  const auto result =
      pipeline::simulate(sci, owners, tc, link_options(config),
                         pipeline::derive_init_seeds(config.init_seed, kOwnerCount),
                         Millis(config.recv_timeout_ms), progress_hooks(log));
  write_csv(config, result.scientist.metrics);
  return summarize(result.scientist, log);
}

void owner(const RunConfig& config, std::ostream& log) {
  apply_exec(config);
  if (config.party == 0 || config.party > 255) throw InputError("party must be in 1..255");
  const std::size_t index = config.party - 1;
  auto in = owner_inputs(config, index, false);
  const auto val_path = partition_path(config, index, true);
  if (std::filesystem::exists(val_path)) in.validation = load_partition(val_path);

  const auto at = listen_endpoint(config);
  transport::TcpListener listener(at.host, at.port);
  log << "owner " << config.party << " listening on " << at.host << ":" << listener.port() << "\n"
      << std::flush;
  auto channel = listener.accept(Millis(config.connect_timeout_ms));
  transport::Peer peer(*channel, static_cast<transport::PartyCode>(config.party), std::nullopt,
                       Millis(config.recv_timeout_ms));
  const auto out = pipeline::owner_party(peer, in, owner_psi_seed(config, index), nn::default_exec());
  log << "owner " << config.party << " done: " << out.train.rows() << " linked rows\n";
}

RunSummary scientist(const RunConfig& config, std::ostream& log) {
  apply_exec(config);
  const auto endpoints = parse_endpoints(config.owners);
  const auto tc = training_config(config, endpoints.size());
  const auto in = scientist_inputs(config);

  const auto session = transport::random_session_id();
  std::vector<std::unique_ptr<transport::Channel>> channels;
  std::vector<std::unique_ptr<transport::Peer>> peers;
  std::vector<transport::Peer*> owners;
  for (const auto& at : endpoints) {
    channels.push_back(transport::tcp_connect(at.host, at.port, Millis(config.connect_timeout_ms)));
    peers.push_back(std::make_unique<transport::Peer>(*channels.back(), transport::kScientist,
                                                      session, Millis(config.recv_timeout_ms)));
    owners.push_back(peers.back().get());
  }
  const auto out = pipeline::scientist_party(owners, in, tc, link_options(config),
                                             pipeline::derive_init_seeds(config.init_seed,
                                                                         endpoints.size()),
                                             progress_hooks(log));
  write_csv(config, out.metrics);
  return summarize(out, log);
}

std::vector<std::string> read_id_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file " + path.string());
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen.insert(line).second) throw InputError(path.string() + ": duplicate id '" + line + "'");
    ids.push_back(line);
  }
  return ids;
}

std::vector<std::string> psi_test(const RunConfig& config, const std::filesystem::path& client_ids,
                                  const std::filesystem::path& server_ids, std::ostream& log) {
  apply_exec(config);
  const auto client = read_id_file(client_ids);
  const auto server = read_id_file(server_ids);
  const auto& params = psi::GroupParams::by_name(config.group);
  const auto client_key = config.psi_seed ? psi::SecretScalar::from_seed(params, *config.psi_seed)
                                          : psi::SecretScalar::generate(params);
  const auto server_key = config.psi_seed
                              ? psi::SecretScalar::from_seed(params, *config.psi_seed + 1)
                              : psi::SecretScalar::generate(params);

  const auto start = std::chrono::steady_clock::now();
  const auto blinded = psi::blind(client, client_key, params);
  const auto evaluated = psi::evaluate(blinded, server_key, params);
  const auto digest = psi::build_server_digest(server, server_key, config.fpr, params);
  const auto hits = psi::unblind_match(evaluated, client_key, digest, params);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto i : hits) out.push_back(client[i]);
  char line[160];
  std::snprintf(line, sizeof(line), "client %zu ids, server %zu ids, intersection %zu (%.2f s)\n",
                client.size(), server.size(), out.size(), seconds);
  log << line;
  return out;
}

}  // namespace svfl::cli
