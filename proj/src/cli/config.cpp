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


#include "svfl/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>

#include "svfl/common/error.hpp"

namespace svfl::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw InputError("config key '" + std::string(key) + "': '" + std::string(value) + "' is not " +
                   what);
}

template <class T>
T parse_number(std::string_view key, std::string_view value, const char* what) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) bad_value(key, value, what);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

Setter size(std::size_t RunConfig::*field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_number<std::size_t>(k, v, "a non-negative integer");
  };
}
Setter u64(std::uint64_t RunConfig::*field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_number<std::uint64_t>(k, v, "a non-negative integer");
  };
}
Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_number<double>(k, v, "a number");
  };
}
Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, std::string_view, std::string_view v) { c.*field = std::string(v); };
}

struct Entry {
  ConfigKey key;
  Setter set;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"epochs", "training epochs"}, size(&RunConfig::epochs)},
      {{"batch_size", "rows per batch"}, size(&RunConfig::batch_size)},
      {{"owner_lr", "owner SGD learning rate"}, real(&RunConfig::owner_lr)},
      {{"scientist_lr", "scientist SGD learning rate"}, real(&RunConfig::scientist_lr)},
      {{"shuffle", "reshuffle rows every epoch"},
       [](RunConfig& c, std::string_view k, std::string_view v) { c.shuffle = parse_bool(k, v); }},
      {{"shuffle_seed", "seed of the per-epoch shuffles"}, u64(&RunConfig::shuffle_seed)},
      {{"init_seed", "seed of the initial weights"}, u64(&RunConfig::init_seed)},
      {{"owner_spec", "owner segment, e.g. 392x64:relu"}, text(&RunConfig::owner_spec)},
      {{"scientist_spec", "scientist head, e.g. 128x500:relu,500x10:identity"},
       text(&RunConfig::scientist_spec)},
      {{"eval_chunk", "rows per evaluation request"}, size(&RunConfig::eval_chunk)},
      {{"mnist_dir", "directory holding the MNIST IDX files"}, text(&RunConfig::mnist_dir)},
      {{"data_dir", "directory of partition and label files"}, text(&RunConfig::data_dir)},
      {{"rows", "leading training images to use"}, size(&RunConfig::rows)},
      {{"validation_rows", "leading test images to use (0 for none)"},
       size(&RunConfig::validation_rows)},
      {{"keep_fraction", "fraction of rows each owner keeps"}, real(&RunConfig::keep_fraction)},
      {{"split_seed", "seed of ids and per-owner scrambles"}, u64(&RunConfig::split_seed)},
      {{"partition", "this owner's training partition file"}, text(&RunConfig::partition)},
      {{"validation_partition", "this owner's validation partition file"},
       text(&RunConfig::validation_partition)},
      {{"labels", "training label file"}, text(&RunConfig::labels)},
      {{"validation_labels", "validation label file"}, text(&RunConfig::validation_labels)},
      {{"metrics", "metrics CSV output"}, text(&RunConfig::metrics)},
      {{"group", "PSI group: modp2048 or toy64"}, text(&RunConfig::group)},
      {{"fpr", "Bloom filter false-positive rate"}, real(&RunConfig::fpr)},
      {{"psi_seed", "fixed PSI secrets (empty for random)"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v.empty()) {
           c.psi_seed.reset();
         } else {
           c.psi_seed = parse_number<std::uint64_t>(k, v, "a non-negative integer");
         }
       }},
      {{"party", "owner party code (1-based)"}, size(&RunConfig::party)},
      {{"listen", "owner listen address host:port"}, text(&RunConfig::listen)},
      {{"owners", "comma-separated owner addresses"}, text(&RunConfig::owners)},
      {{"connect_timeout_ms", "connect/accept timeout"}, u64(&RunConfig::connect_timeout_ms)},
      {{"recv_timeout_ms", "per-message receive timeout"}, u64(&RunConfig::recv_timeout_ms)},
      {{"exec", "kernel execution: parallel or serial"}, text(&RunConfig::exec)},
  };
  return table;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& e : entries()) {
    if (e.key.name == key) {
      e.set(config, key, trim(value));
      return;
    }
  }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      set_config_value(config, trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

Endpoint parse_endpoint(std::string_view text) {
  text = trim(text);
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw InputError("address '" + std::string(text) + "' is not host:port");
  }
  const auto port = parse_number<std::uint32_t>("address", text.substr(colon + 1), "a port");
  if (port == 0 || port > 65535) throw InputError("port out of range in '" + std::string(text) + "'");
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::vector<Endpoint> parse_endpoints(std::string_view comma_list) {
  std::vector<Endpoint> out;
  while (!comma_list.empty()) {
    const auto comma = comma_list.find(',');
    out.push_back(parse_endpoint(comma_list.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    comma_list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InputError("no owner addresses given");
  return out;
}

training::TrainingConfig training_config(const RunConfig& config, std::size_t owner_count) {
  training::TrainingConfig t;
  t.epochs = config.epochs;
  t.batch_size = config.batch_size;
  t.owner_lr = config.owner_lr;
  t.scientist_lr = config.scientist_lr;
  t.shuffle = config.shuffle;
  t.shuffle_seed = config.shuffle_seed;
  t.owner_specs.assign(owner_count, nn::SegmentSpec::parse(config.owner_spec));
  t.scientist_spec = nn::SegmentSpec::parse(config.scientist_spec);
  t.eval_chunk = config.eval_chunk;
  t.validate(owner_count);
  return t;
}

linkage::LinkOptions link_options(const RunConfig& config) {
  linkage::LinkOptions l;
  l.group = config.group;
  l.fpr = config.fpr;
  l.key_seed = config.psi_seed;
  return l;
}

Endpoint listen_endpoint(const RunConfig& config) {
  if (!config.listen.empty()) return parse_endpoint(config.listen);
  if (config.party == 0 || config.party > 255) throw InputError("party must be in 1..255");
  return {"127.0.0.1", static_cast<std::uint16_t>(9000 + config.party)};
}

std::filesystem::path partition_path(const RunConfig& config, std::size_t owner, bool validation) {
  const std::string& override_path = validation ? config.validation_partition : config.partition;
  if (!override_path.empty() && owner + 1 == config.party) return override_path;
  static const char* const kHalves[] = {"left", "right"};
  if (owner >= std::size(kHalves)) {
    throw InputError("owner " + std::to_string(owner + 1) + " needs an explicit partition file");
  }
  return std::filesystem::path(config.data_dir) /
         ((validation ? std::string("val_") : std::string()) + kHalves[owner] + ".pyvt");
}

std::filesystem::path labels_path(const RunConfig& config, bool validation) {
  const std::string& override_path = validation ? config.validation_labels : config.labels;
  if (!override_path.empty()) return override_path;
  return std::filesystem::path(config.data_dir) / (validation ? "val_labels.pyvl" : "labels.pyvl");
}

}  // namespace svfl::cli
