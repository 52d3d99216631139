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


// svfl: vertical federated learning command-line tool.
//
// Exit codes: 0 success, 1 internal error, 2 missing or malformed input,
// 3 connection failure or timeout, 4 linkage failure, 5 protocol error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "svfl/cli/commands.hpp"
#include "svfl/cli/config.hpp"
#include "svfl/common/error.hpp"

namespace {

using svfl::cli::RunConfig;

std::string flag_name(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

struct Settings {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App& cmd, Settings& settings) {
  cmd.add_option("--config", settings.config_path,
                 std::string("key = value config file (default: $") + svfl::cli::kConfigEnv + ")");
  for (const auto& key : svfl::cli::config_keys()) {
    auto* opt = cmd.add_option_function<std::string>(
        flag_name(key.name),
        [&settings, name = key.name](const std::string& v) { settings.overrides[name] = v; },
        key.help);
    opt->type_name("VALUE");
  }
}

RunConfig resolve(const Settings& settings) {
  RunConfig config;
  std::string path = settings.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(svfl::cli::kConfigEnv)) path = env;
  }
  if (!path.empty()) svfl::cli::apply_config_file(config, path);
  for (const auto& [key, value] : settings.overrides) svfl::cli::set_config_value(config, key, value);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertical federated learning with PSI linkage and split neural networks"};
  app.require_subcommand(1);
  Settings settings;

  auto* split = app.add_subcommand("split-data", "Split MNIST into left/right owner partitions");
  auto* simulate = app.add_subcommand("simulate", "Run scientist and two owners in one process");
  auto* owner = app.add_subcommand("owner", "Run one data owner over TCP");
  auto* scientist = app.add_subcommand("scientist", "Run the data scientist over TCP");
  auto* psi = app.add_subcommand("psi-test", "Intersect two id files with the PSI protocol");
  for (auto* cmd : {split, simulate, owner, scientist, psi}) add_config_options(*cmd, settings);

  std::string client_file, server_file, out_file;
  psi->add_option("--client", client_file, "client id file (one id per line)")->required();
  psi->add_option("--server", server_file, "server id file (one id per line)")->required();
  psi->add_option("--out", out_file, "write the intersection here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : svfl::cli::kExitInput;
  }

  const char* name = app.get_subcommands().front()->get_name().c_str();
  try {
    const RunConfig config = resolve(settings);
    if (split->parsed()) {
      svfl::cli::split_data(config, std::cerr);
    } else if (simulate->parsed()) {
      svfl::cli::simulate(config, std::cerr);
    } else if (owner->parsed()) {
      svfl::cli::owner(config, std::cerr);
    } else if (scientist->parsed()) {
      svfl::cli::scientist(config, std::cerr);
    } else if (psi->parsed()) {
      const auto ids = svfl::cli::psi_test(config, client_file, server_file, std::cerr);
      std::ofstream file;
      if (!out_file.empty()) {
        file.open(out_file);
        if (!file) throw svfl::InputError("cannot write " + out_file);
      }
      std::ostream& out = out_file.empty() ? std::cout : file;
      for (const auto& id : ids) out << id << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "svfl " << name << ": error: " << e.what() << '\n';
    return svfl::cli::exit_code_for(e);
  }
  return 0;
}
