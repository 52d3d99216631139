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

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "svfl/cli/config.hpp"
#include "svfl/training/split.hpp"

namespace svfl::cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,    // unexpected internal error
  kExitInput = 2,      // missing or malformed files, bad configuration
  kExitTransport = 3,  // connection refused, timeout, peer gone
  kExitLinkage = 4,    // empty intersection or unlinkable rows
  kExitProtocol = 5,   // peer violated or aborted the protocol
};

int exit_code_for(const std::exception& error);

struct RunSummary {
  std::vector<training::EpochMetrics> metrics;
  std::size_t linked_rows = 0;
  double link_seconds = 0;
  double train_seconds = 0;
};

// Writes the partition and label files into config.data_dir. Owner j gets
// half j of every image, scrambled with its own derived seed; the label
// files keep every row in original order.
void split_data(const RunConfig& config, std::ostream& log);

// Scientist and both owners in one process over loopback channels.
// Writes the metrics CSV.
RunSummary simulate(const RunConfig& config, std::ostream& log);

// One owner process: listens, serves linkage, then training.
void owner(const RunConfig& config, std::ostream& log);

// The scientist process: dials every owner, links, trains, writes the CSV.
RunSummary scientist(const RunConfig& config, std::ostream& log);

// Two-party PSI over files of newline-separated ids, in one process.
// Returns the client's ids that the server also holds, in client order.
std::vector<std::string> psi_test(const RunConfig& config, const std::filesystem::path& client_ids,
                                  const std::filesystem::path& server_ids, std::ostream& log);

// Newline-separated ids; blank lines are skipped, trailing CR dropped.
std::vector<std::string> read_id_file(const std::filesystem::path& path);

}  // namespace svfl::cli
