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


#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include "svfl/cli/commands.hpp"
#include "svfl/cli/config.hpp"
#include "svfl/common/error.hpp"
#include "svfl/data/partition.hpp"
#include "svfl/transport/channel.hpp"
#include "test_util.hpp"

namespace svfl::cli {
namespace {

namespace fs = std::filesystem;
using svfl::testing::ScratchDir;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::uint16_t free_port() {
  transport::TcpListener probe("127.0.0.1", 0);
  return probe.port();
}

RunConfig small_run(const fs::path& dir) {
  RunConfig c;
  c.mnist_dir = (fs::path(SVFL_SOURCE_DIR) / "data" / "mnist-subset").string();
  c.data_dir = (dir / "data").string();
  c.metrics = (dir / "metrics.csv").string();
  c.rows = 300;
  c.validation_rows = 100;
  c.epochs = 2;
  c.batch_size = 32;
  c.group = "toy64";
  c.psi_seed = 1;
  c.connect_timeout_ms = 10000;
  c.recv_timeout_ms = 10000;
  return c;
}

TEST(RunConfigDefaults, MatchExperiment) {
  const RunConfig c;
  EXPECT_EQ(c.epochs, 30u);
  EXPECT_EQ(c.batch_size, 128u);
  EXPECT_EQ(c.owner_lr, 0.01);
  EXPECT_EQ(c.scientist_lr, 0.1);
  EXPECT_EQ(c.rows, 20000u);
  EXPECT_EQ(c.fpr, 1e-6);
  const auto t = training_config(c);
  ASSERT_EQ(t.owner_specs.size(), 2u);
  EXPECT_EQ(t.owner_specs[0].to_string(), "392x64:relu");
  EXPECT_EQ(t.scientist_spec.to_string(), "128x500:relu,500x10:identity");
  const auto owners = parse_endpoints(c.owners);
  ASSERT_EQ(owners.size(), 2u);
  EXPECT_EQ(owners[0].port, 9001);
  EXPECT_EQ(owners[1].port, 9002);
  EXPECT_EQ(listen_endpoint(c).port, 9001);
}

TEST(RunConfigFile, ParsesAndFlagsOverride) {
  ScratchDir dir("cli");
  const auto path = dir.path() / "run.conf";
  write_text(path,
             "# experiment\n"
             "epochs = 5\n"
             "  owner_lr=0.05   # inline comment\n"
             "\n"
             "shuffle = false\r\n"
             "psi_seed = 42\n"
             "metrics = out/m.csv\n");
  RunConfig c;
  apply_config_file(c, path);
  EXPECT_EQ(c.epochs, 5u);
  EXPECT_EQ(c.owner_lr, 0.05);
  EXPECT_FALSE(c.shuffle);
  EXPECT_EQ(c.psi_seed, 42u);
  EXPECT_EQ(c.metrics, "out/m.csv");
  EXPECT_EQ(c.batch_size, 128u);
  set_config_value(c, "epochs", "7");
  set_config_value(c, "psi_seed", "");
  EXPECT_EQ(c.epochs, 7u);
  EXPECT_FALSE(c.psi_seed.has_value());
}

TEST(RunConfigFile, Errors) {
  ScratchDir dir("cli");
  RunConfig c;
  EXPECT_THROW(apply_config_file(c, dir.path() / "absent.conf"), InputError);
  write_text(dir.path() / "a.conf", "epochs 5\n");
  EXPECT_THROW(apply_config_file(c, dir.path() / "a.conf"), InputError);
  write_text(dir.path() / "b.conf", "epoch = 5\n");
  EXPECT_THROW(apply_config_file(c, dir.path() / "b.conf"), InputError);
  EXPECT_THROW(set_config_value(c, "epochs", "-1"), InputError);
  EXPECT_THROW(set_config_value(c, "epochs", "5x"), InputError);
  EXPECT_THROW(set_config_value(c, "fpr", "small"), InputError);
  EXPECT_THROW(set_config_value(c, "shuffle", "maybe"), InputError);
  for (const auto& key : config_keys()) EXPECT_FALSE(key.help.empty()) << key.name;
}

TEST(Endpoints, Parse) {
  const auto e = parse_endpoint("localhost:9001");
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 9001);
  EXPECT_EQ(parse_endpoints("a:1, b:2").size(), 2u);
  EXPECT_THROW(parse_endpoint("localhost"), InputError);
  EXPECT_THROW(parse_endpoint("h:0"), InputError);
  EXPECT_THROW(parse_endpoint("h:70000"), InputError);
  EXPECT_THROW(parse_endpoints(""), InputError);
}

TEST(ExitCodes, MapErrorClasses) {
  EXPECT_EQ(exit_code_for(InputError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(FormatError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(SpecError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(TimeoutError("x")), kExitTransport);
  EXPECT_EQ(exit_code_for(DisconnectError("x")), kExitTransport);
  EXPECT_EQ(exit_code_for(LinkageError("x")), kExitLinkage);
  EXPECT_EQ(exit_code_for(EmptyIntersectionError("x")), kExitLinkage);
  EXPECT_EQ(exit_code_for(ProtocolError("x")), kExitProtocol);
  EXPECT_EQ(exit_code_for(FramingError("x")), kExitProtocol);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitFailure);
}

TEST(SplitData, WritesDeterministicHalves) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  c.keep_fraction = 1.0;
  std::ostringstream log;
  split_data(c, log);
  const fs::path d = c.data_dir;
  const auto left = data::read_partition(d / "left.pyvt");
  const auto right = data::read_partition(d / "right.pyvt");
  const auto labels = data::read_labels(d / "labels.pyvl");
  EXPECT_EQ(left.width(), 392u);
  EXPECT_EQ(right.width(), 392u);
  EXPECT_EQ(left.rows(), 300u);
  EXPECT_EQ(right.rows(), 300u);
  EXPECT_EQ(labels.size(), 300u);
  EXPECT_EQ(data::read_labels(d / "val_labels.pyvl").size(), 100u);
  // Same id set everywhere, each owner in its own order.
  auto sorted = [](std::vector<data::DatasetId> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(sorted(left.ids), sorted(labels.ids));
  EXPECT_EQ(sorted(right.ids), sorted(labels.ids));
  EXPECT_NE(left.ids, right.ids);

  const auto first = slurp(d / "left.pyvt");
  split_data(c, log);
  EXPECT_EQ(slurp(d / "left.pyvt"), first);

  c.keep_fraction = 0.9;
  split_data(c, log);
  EXPECT_EQ(data::read_partition(d / "left.pyvt").rows(), 270u);
  EXPECT_EQ(data::read_labels(d / "labels.pyvl").size(), 300u);
}

TEST(SplitData, MissingMnistIsInputError) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  c.mnist_dir = (dir.path() / "none").string();
  std::ostringstream log;
  try {
    split_data(c, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), kExitInput);
  }
  c = small_run(dir.path());
  c.rows = 1000000;
  EXPECT_THROW(split_data(c, log), InputError);
}

TEST(Simulate, ZeroEpochsWritesHeaderOnly) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  std::ostringstream log;
  split_data(c, log);
  c.epochs = 0;
  EXPECT_TRUE(simulate(c, log).metrics.empty());
  EXPECT_EQ(slurp(c.metrics), "epoch,train_loss,train_acc,val_acc\n");
}

TEST(Simulate, RepeatableAndSeedSensitive) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  c.keep_fraction = 0.9;
  std::ostringstream log;
  split_data(c, log);
  EXPECT_EQ(simulate(c, log).metrics.size(), 2u);
  const auto first = slurp(c.metrics);
  c.psi_seed.reset();  // PSI secrets do not affect the result
  simulate(c, log);
  EXPECT_EQ(slurp(c.metrics), first);
  c.init_seed = 99;
  simulate(c, log);
  EXPECT_NE(slurp(c.metrics), first);
}

TEST(Simulate, MissingPartitionIsInputError) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  std::ostringstream log;
  split_data(c, log);
  fs::remove(fs::path(c.data_dir) / "right.pyvt");
  try {
    simulate(c, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), kExitInput);
  }
}

TEST(OwnerCommand, TimesOutWithoutScientist) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  std::ostringstream log;
  split_data(c, log);
  c.listen = "127.0.0.1:" + std::to_string(free_port());
  c.connect_timeout_ms = 200;
  try {
    owner(c, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), kExitTransport);
  }
}

TEST(ScientistCommand, ConnectionRefusedIsTransportError) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  std::ostringstream log;
  split_data(c, log);
  c.owners = "127.0.0.1:" + std::to_string(free_port()) + ",127.0.0.1:" + std::to_string(free_port());
  c.connect_timeout_ms = 200;
  try {
    scientist(c, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), kExitTransport);
  }
}

struct TcpRun {
  std::vector<training::EpochMetrics> metrics;
  std::vector<int> owner_codes;
  int scientist_code = 0;
};

// Both owners in threads, scientist on the calling thread.
TcpRun run_over_tcp(const RunConfig& base, const std::vector<RunConfig>& owner_configs) {
  TcpRun run;
  std::vector<std::future<int>> owners;
  std::string addresses;
  for (std::size_t j = 0; j < owner_configs.size(); ++j) {
    auto oc = owner_configs[j];
    oc.party = j + 1;
    oc.listen = "127.0.0.1:" + std::to_string(free_port());
    addresses += (j ? "," : "") + oc.listen;
    owners.push_back(std::async(std::launch::async, [oc] {
      std::ostringstream log;
      try {
        owner(oc, log);
        return 0;
      } catch (const std::exception& e) {
        return exit_code_for(e);
      }
    }));
  }
  auto sc = base;
  sc.owners = addresses;
  std::ostringstream log;
  try {
    run.metrics = scientist(sc, log).metrics;
  } catch (const std::exception& e) {
    run.scientist_code = exit_code_for(e);
  }
  for (auto& f : owners) run.owner_codes.push_back(f.get());
  return run;
}

TEST(ScientistCommand, TcpMatchesSimulation) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  c.keep_fraction = 0.95;
  std::ostringstream log;
  split_data(c, log);
  const auto simulated = simulate(c, log).metrics;
  const auto csv = slurp(c.metrics);
  auto tcp = c;
  tcp.metrics = (dir.path() / "tcp.csv").string();
  const auto run = run_over_tcp(tcp, {tcp, tcp});
  EXPECT_EQ(run.scientist_code, 0);
  EXPECT_EQ(run.owner_codes, (std::vector<int>{0, 0}));
  EXPECT_EQ(run.metrics, simulated);
  EXPECT_EQ(slurp(tcp.metrics), csv);
}

TEST(ScientistCommand, EmptyIntersectionExitsFourEverywhere) {
  ScratchDir dir("cli");
  auto c = small_run(dir.path());
  c.validation_rows = 0;
  std::ostringstream log;
  split_data(c, log);
  auto other = c;
  other.data_dir = (dir.path() / "other").string();
  other.split_seed = 12345;  // unrelated ids
  split_data(other, log);
  const auto run = run_over_tcp(c, {other, other});
  EXPECT_EQ(run.scientist_code, kExitLinkage);
  EXPECT_EQ(run.owner_codes, (std::vector<int>{kExitLinkage, kExitLinkage}));
}

TEST(PsiTest, IntersectsIdFiles) {
  ScratchDir dir("cli");
  write_text(dir.path() / "c.txt", "a\nb\r\n\nc\n");
  write_text(dir.path() / "s.txt", "b\nc\nd\n");
  RunConfig c;
  c.group = "toy64";
  std::ostringstream log;
  EXPECT_EQ(psi_test(c, dir.path() / "c.txt", dir.path() / "s.txt", log),
            (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(read_id_file(dir.path() / "c.txt"), (std::vector<std::string>{"a", "b", "c"}));
  write_text(dir.path() / "dup.txt", "a\na\n");
  EXPECT_THROW(read_id_file(dir.path() / "dup.txt"), InputError);
  EXPECT_THROW(psi_test(c, dir.path() / "c.txt", dir.path() / "none.txt", log), InputError);
}

}  // namespace
}  // namespace svfl::cli
