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

#include <cmath>
#include <future>
#include <map>
#include <random>

#include "svfl/common/error.hpp"
#include "svfl/nn/loss.hpp"
#include "svfl/pipeline/party.hpp"
#include "svfl/training/concat.hpp"
#include "svfl/training/messages.hpp"
#include "svfl/training/split.hpp"
#include "test_util.hpp"

namespace svfl::training {
namespace {

using namespace std::chrono_literals;
using svfl::testing::random_labels;
using svfl::testing::random_matrix;
using transport::MsgType;

std::vector<std::size_t> widths_of(const std::vector<nn::Matrix>& parts) {
  std::vector<std::size_t> w;
  for (const auto& p : parts) w.push_back(p.cols());
  return w;
}

TEST(ConcatActivations, TwoOwnerHalvesMakeHeadInput) {
  std::mt19937_64 rng(1);
  std::vector<nn::Matrix> parts{random_matrix(128, 64, rng), random_matrix(128, 64, rng)};
  const auto x = concat_activations(parts, {0, 1});
  ASSERT_EQ(x.rows(), 128u);
  ASSERT_EQ(x.cols(), 128u);
  for (std::size_t r = 0; r < 128; ++r) {
    for (std::size_t c = 0; c < 64; ++c) {
      EXPECT_EQ(x(r, c), parts[0](r, c));
      EXPECT_EQ(x(r, 64 + c), parts[1](r, c));
    }
  }
}

TEST(ConcatActivations, FollowsOrder) {
  const auto a = nn::Matrix::from_rows({{1, 2}});
  const auto b = nn::Matrix::from_rows({{3}});
  EXPECT_EQ(concat_activations({a, b}, {1, 0}), nn::Matrix::from_rows({{3, 1, 2}}));
  EXPECT_EQ(concat_activations({a}, {0}), a);
}

TEST(ConcatActivations, Errors) {
  const auto a = nn::Matrix(2, 3);
  const auto b = nn::Matrix(3, 3);
  EXPECT_THROW(concat_activations({a, b}, {0, 1}), ProtocolError);
  EXPECT_THROW(concat_activations({a, a}, {0, 0}), ProtocolError);
  EXPECT_THROW(concat_activations({a, a}, {0}), ProtocolError);
  EXPECT_THROW(concat_activations({}, {}), ProtocolError);
}

TEST(SliceGradient, ExampleShapesAndErrors) {
  std::mt19937_64 rng(2);
  const auto g = random_matrix(128, 128, rng);
  const auto slices = slice_gradient(g, {64, 64}, {0, 1});
  ASSERT_EQ(slices.size(), 2u);
  EXPECT_EQ(slices[0].cols(), 64u);
  EXPECT_EQ(slices[1](5, 3), g(5, 67));
  EXPECT_EQ(slice_gradient(g, {128}, {0})[0], g);
  EXPECT_THROW(slice_gradient(g, {64, 63}, {0, 1}), ProtocolError);
  EXPECT_THROW(slice_gradient(g, {64, 64}, {1, 1}), ProtocolError);
}

TEST(ConcatSliceProperty, ExactInverses) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t owners = 1 + rng() % 4;
    const std::size_t rows = 1 + rng() % 20;
    std::vector<nn::Matrix> parts;
    for (std::size_t j = 0; j < owners; ++j) parts.push_back(random_matrix(rows, 1 + rng() % 9, rng));
    auto order = ascending_order(owners);
    std::shuffle(order.begin(), order.end(), rng);
    const auto x = concat_activations(parts, order);
    ASSERT_EQ(slice_gradient(x, widths_of(parts), order), parts);
    // And the other way round.
    const auto back = concat_activations(slice_gradient(x, widths_of(parts), order), order);
    ASSERT_EQ(back, x);
  }
}

TEST(TrainingMessages, RoundTrips) {
  std::mt19937_64 rng(4);
  SetupMsg setup{0.01, nn::ModelSegment::init(nn::SegmentSpec::parse("3x2:relu"), 1)};
  const auto s2 = decode_setup(encode(setup));
  EXPECT_EQ(s2.owner_lr, 0.01);
  EXPECT_TRUE(s2.segment.same_parameters(setup.segment));

  PermutationMsg perm{3, {2, 0, 1}};
  EXPECT_EQ(decode_permutation(encode(perm)), perm);
  BatchRequestMsg req{1, 7, 128, 256};
  EXPECT_EQ(decode_batch_request(encode(req)), req);
  BatchTensorMsg fwd{2, 1, 7, random_matrix(3, 4, rng)};
  EXPECT_EQ(decode_batch_tensor(encode(fwd)), fwd);
  EvalRequestMsg ev{EvalSplit::Train, 10, 20};
  EXPECT_EQ(decode_eval_request(encode(ev)), ev);
  EvalForwardMsg evf{1, ev, random_matrix(10, 2, rng)};
  EXPECT_EQ(decode_eval_forward(encode(evf)), evf);
}

TEST(TrainingMessages, LayoutAndTruncation) {
  const Bytes b = encode(BatchRequestMsg{1, 2, 3, 4});
  EXPECT_EQ(b, (Bytes{0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4}));
  EXPECT_THROW(decode_batch_request(ByteSpan(b).first(15)), FormatError);
  EXPECT_THROW(decode_batch_request(encode(BatchRequestMsg{1, 2, 4, 4})), FormatError);
  auto t = encode(BatchTensorMsg{1, 0, 0, nn::Matrix(2, 2)});
  t.push_back(0);
  EXPECT_THROW(decode_batch_tensor(t), FormatError);
  EXPECT_THROW(decode_permutation(Bytes{0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 1}), FormatError);
}

TEST(TrainingConfigCheck, RejectsInconsistentShapes) {
  TrainingConfig c;
  c.owner_specs = {nn::SegmentSpec::parse("4x3:relu"), nn::SegmentSpec::parse("5x2:relu")};
  c.scientist_spec = nn::SegmentSpec::parse("5x3:identity");
  c.validate(2);
  EXPECT_THROW(c.validate(1), SpecError);
  c.scientist_spec = nn::SegmentSpec::parse("6x3:identity");
  EXPECT_THROW(c.validate(2), SpecError);
  c.scientist_spec = nn::SegmentSpec::parse("5x3:identity");
  c.owner_order = {1, 1};
  EXPECT_THROW(c.validate(2), SpecError);
  c.owner_order = {1, 0};
  c.validate(2);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(2), SpecError);
}

// Synthetic vertical data: two owners with `w` features each and labels
// that depend on both halves.
struct Synthetic {
  pipeline::ScientistInputs scientist;
  std::vector<pipeline::OwnerInputs> owners;
};

Synthetic make_synthetic(std::size_t n, std::size_t w, std::uint64_t seed, bool with_validation) {
  std::mt19937_64 rng(seed);
  Synthetic s;
  auto make_split = [&](std::size_t rows, std::uint64_t id_seed, data::LabeledSet& labels,
                        std::vector<data::FeaturePartition>& parts) {
    const auto ids = data::assign_ids(rows, id_seed);
    auto x1 = random_matrix(rows, w, rng);
    auto x2 = random_matrix(rows, w, rng);
    labels.ids = ids;
    for (std::size_t i = 0; i < rows; ++i) {
      labels.labels.push_back((x1(i, 0) > 0 ? 1u : 0u) + (x2(i, 0) > 0 ? 2u : 0u));
    }
    parts.push_back({ids, std::move(x1), "left"});
    parts.push_back({ids, std::move(x2), "right"});
  };
  std::vector<data::FeaturePartition> train_parts, val_parts;
  make_split(n, seed + 1, s.scientist.train, train_parts);
  if (with_validation) {
    s.scientist.validation.emplace();
    make_split(n / 2 + 1, seed + 2, *s.scientist.validation, val_parts);
  }
  for (std::size_t j = 0; j < 2; ++j) {
    pipeline::OwnerInputs o{train_parts[j], std::nullopt};
    if (with_validation) o.validation = val_parts[j];
    s.owners.push_back(std::move(o));
  }
  return s;
}

TrainingConfig small_config(std::size_t w, std::size_t epochs, std::size_t batch) {
  TrainingConfig c;
  c.epochs = epochs;
  c.batch_size = batch;
  c.owner_lr = 0.05;
  c.scientist_lr = 0.1;
  c.shuffle_seed = 9;
  c.owner_specs = {nn::SegmentSpec::parse(std::to_string(w) + "x4:relu"),
                   nn::SegmentSpec::parse(std::to_string(w) + "x4:relu")};
  c.scientist_spec = nn::SegmentSpec::parse("8x6:relu,6x4:identity");
  c.eval_chunk = 7;
  return c;
}

linkage::LinkOptions toy_link() {
  linkage::LinkOptions l;
  l.group = "toy64";
  l.key_seed = 5;
  return l;
}

TEST(SplitTraining, ZeroEpochsSendsEndTrainingOnly) {
  auto data = make_synthetic(20, 3, 1, false);
  auto cfg = small_config(3, 0, 8);
  auto seeds = pipeline::derive_init_seeds(1, 2);
  auto res = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  EXPECT_TRUE(res.scientist.metrics.empty());
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_TRUE(res.owners[j].segment.same_parameters(
        nn::ModelSegment::init(cfg.owner_specs[j], seeds.owners[j])));
  }
  std::vector<MsgType> to_owner1;
  for (const auto& r : res.log->records()) {
    if (r.to == 1 && r.envelope.type != MsgType::PsiBlind && r.envelope.type != MsgType::GlobalIds) {
      to_owner1.push_back(r.envelope.type);
    }
  }
  EXPECT_EQ(to_owner1, (std::vector<MsgType>{MsgType::ModelSegment, MsgType::EndTraining}));
}

TEST(SplitTraining, BatchAccountingKeepsPartialBatch) {
  auto data = make_synthetic(37, 3, 2, false);
  auto cfg = small_config(3, 2, 16);
  auto res = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(),
                                pipeline::derive_init_seeds(2, 2), 5s);
  ASSERT_EQ(res.scientist.metrics.size(), 2u);
  std::map<std::tuple<int, std::uint32_t, std::uint32_t, MsgType>, int> count;
  std::vector<std::size_t> rows_epoch0;
  for (const auto& r : res.log->records()) {
    const auto t = r.envelope.type;
    if (t != MsgType::Forward && t != MsgType::Grad) continue;
    const auto m = decode_batch_tensor(r.envelope.payload);
    const int owner = t == MsgType::Forward ? r.from : r.to;
    ++count[{owner, m.epoch, m.batch, t}];
    if (t == MsgType::Forward && owner == 1 && m.epoch == 0) rows_epoch0.push_back(m.values.rows());
  }
  // 37 rows in batches of 16: 16, 16, 5.
  EXPECT_EQ(rows_epoch0, (std::vector<std::size_t>{16, 16, 5}));
  EXPECT_EQ(count.size(), 2u * 2u * 3u * 2u);
  for (const auto& [key, n] : count) EXPECT_EQ(n, 1);
}

TEST(SplitTraining, DeterministicAcrossRuns) {
  auto data = make_synthetic(50, 4, 3, true);
  auto cfg = small_config(4, 3, 8);
  auto seeds = pipeline::derive_init_seeds(3, 2);
  auto a = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  auto b = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  EXPECT_EQ(a.scientist.metrics, b.scientist.metrics);
  EXPECT_TRUE(a.scientist.head.same_parameters(b.scientist.head));
  for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(a.owners[j].segment.same_parameters(b.owners[j].segment));
}

TEST(SplitTraining, ShuffleChangesBatchesNotData) {
  auto data = make_synthetic(40, 3, 4, false);
  auto cfg = small_config(3, 1, 8);
  auto seeds = pipeline::derive_init_seeds(4, 2);
  cfg.shuffle = false;
  auto fixed = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  cfg.shuffle = true;
  auto shuffled = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  for (const auto& r : fixed.log->records()) {
    if (r.envelope.type == MsgType::Permutation) {
      const auto p = decode_permutation(r.envelope.payload);
      for (std::uint32_t i = 0; i < p.indices.size(); ++i) EXPECT_EQ(p.indices[i], i);
    }
  }
  EXPECT_FALSE(fixed.scientist.head.same_parameters(shuffled.scientist.head));
}

TEST(SplitTraining, LearnsSyntheticTask) {
  auto data = make_synthetic(400, 3, 5, true);
  auto cfg = small_config(3, 30, 16);
  cfg.owner_lr = 0.1;
  auto res = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(),
                                pipeline::derive_init_seeds(5, 2), 10s);
  ASSERT_EQ(res.scientist.metrics.size(), 30u);
  EXPECT_LT(res.scientist.metrics.back().train_loss, res.scientist.metrics.front().train_loss);
  EXPECT_GT(res.scientist.metrics.back().validation_accuracy, 0.85);
  for (const auto& m : res.scientist.metrics) {
    EXPECT_TRUE(std::isfinite(m.train_loss));
    EXPECT_GE(m.train_accuracy, 0.0);
    EXPECT_LE(m.train_accuracy, 1.0);
  }
}

TEST(SplitTraining, WorksOverTcp) {
  auto data = make_synthetic(30, 3, 6, true);
  auto cfg = small_config(3, 2, 8);
  auto seeds = pipeline::derive_init_seeds(6, 2);
  auto tcp = [] {
    transport::TcpListener listener("127.0.0.1", 0);
    std::unique_ptr<transport::Channel> server;
    std::thread t([&] { server = listener.accept(5s); });
    auto client = transport::tcp_connect("127.0.0.1", listener.port(), 5s);
    t.join();
    return std::make_pair(std::move(client), std::move(server));
  };
  auto over_tcp = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s, {}, tcp);
  auto over_loop = pipeline::simulate(data.scientist, data.owners, cfg, toy_link(), seeds, 5s);
  EXPECT_EQ(over_tcp.scientist.metrics, over_loop.scientist.metrics);
  EXPECT_TRUE(over_tcp.scientist.head.same_parameters(over_loop.scientist.head));
}

TEST(Evaluate, UntrainedModelIsNearChance) {
  // 10 balanced classes, 1200 rows.
  std::mt19937_64 rng(7);
  Synthetic s;
  const auto ids = data::assign_ids(1200, 70);
  s.scientist.train.ids = ids;
  for (std::size_t i = 0; i < ids.size(); ++i) s.scientist.train.labels.push_back(static_cast<nn::Label>(i % 10));
  s.scientist.validation = s.scientist.train;
  for (int j = 0; j < 2; ++j) {
    data::FeaturePartition p{ids, random_matrix(1200, 20, rng, 0, 1), "o"};
    s.owners.push_back({p, p});
  }
  TrainingConfig cfg;
  cfg.epochs = 0;
  cfg.owner_specs = {nn::SegmentSpec::parse("20x8:relu"), nn::SegmentSpec::parse("20x8:relu")};
  cfg.scientist_spec = nn::SegmentSpec::parse("16x10:identity");
  // Run linkage only, then evaluate by hand twice.
  auto [a1, b1] = transport::loopback_pair();
  auto [a2, b2] = transport::loopback_pair();
  transport::Peer p1(*a1, 0, transport::SessionId{1}, 5s), p2(*a2, 0, transport::SessionId{1}, 5s);
  auto owner = [&](transport::Channel& ch, transport::PartyCode code, std::size_t j) {
    return std::async(std::launch::async, [&, code, j] {
      transport::Peer peer(ch, code, std::nullopt, 5s);
      auto seg = nn::ModelSegment::init(cfg.owner_specs[j], 100 + j);
      auto before = seg;
      auto out = run_owner(peer, std::move(seg), s.owners[j].train, &*s.owners[j].validation, 0.1);
      return out.same_parameters(before);
    });
  };
  auto f1 = owner(*b1, 1, 0);
  auto f2 = owner(*b2, 2, 1);
  const auto head = nn::ModelSegment::init(cfg.scientist_spec, 3);
  const double acc = evaluate(cfg, head, *s.scientist.validation, EvalSplit::Validation, {&p1, &p2});
  const double again = evaluate(cfg, head, *s.scientist.validation, EvalSplit::Validation, {&p1, &p2});
  p1.send(MsgType::EndTraining, {});
  p2.send(MsgType::EndTraining, {});
  EXPECT_TRUE(f1.get());
  EXPECT_TRUE(f2.get());
  EXPECT_NEAR(acc, 0.1, 0.05);
  EXPECT_EQ(acc, again);
}

TEST(Evaluate, PerfectHeadScoresOne) {
  // Each owner passes one feature through; the head reads the class off
  // the feature sign.
  const auto ids = data::assign_ids(10, 8);
  data::LabeledSet labels{ids, {}};
  nn::Matrix x1(10, 1), x2(10, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    const bool first = i % 2 == 0;
    labels.labels.push_back(first ? 0 : 1);
    x1(i, 0) = first ? 1.0 : 0.0;
    x2(i, 0) = first ? 0.0 : 1.0;
  }
  TrainingConfig cfg;
  cfg.owner_specs = {nn::SegmentSpec::parse("1x1:identity"), nn::SegmentSpec::parse("1x1:identity")};
  cfg.scientist_spec = nn::SegmentSpec::parse("2x2:identity");
  cfg.eval_chunk = 3;
  auto identity_segment = [](const nn::SegmentSpec& spec) {
    auto seg = nn::ModelSegment::init(spec, 0);
    auto& w = seg.layers()[0].weights;
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = r == c ? 1.0 : 0.0;
    return seg;
  };
  data::FeaturePartition p1{ids, x1, "l"}, p2{ids, x2, "r"};
  auto [a1, b1] = transport::loopback_pair();
  auto [a2, b2] = transport::loopback_pair();
  auto serve = [&](transport::Channel& ch, transport::PartyCode code, const data::FeaturePartition& p) {
    return std::async(std::launch::async, [&, code] {
      transport::Peer peer(ch, code, std::nullopt, 5s);
      run_owner(peer, identity_segment(nn::SegmentSpec::parse("1x1:identity")), p, &p, 0.0);
    });
  };
  auto f1 = serve(*b1, 1, p1);
  auto f2 = serve(*b2, 2, p2);
  transport::Peer s1(*a1, 0, transport::SessionId{2}, 5s), s2(*a2, 0, transport::SessionId{2}, 5s);
  EXPECT_EQ(evaluate(cfg, identity_segment(cfg.scientist_spec), labels, EvalSplit::Validation,
                     {&s1, &s2}),
            1.0);
  s1.send(MsgType::EndTraining, {});
  s2.send(MsgType::EndTraining, {});
  f1.get();
  f2.get();
}

// Hand-driven scientist for owner-side error contracts.
struct OwnerHarness {
  std::unique_ptr<transport::Channel> sci_end, owner_end;
  std::unique_ptr<transport::Peer> scientist;
  data::FeaturePartition part;
  nn::ModelSegment initial;
  std::future<nn::ModelSegment> owner;

  OwnerHarness() {
    auto [a, b] = transport::loopback_pair();
    sci_end = std::move(a);
    owner_end = std::move(b);
    scientist = std::make_unique<transport::Peer>(*sci_end, 0, transport::SessionId{3}, 5s);
    std::mt19937_64 rng(11);
    part = data::FeaturePartition{data::assign_ids(6, 1), random_matrix(6, 3, rng), "o"};
    initial = nn::ModelSegment::init(nn::SegmentSpec::parse("3x2:relu"), 4);
    owner = std::async(std::launch::async, [this] {
      transport::Peer peer(*owner_end, 1, std::nullopt, 5s);
      return run_owner(peer, initial, part, nullptr, 0.5);
    });
  }
  void start_batch() {
    scientist->send(MsgType::Permutation, encode(PermutationMsg{0, {5, 4, 3, 2, 1, 0}}));
    scientist->send(MsgType::BatchRequest, encode(BatchRequestMsg{0, 0, 0, 4}));
  }
};

TEST(RunOwner, EndBeforeAnyBatchReturnsInitialSegment) {
  OwnerHarness h;
  h.scientist->send(MsgType::EndTraining, {});
  EXPECT_TRUE(h.owner.get().same_parameters(h.initial));
}

TEST(RunOwner, ZeroGradientLeavesParameters) {
  OwnerHarness h;
  h.start_batch();
  const auto fwd = decode_batch_tensor(h.scientist->expect(MsgType::Forward).payload);
  EXPECT_EQ(fwd.values.rows(), 4u);
  EXPECT_EQ(fwd.owner, 1);
  h.scientist->send(MsgType::Grad, encode(BatchTensorMsg{1, 0, 0, nn::Matrix(4, 2)}));
  h.scientist->send(MsgType::EndTraining, {});
  EXPECT_TRUE(h.owner.get().same_parameters(h.initial));
}

TEST(RunOwner, ForwardRowsFollowPermutation) {
  OwnerHarness h;
  h.start_batch();
  const auto fwd = decode_batch_tensor(h.scientist->expect(MsgType::Forward).payload);
  const auto want = h.initial.infer(h.part.features.gather_rows(std::vector<std::size_t>{5, 4, 3, 2}));
  EXPECT_EQ(fwd.values, want);
  h.scientist->send(MsgType::EndTraining, {});
  EXPECT_THROW(h.owner.get(), ProtocolError);  // GRAD was due
}

TEST(RunOwner, GradForUnknownBatchIsProtocolError) {
  OwnerHarness h;
  h.start_batch();
  h.scientist->expect(MsgType::Forward);
  h.scientist->send(MsgType::Grad, encode(BatchTensorMsg{1, 0, 9, nn::Matrix(4, 2)}));
  EXPECT_THROW(h.owner.get(), ProtocolError);
  EXPECT_THROW(h.scientist->expect(MsgType::Forward), ProtocolError);  // ABORT came back
}

TEST(RunOwner, BatchBeforePermutationIsProtocolError) {
  OwnerHarness h;
  h.scientist->send(MsgType::BatchRequest, encode(BatchRequestMsg{0, 0, 0, 4}));
  EXPECT_THROW(h.owner.get(), ProtocolError);
}

TEST(RunScientist, WrongBatchFromOwnerAborts) {
  auto [a, b] = transport::loopback_pair();
  transport::Peer sci(*a, 0, transport::SessionId{4}, 5s);
  transport::Peer own(*b, 1, std::nullopt, 5s);
  TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.owner_specs = {nn::SegmentSpec::parse("2x2:relu")};
  cfg.scientist_spec = nn::SegmentSpec::parse("2x3:identity");
  auto head = nn::ModelSegment::init(cfg.scientist_spec, 1);
  data::LabeledSet labels{data::assign_ids(4, 1), {0, 1, 2, 0}};
  auto driver = std::async(std::launch::async, [&] {
    return run_scientist(cfg, head, {nn::ModelSegment::init(cfg.owner_specs[0], 2)}, labels,
                         nullptr, {&sci});
  });
  receive_setup(own);
  own.expect(MsgType::Permutation);
  own.expect(MsgType::BatchRequest);
  own.send(MsgType::Forward, encode(BatchTensorMsg{1, 0, 1, nn::Matrix(2, 2)}));  // batch 1, not 0
  EXPECT_THROW(driver.get(), ProtocolError);
  EXPECT_THROW(own.expect(MsgType::Grad), ProtocolError);
}

TEST(RunScientist, DuplicateForwardAborts) {
  auto [a, b] = transport::loopback_pair();
  transport::Peer sci(*a, 0, transport::SessionId{4}, 5s);
  transport::Peer own(*b, 1, std::nullopt, 5s);
  TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.owner_specs = {nn::SegmentSpec::parse("2x2:relu")};
  cfg.scientist_spec = nn::SegmentSpec::parse("2x3:identity");
  auto head = nn::ModelSegment::init(cfg.scientist_spec, 1);
  data::LabeledSet labels{data::assign_ids(4, 1), {0, 1, 2, 0}};
  auto driver = std::async(std::launch::async, [&] {
    return run_scientist(cfg, head, {nn::ModelSegment::init(cfg.owner_specs[0], 2)}, labels,
                         nullptr, {&sci});
  });
  receive_setup(own);
  own.expect(MsgType::Permutation);
  own.expect(MsgType::BatchRequest);
  own.send(MsgType::Forward, encode(BatchTensorMsg{1, 0, 0, nn::Matrix(2, 2)}));
  own.expect(MsgType::Grad);
  own.expect(MsgType::BatchRequest);
  own.send(MsgType::Forward, encode(BatchTensorMsg{1, 0, 0, nn::Matrix(2, 2)}));  // batch 0 again
  EXPECT_THROW(driver.get(), ProtocolError);
}

TEST(MetricsCsv, HeaderAndRows) {
  EXPECT_EQ(metrics_csv_header(), "epoch,train_loss,train_acc,val_acc");
  EXPECT_EQ(metrics_csv_row({3, 0.5, 0.25, 0.75}), "3,0.5,0.25,0.75");
}

}  // namespace
}  // namespace svfl::training
