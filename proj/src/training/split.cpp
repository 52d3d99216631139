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


#include "svfl/training/split.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "svfl/common/error.hpp"
#include "svfl/nn/loss.hpp"
#include "svfl/training/concat.hpp"

namespace svfl::training {

namespace {

using transport::MsgType;
using transport::Peer;

void broadcast(const std::vector<Peer*>& owners, MsgType type, const Bytes& payload) {
  for (auto* o : owners) o->send(type, payload);
}

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void check_sender(const transport::Envelope& env, std::uint8_t claimed, std::size_t j) {
  if (env.sender != j + 1 || claimed != env.sender) {
    throw ProtocolError("message on owner " + std::to_string(j + 1) + "'s channel claims owner " +
                        std::to_string(claimed));
  }
}

void check_shape(const nn::Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ProtocolError(std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
}

// One batch of the lock-step protocol; returns the batch loss and adds the
// pre-step hits to `correct`.
double scientist_step(const TrainingConfig& config, nn::ModelSegment& head,
                      const std::vector<Peer*>& owners, const std::vector<std::size_t>& order,
                      const std::vector<std::size_t>& widths, const data::LabeledSet& train,
                      const std::vector<std::uint32_t>& perm, std::uint32_t epoch,
                      std::uint32_t batch, std::size_t begin, std::size_t end,
                      std::size_t& correct) {
  const std::size_t rows = end - begin;
  broadcast(owners, MsgType::BatchRequest,
            encode(BatchRequestMsg{epoch, batch, static_cast<std::uint32_t>(begin),
                                   static_cast<std::uint32_t>(end)}));

  std::vector<nn::Matrix> parts(owners.size());
  for (std::size_t j = 0; j < owners.size(); ++j) {
    const auto env = owners[j]->expect(MsgType::Forward);
    auto msg = decode_batch_tensor(env.payload);
    check_sender(env, msg.owner, j);
    if (msg.epoch != epoch || msg.batch != batch) {
      throw ProtocolError("FORWARD for epoch " + std::to_string(msg.epoch) + " batch " +
                          std::to_string(msg.batch) + " while waiting for epoch " +
                          std::to_string(epoch) + " batch " + std::to_string(batch));
    }
    check_shape(msg.values, rows, widths[j], "FORWARD activations");
    parts[j] = std::move(msg.values);
  }

  std::vector<nn::Label> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = train.labels[perm[begin + i]];

  const nn::Matrix logits = head.forward(concat_activations(parts, order));
  const auto result = nn::softmax_cross_entropy(logits, labels);
  correct += nn::count_correct(logits, labels);
  const nn::Matrix grad_in = head.backward(result.grad_logits, true);
  head.sgd_step(config.scientist_lr);

  auto slices = slice_gradient(grad_in, widths, order);
  for (std::size_t j = 0; j < owners.size(); ++j) {
    owners[j]->send(MsgType::Grad,
                    encode(BatchTensorMsg{static_cast<std::uint8_t>(j + 1), epoch, batch,
                                          std::move(slices[j])}));
  }
  return result.loss;
}

}  // namespace

std::vector<std::size_t> TrainingConfig::resolved_order() const {
  return owner_order.empty() ? ascending_order(owner_specs.size()) : owner_order;
}

std::vector<std::size_t> TrainingConfig::owner_widths() const {
  std::vector<std::size_t> w;
  for (const auto& s : owner_specs) w.push_back(s.output_width());
  return w;
}

void TrainingConfig::validate(std::size_t owner_count) const {
  if (batch_size == 0) throw SpecError("batch_size must be at least 1");
  if (eval_chunk == 0) throw SpecError("eval_chunk must be at least 1");
  if (owner_count == 0) throw SpecError("training needs at least one owner");
  if (owner_specs.size() != owner_count) {
    throw SpecError(std::to_string(owner_specs.size()) + " owner specs for " +
                    std::to_string(owner_count) + " owners");
  }
  for (const auto& s : owner_specs) s.validate();
  scientist_spec.validate();
  const auto order = resolved_order();
  std::vector<bool> seen(owner_count, false);
  if (order.size() != owner_count) throw SpecError("owner_order must list every owner once");
  for (auto j : order) {
    if (j >= owner_count || seen[j]) throw SpecError("owner_order is not a permutation");
    seen[j] = true;
  }
  const auto widths = owner_widths();
  const std::size_t sum = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
  if (sum != scientist_spec.input_width()) {
    throw SpecError("owner outputs sum to " + std::to_string(sum) + " but the scientist head takes " +
                    std::to_string(scientist_spec.input_width()));
  }
  if (!(std::isfinite(owner_lr) && std::isfinite(scientist_lr))) {
    throw SpecError("learning rates must be finite");
  }
}

std::vector<EpochMetrics> run_scientist(const TrainingConfig& config, nn::ModelSegment& head,
                                        const std::vector<nn::ModelSegment>& owner_segments,
                                        const data::LabeledSet& train,
                                        const data::LabeledSet* validation,
                                        const std::vector<Peer*>& owners,
                                        const ScientistHooks& hooks) {
  config.validate(owners.size());
  if (!(head.spec() == config.scientist_spec)) {
    throw SpecError("scientist segment does not match scientist_spec");
  }
  if (owner_segments.size() != owners.size()) throw SpecError("one owner segment per owner needed");
  for (std::size_t j = 0; j < owners.size(); ++j) {
    if (!(owner_segments[j].spec() == config.owner_specs[j])) {
      throw SpecError("owner segment " + std::to_string(j + 1) + " does not match its spec");
    }
  }
  if (train.size() == 0) throw InputError("no training rows");
  train.validate(static_cast<nn::Label>(head.output_width()));
  if (validation != nullptr) validation->validate(static_cast<nn::Label>(head.output_width()));

  const std::size_t n = train.size();
  narrow(n, "training row count");
  const auto order = config.resolved_order();
  const auto widths = config.owner_widths();
  std::vector<EpochMetrics> history;

  try {
    for (std::size_t j = 0; j < owners.size(); ++j) {
      owners[j]->send(MsgType::ModelSegment, encode(SetupMsg{config.owner_lr, owner_segments[j]}));
    }
    for (std::size_t e = 0; e < config.epochs; ++e) {
      const auto epoch = narrow(e, "epoch");
      std::vector<std::uint32_t> perm(n);
      if (config.shuffle) {
        const auto p = data::seeded_permutation(n, config.shuffle_seed + e);
        for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(p[i]);
      } else {
        std::iota(perm.begin(), perm.end(), 0U);
      }
      broadcast(owners, MsgType::Permutation, encode(PermutationMsg{epoch, perm}));

      double loss_sum = 0;
      std::size_t correct = 0;
      std::uint32_t batch = 0;
      for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batch) {
        const std::size_t end = std::min(n, begin + config.batch_size);
        const double loss = scientist_step(config, head, owners, order, widths, train, perm, epoch,
                                           batch, begin, end, correct);
        loss_sum += loss * static_cast<double>(end - begin);
        if (hooks.on_step) hooks.on_step(StepInfo{e, batch, end - begin, loss}, head);
      }

      EpochMetrics m;
      m.epoch = e + 1;
      m.train_loss = loss_sum / static_cast<double>(n);
      m.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
      m.validation_accuracy = validation != nullptr
                                  ? evaluate(config, head, *validation, EvalSplit::Validation, owners)
                                  : std::numeric_limits<double>::quiet_NaN();
      const std::string row = metrics_csv_row(m);
      broadcast(owners, MsgType::Metrics, Bytes(row.begin(), row.end()));
      history.push_back(m);
      if (hooks.on_epoch) hooks.on_epoch(m);
    }
    broadcast(owners, MsgType::EndTraining, {});
  } catch (const Error& e) {
    for (auto* o : owners) o->notify(MsgType::Abort, e.what());
    throw;
  }
  return history;
}

double evaluate(const TrainingConfig& config, const nn::ModelSegment& head,
                const data::LabeledSet& labels, EvalSplit split, const std::vector<Peer*>& owners) {
  if (labels.size() == 0) throw InputError("nothing to evaluate");
  const auto order = config.resolved_order();
  const auto widths = config.owner_widths();
  const std::size_t n = labels.size();
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < n; begin += config.eval_chunk) {
    const std::size_t end = std::min(n, begin + config.eval_chunk);
    const EvalRequestMsg req{split, narrow(begin, "row"), narrow(end, "row")};
    broadcast(owners, MsgType::EvalRequest, encode(req));
    std::vector<nn::Matrix> parts(owners.size());
    for (std::size_t j = 0; j < owners.size(); ++j) {
      const auto env = owners[j]->expect(MsgType::EvalForward);
      auto msg = decode_eval_forward(env.payload);
      check_sender(env, msg.owner, j);
      if (!(msg.request == req)) throw ProtocolError("EVAL_FORWARD answers a different request");
      check_shape(msg.values, end - begin, widths[j], "EVAL_FORWARD activations");
      parts[j] = std::move(msg.values);
    }
    const nn::Matrix logits = head.infer(concat_activations(parts, order));
    correct += nn::count_correct(
        logits, std::span<const nn::Label>(labels.labels).subspan(begin, end - begin));
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

SetupMsg receive_setup(Peer& scientist) {
  try {
    return decode_setup(scientist.expect(MsgType::ModelSegment).payload);
  } catch (const FormatError& e) {
    scientist.notify(MsgType::Abort, e.what());
    throw ProtocolError(std::string("bad MODEL_SEGMENT: ") + e.what());
  }
}

nn::ModelSegment run_owner(Peer& scientist, nn::ModelSegment segment,
                           const data::FeaturePartition& train,
                           const data::FeaturePartition* validation, double owner_lr) {
  try {
    if (segment.input_width() != train.width() ||
        (validation != nullptr && validation->width() != train.width())) {
      throw SpecError("owner segment takes " + std::to_string(segment.input_width()) +
                      " features but the partition has " + std::to_string(train.width()));
    }
    std::optional<PermutationMsg> perm;
    for (;;) {
      const auto env = scientist.expect_one_of({MsgType::Permutation, MsgType::BatchRequest,
                                                MsgType::EvalRequest, MsgType::Metrics,
                                                MsgType::EndTraining});
      switch (env.type) {
        case MsgType::Permutation: {
          auto msg = decode_permutation(env.payload);
          if (msg.indices.size() != train.rows()) {
            throw ProtocolError("PERMUTATION covers " + std::to_string(msg.indices.size()) +
                                " rows, partition holds " + std::to_string(train.rows()));
          }
          std::vector<bool> seen(train.rows(), false);
          for (auto i : msg.indices) {
            if (i >= train.rows() || seen[i]) throw ProtocolError("PERMUTATION is not a permutation");
            seen[i] = true;
          }
          perm = std::move(msg);
          break;
        }
        case MsgType::BatchRequest: {
          const auto req = decode_batch_request(env.payload);
          if (!perm || req.epoch != perm->epoch) throw ProtocolError("BATCH_REQUEST for unknown epoch");
          if (req.end > perm->indices.size()) throw ProtocolError("BATCH_REQUEST past the end");
          std::vector<std::size_t> rows(perm->indices.begin() + req.begin,
                                        perm->indices.begin() + req.end);
          nn::Matrix act = segment.forward(train.features.gather_rows(rows));
          const std::size_t out_cols = act.cols();
          scientist.send(MsgType::Forward,
                         encode(BatchTensorMsg{scientist.self(), req.epoch, req.batch, std::move(act)}));
          const auto grad = decode_batch_tensor(scientist.expect(MsgType::Grad).payload);
          if (grad.epoch != req.epoch || grad.batch != req.batch) {
            throw ProtocolError("GRAD for unknown batch " + std::to_string(grad.batch));
          }
          check_shape(grad.values, rows.size(), out_cols, "GRAD");
          segment.backward(grad.values, false);
          segment.sgd_step(owner_lr);
          break;
        }
        case MsgType::EvalRequest: {
          const auto req = decode_eval_request(env.payload);
          const data::FeaturePartition* part = req.split == EvalSplit::Train ? &train : validation;
          if (part == nullptr) throw ProtocolError("EVAL_REQUEST for a split this owner does not hold");
          if (req.end > part->rows() || req.begin >= req.end) {
            throw ProtocolError("EVAL_REQUEST range outside the partition");
          }
          scientist.send(MsgType::EvalForward,
                         encode(EvalForwardMsg{scientist.self(), req,
                                               segment.infer(part->features.row_range(req.begin, req.end))}));
          break;
        }
        case MsgType::Metrics:
          break;
        case MsgType::EndTraining:
          return segment;
        default:
          throw ProtocolError("unexpected message");
      }
    }
  } catch (const Error& e) {
    scientist.notify(MsgType::Abort, e.what());
    throw;
  }
}

std::string metrics_csv_header() { return "epoch,train_loss,train_acc,val_acc"; }

std::string metrics_csv_row(const EpochMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g", m.epoch, m.train_loss,
                m.train_accuracy, m.validation_accuracy);
  return buf;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write metrics to " + path.string());
  out << metrics_csv_header() << '\n';
  for (const auto& m : metrics) out << metrics_csv_row(m) << '\n';
  if (!out) throw InputError("short write to " + path.string());
}

}  // namespace svfl::training
