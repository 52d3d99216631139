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
#include <string>
#include <utility>
#include <vector>

#include "svfl/common/bytes.hpp"
#include "svfl/data/dataset_id.hpp"
#include "svfl/nn/loss.hpp"
#include "svfl/nn/matrix.hpp"

namespace svfl::data {

// Rows held by one data owner: one feature vector per id.
struct FeaturePartition {
  std::vector<DatasetId> ids;
  nn::Matrix features;  // ids.size() x width
  std::string owner_label;

  std::size_t rows() const { return ids.size(); }
  std::size_t width() const { return features.cols(); }

  // Throws InputError on length mismatch, duplicate ids or non-finite rows.
  void validate() const;

  friend bool operator==(const FeaturePartition&, const FeaturePartition&) = default;
};

// Ground-truth labels kept by the data scientist.
struct LabeledSet {
  std::vector<DatasetId> ids;
  std::vector<nn::Label> labels;

  std::size_t size() const { return ids.size(); }
  void validate(nn::Label num_classes = 10) const;

  friend bool operator==(const LabeledSet&, const LabeledSet&) = default;
};

// Splits n x 784 images (28x28, row-major) at column `cut`: the left
// partition gets image columns [0, cut), the right one [cut, 28), each
// flattened row by row. Both carry `ids`.
std::pair<FeaturePartition, FeaturePartition> vertical_split(const nn::Matrix& images,
                                                             const std::vector<DatasetId>& ids,
                                                             std::size_t cut = 14);

// Column-wise inverse of vertical_split.
nn::Matrix reassemble(const FeaturePartition& left, const FeaturePartition& right);

// Keeps round(n * keep_fraction) rows chosen by a seeded shuffle, in shuffled
// order. Ids stay attached to their rows.
FeaturePartition scramble(const FeaturePartition& partition, double keep_fraction,
                          std::uint64_t seed);
LabeledSet scramble(const LabeledSet& labels, double keep_fraction, std::uint64_t seed);

// Reorders rows to exactly `ordered_ids`, dropping all others. Throws
// LinkageError if an id is not held.
FeaturePartition align_to(const FeaturePartition& partition,
                          const std::vector<DatasetId>& ordered_ids);
LabeledSet align_to(const LabeledSet& labels, const std::vector<DatasetId>& ordered_ids);

// Seeded Fisher-Yates permutation of [0, n). Portable: does not go through
// std::shuffle or the standard distributions.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// PYVT partition file (all integers little-endian):
//   "PYVT" | version u16 | label length u32 | label UTF-8 | n u64 | w u32 |
//   n x (16-byte id | w x f64) | CRC32 u32 over everything before it
inline constexpr std::uint16_t kPartitionVersion = 1;
std::size_t partition_file_size(std::size_t label_bytes, std::size_t n, std::size_t width);
void write_partition(const FeaturePartition& partition, const std::filesystem::path& path);
FeaturePartition read_partition(const std::filesystem::path& path);

// PYVL label file: "PYVL" | n u64 LE | n x (16-byte id | u8 label)
void write_labels(const LabeledSet& labels, const std::filesystem::path& path);
LabeledSet read_labels(const std::filesystem::path& path);

// In-memory forms of the two file formats.
Bytes encode_partition(const FeaturePartition& partition);
FeaturePartition decode_partition(ByteSpan bytes);
Bytes encode_labels(const LabeledSet& labels);
LabeledSet decode_labels(ByteSpan bytes);

}  // namespace svfl::data
