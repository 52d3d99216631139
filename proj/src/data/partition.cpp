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

#include "svfl/data/partition.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "svfl/common/bytes.hpp"
#include "svfl/common/error.hpp"

namespace svfl::data {

namespace {

constexpr std::size_t kImageSide = 28;
constexpr char kPartitionMagic[] = "PYVT";
constexpr char kLabelMagic[] = "PYVL";

std::uint32_t crc32_of(ByteSpan bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - off, 1U << 30);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(chunk));
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_id(ByteWriter& out, const DatasetId& id) { out.raw(ByteSpan(id.raw())); }

DatasetId read_id(ByteReader& in) {
  DatasetId::Raw raw{};
  auto b = in.raw(raw.size());
  std::copy(b.begin(), b.end(), raw.begin());
  return DatasetId(raw);
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw FormatError("short write to " + path.string());
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

template <typename Rows>
std::vector<std::size_t> index_rows(const std::vector<DatasetId>& ids,
                                    const std::vector<DatasetId>& ordered_ids, const Rows& what) {
  std::unordered_map<DatasetId, std::size_t, DatasetIdHash> pos;
  pos.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) pos.emplace(ids[i], i);
  std::vector<std::size_t> rows;
  rows.reserve(ordered_ids.size());
  for (const auto& id : ordered_ids) {
    auto it = pos.find(id);
    if (it == pos.end()) {
      throw LinkageError(std::string(what) + ": id " + id.to_string() + " is not held locally");
    }
    rows.push_back(it->second);
  }
  return rows;
}

std::size_t keep_count(std::size_t n, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw InputError("keep_fraction must lie in (0, 1]");
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * keep_fraction));
}

}  // namespace

void FeaturePartition::validate() const {
  if (features.rows() != ids.size()) {
    throw InputError("partition has " + std::to_string(ids.size()) + " ids but " +
                     std::to_string(features.rows()) + " feature rows");
  }
  std::unordered_set<DatasetId, DatasetIdHash> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) throw InputError("partition ids are not unique");
  if (!features.all_finite()) throw InputError("partition contains non-finite features");
}

void LabeledSet::validate(nn::Label num_classes) const {
  if (labels.size() != ids.size()) throw InputError("label set: ids and labels differ in length");
  for (auto y : labels) {
    if (y >= num_classes) throw InputError("label set: label out of range");
  }
  std::unordered_set<DatasetId, DatasetIdHash> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) throw InputError("label set: ids are not unique");
}

std::pair<FeaturePartition, FeaturePartition> vertical_split(const nn::Matrix& images,
                                                             const std::vector<DatasetId>& ids,
                                                             std::size_t cut) {
  if (images.cols() != kImageSide * kImageSide) {
    throw DimensionError("vertical_split expects 784-wide rows, got " +
                         std::to_string(images.cols()));
  }
  if (cut == 0 || cut >= kImageSide) throw InputError("cut column must lie in (0, 28)");
  if (ids.size() != images.rows()) throw DimensionError("vertical_split: id count != row count");

  const std::size_t n = images.rows();
  FeaturePartition left{ids, nn::Matrix(n, kImageSide * cut), "left"};
  FeaturePartition right{ids, nn::Matrix(n, kImageSide * (kImageSide - cut)), "right"};
  for (std::size_t i = 0; i < n; ++i) {
    auto src = images.row(i);
    auto l = left.features.row(i);
    auto r = right.features.row(i);
    for (std::size_t y = 0; y < kImageSide; ++y) {
      const auto* px = src.data() + y * kImageSide;
      std::copy(px, px + cut, l.data() + y * cut);
      std::copy(px + cut, px + kImageSide, r.data() + y * (kImageSide - cut));
    }
  }
  return {std::move(left), std::move(right)};
}

nn::Matrix reassemble(const FeaturePartition& left, const FeaturePartition& right) {
  if (left.rows() != right.rows() || left.ids != right.ids) {
    throw LinkageError("reassemble: partitions are not aligned");
  }
  if (left.width() + right.width() != kImageSide * kImageSide || left.width() % kImageSide != 0) {
    throw DimensionError("reassemble: widths do not form 28x28 images");
  }
  const std::size_t cut = left.width() / kImageSide;
  nn::Matrix out(left.rows(), kImageSide * kImageSide);
  for (std::size_t i = 0; i < left.rows(); ++i) {
    auto dst = out.row(i);
    auto l = left.features.row(i);
    auto r = right.features.row(i);
    for (std::size_t y = 0; y < kImageSide; ++y) {
      std::copy(l.data() + y * cut, l.data() + (y + 1) * cut, dst.data() + y * kImageSide);
      std::copy(r.data() + y * (kImageSide - cut), r.data() + (y + 1) * (kImageSide - cut),
                dst.data() + y * kImageSide + cut);
    }
  }
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // Unbiased draw in [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(perm[i - 1], perm[r % bound]);
  }
  return perm;
}

FeaturePartition scramble(const FeaturePartition& partition, double keep_fraction,
                          std::uint64_t seed) {
  const std::size_t keep = keep_count(partition.rows(), keep_fraction);
  auto perm = seeded_permutation(partition.rows(), seed);
  perm.resize(keep);
  FeaturePartition out;
  out.owner_label = partition.owner_label;
  out.features = partition.features.gather_rows(perm);
  out.ids.reserve(keep);
  for (auto r : perm) out.ids.push_back(partition.ids[r]);
  return out;
}

LabeledSet scramble(const LabeledSet& labels, double keep_fraction, std::uint64_t seed) {
  const std::size_t keep = keep_count(labels.size(), keep_fraction);
  auto perm = seeded_permutation(labels.size(), seed);
  perm.resize(keep);
  LabeledSet out;
  for (auto r : perm) {
    out.ids.push_back(labels.ids[r]);
    out.labels.push_back(labels.labels[r]);
  }
  return out;
}

FeaturePartition align_to(const FeaturePartition& partition,
                          const std::vector<DatasetId>& ordered_ids) {
  auto rows = index_rows(partition.ids, ordered_ids, "align_to");
  FeaturePartition out;
  out.owner_label = partition.owner_label;
  out.ids = ordered_ids;
  out.features = partition.features.gather_rows(rows);
  return out;
}

LabeledSet align_to(const LabeledSet& labels, const std::vector<DatasetId>& ordered_ids) {
  auto rows = index_rows(labels.ids, ordered_ids, "align_to");
  LabeledSet out;
  out.ids = ordered_ids;
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels.labels[r]);
  return out;
}

std::size_t partition_file_size(std::size_t label_bytes, std::size_t n, std::size_t width) {
  return 4 + 2 + 4 + label_bytes + 8 + 4 + n * (16 + width * 8) + 4;
}

Bytes encode_partition(const FeaturePartition& partition) {
  if (partition.features.rows() != partition.ids.size()) {
    throw InputError("encode_partition: id count != row count");
  }
  ByteWriter out(partition_file_size(partition.owner_label.size(), partition.rows(),
                                     partition.width()));
  out.raw(std::string_view(kPartitionMagic, 4));
  out.u8(static_cast<std::uint8_t>(kPartitionVersion & 0xFF));
  out.u8(static_cast<std::uint8_t>(kPartitionVersion >> 8));
  out.u32_le(static_cast<std::uint32_t>(partition.owner_label.size()));
  out.raw(partition.owner_label);
  out.u64_le(partition.rows());
  out.u32_le(static_cast<std::uint32_t>(partition.width()));
  for (std::size_t i = 0; i < partition.rows(); ++i) {
    write_id(out, partition.ids[i]);
    for (double v : partition.features.row(i)) out.f64_le(v);
  }
  const std::uint32_t crc = crc32_of(out.bytes());
  out.u32_le(crc);
  return std::move(out).take();
}

FeaturePartition decode_partition(ByteSpan bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kPartitionMagic)) {
    throw FormatError("not a PYVT partition (bad magic)");
  }
  if (bytes.size() < 4 + 2 + 4 + 8 + 4 + 4) throw FormatError("PYVT file truncated");
  ByteReader crc_in(bytes.subspan(bytes.size() - 4));
  if (crc_in.u32_le() != crc32_of(bytes.first(bytes.size() - 4))) {
    throw FormatError("PYVT checksum mismatch");
  }
  ByteReader in(bytes.first(bytes.size() - 4));
  in.raw(4);
  const std::uint16_t version = static_cast<std::uint16_t>(in.u8() | (in.u8() << 8));
  if (version != kPartitionVersion) {
    throw FormatError("unsupported PYVT version " + std::to_string(version));
  }
  FeaturePartition p;
  const std::uint32_t label_len = in.u32_le();
  p.owner_label = in.str(label_len);
  const std::uint64_t n = in.u64_le();
  const std::uint32_t w = in.u32_le();
  const std::uint64_t record = 16 + std::uint64_t{w} * 8;
  if (n > in.remaining() / record || n * record != in.remaining()) {
    throw FormatError("PYVT record section has the wrong length");
  }
  p.ids.reserve(n);
  p.features = nn::Matrix(n, w);
  for (std::uint64_t i = 0; i < n; ++i) {
    p.ids.push_back(read_id(in));
    for (double& v : p.features.row(i)) v = in.f64_le();
  }
  return p;
}

Bytes encode_labels(const LabeledSet& labels) {
  if (labels.ids.size() != labels.labels.size()) throw InputError("encode_labels: length mismatch");
  ByteWriter out(12 + labels.size() * 17);
  out.raw(std::string_view(kLabelMagic, 4));
  out.u64_le(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] > 255) throw InputError("encode_labels: label does not fit in a byte");
    write_id(out, labels.ids[i]);
    out.u8(static_cast<std::uint8_t>(labels.labels[i]));
  }
  return std::move(out).take();
}

LabeledSet decode_labels(ByteSpan bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kLabelMagic)) {
    throw FormatError("not a PYVL label file (bad magic)");
  }
  ByteReader in(bytes);
  in.raw(4);
  const std::uint64_t n = in.u64_le();
  if (n > in.remaining() / 17 || n * 17 != in.remaining()) {
    throw FormatError("PYVL record section has the wrong length");
  }
  LabeledSet out;
  out.ids.reserve(n);
  out.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.ids.push_back(read_id(in));
    out.labels.push_back(in.u8());
  }
  return out;
}

void write_partition(const FeaturePartition& partition, const std::filesystem::path& path) {
  write_file(path, encode_partition(partition));
}

FeaturePartition read_partition(const std::filesystem::path& path) {
  return decode_partition(read_file(path));
}

void write_labels(const LabeledSet& labels, const std::filesystem::path& path) {
  write_file(path, encode_labels(labels));
}

LabeledSet read_labels(const std::filesystem::path& path) { return decode_labels(read_file(path)); }

}  // namespace svfl::data
