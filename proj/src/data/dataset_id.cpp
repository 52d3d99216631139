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

#include "svfl/data/dataset_id.hpp"

#include <random>
#include <unordered_set>

#include "svfl/common/error.hpp"

namespace svfl::data {

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool dash_at(std::size_t pos) { return pos == 8 || pos == 13 || pos == 18 || pos == 23; }

}  // namespace

std::string DatasetId::to_string() const {
  std::string out;
  out.reserve(36);
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
    out.push_back(kHex[raw_[i] >> 4]);
    out.push_back(kHex[raw_[i] & 0xF]);
  }
  return out;
}

DatasetId DatasetId::parse(std::string_view text) {
  if (text.size() != 36) throw InputError("dataset id must be 36 characters");
  Raw raw{};
  std::size_t byte = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    if (dash_at(pos)) {
      if (text[pos] != '-') throw InputError("dataset id: expected '-' at " + std::to_string(pos));
      ++pos;
      continue;
    }
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) throw InputError("dataset id: bad hex digit");
    raw[byte++] = static_cast<std::uint8_t>((hi << 4) | lo);
    pos += 2;
  }
  return DatasetId(raw);
}

std::size_t DatasetIdHash::operator()(const DatasetId& id) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto b : id.raw()) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::vector<DatasetId> assign_ids(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DatasetId> ids;
  ids.reserve(n);
  std::unordered_set<DatasetId, DatasetIdHash> seen;
  seen.reserve(n);
  while (ids.size() < n) {
    DatasetId::Raw raw{};
    const std::uint64_t a = rng();
    const std::uint64_t b = rng();
    for (int i = 0; i < 8; ++i) {
      raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a >> (56 - 8 * i));
      raw[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(b >> (56 - 8 * i));
    }
    raw[6] = static_cast<std::uint8_t>((raw[6] & 0x0F) | 0x40);  // version 4
    raw[8] = static_cast<std::uint8_t>((raw[8] & 0x3F) | 0x80);  // RFC 4122 variant
    DatasetId id(raw);
    if (seen.insert(id).second) ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> to_strings(const std::vector<DatasetId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(id.to_string());
  return out;
}

}  // namespace svfl::data
