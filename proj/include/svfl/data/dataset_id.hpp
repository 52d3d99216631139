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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace svfl::data {

// 16-byte UUID naming one data subject. Byte-wise ordering coincides with
// the ordering of the canonical lowercase-hex strings.
class DatasetId {
 public:
  using Raw = std::array<std::uint8_t, 16>;

  DatasetId() = default;
  explicit DatasetId(const Raw& raw) : raw_(raw) {}

  // "xxxxxxxx-xxxx-xxxx-xxxx-xxxxxxxxxxxx", lowercase.
  std::string to_string() const;
  // Accepts the canonical form in either case; throws InputError otherwise.
  static DatasetId parse(std::string_view text);

  const Raw& raw() const { return raw_; }

  friend auto operator<=>(const DatasetId&, const DatasetId&) = default;

 private:
  Raw raw_{};
};

struct DatasetIdHash {
  std::size_t operator()(const DatasetId& id) const noexcept;
};

// n distinct version-4-layout UUIDs drawn from a seeded mt19937_64.
// Position i names original sample i.
std::vector<DatasetId> assign_ids(std::size_t n, std::uint64_t seed);

std::vector<std::string> to_strings(const std::vector<DatasetId>& ids);

}  // namespace svfl::data
