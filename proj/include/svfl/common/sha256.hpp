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
#include <cstdint>
#include <initializer_list>

#include "svfl/common/bytes.hpp"

namespace svfl {

using Digest256 = std::array<std::uint8_t, 32>;

// SHA-256 over the concatenation of `parts`.
Digest256 sha256(std::initializer_list<ByteSpan> parts);

}  // namespace svfl
