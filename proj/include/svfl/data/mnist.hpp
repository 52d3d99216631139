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
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "svfl/nn/loss.hpp"
#include "svfl/nn/matrix.hpp"

namespace svfl::data {

struct MnistSet {
  nn::Matrix images;  // n x 784, byte / 255
  std::vector<nn::Label> labels;
};

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
// Either may be gzip-compressed. At most `limit` leading samples are kept.
// Throws FormatError on bad magic, truncation or count mismatch.
MnistSet load_mnist_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path,
                        std::size_t limit = std::numeric_limits<std::size_t>::max());

struct MnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

// Looks for the four standard file names (optionally with .gz) in `dir`.
std::optional<MnistFiles> find_mnist_files(const std::filesystem::path& dir);

}  // namespace svfl::data
