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

#include "svfl/data/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <memory>
#include <string>

#include "svfl/common/bytes.hpp"
#include "svfl/common/error.hpp"

namespace svfl::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// gzread passes uncompressed input through unchanged.
Bytes slurp(const std::filesystem::path& path) {
  std::unique_ptr<gzFile_s, decltype(&gzclose)> f(gzopen(path.c_str(), "rb"), &gzclose);
  if (!f) throw FormatError("cannot open " + path.string());
  Bytes out;
  std::uint8_t buf[1 << 16];
  for (;;) {
    const int n = gzread(f.get(), buf, sizeof(buf));
    if (n < 0) {
      int err = 0;
      throw FormatError(path.string() + ": " + gzerror(f.get(), &err));
    }
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  return out;
}

}  // namespace

MnistSet load_mnist_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t limit) {
  const Bytes image_bytes = slurp(images_path);
  const Bytes label_bytes = slurp(labels_path);

  ByteReader img(image_bytes);
  ByteReader lab(label_bytes);
  std::uint32_t n_images = 0, rows = 0, cols = 0, n_labels = 0;
  try {
    if (img.u32_be() != kImageMagic) throw FormatError(images_path.string() + ": bad IDX magic");
    n_images = img.u32_be();
    rows = img.u32_be();
    cols = img.u32_be();
    if (lab.u32_be() != kLabelMagic) throw FormatError(labels_path.string() + ": bad IDX magic");
    n_labels = lab.u32_be();
  } catch (const FormatError& e) {
    throw FormatError(std::string("MNIST header: ") + e.what());
  }
  if (n_images != n_labels) {
    throw FormatError("MNIST image count " + std::to_string(n_images) + " != label count " +
                      std::to_string(n_labels));
  }
  const std::size_t pixels = std::size_t{rows} * cols;
  if (img.remaining() != std::size_t{n_images} * pixels) {
    throw FormatError(images_path.string() + ": expected " +
                      std::to_string(std::size_t{n_images} * pixels) + " pixel bytes, found " +
                      std::to_string(img.remaining()));
  }
  if (lab.remaining() != n_labels) {
    throw FormatError(labels_path.string() + ": expected " + std::to_string(n_labels) +
                      " label bytes, found " + std::to_string(lab.remaining()));
  }

  const std::size_t n = std::min<std::size_t>(n_images, limit);
  MnistSet set;
  set.images = nn::Matrix(n, pixels);
  auto px = img.raw(n * pixels);
  auto dst = set.images.data();
  for (std::size_t k = 0; k < px.size(); ++k) dst[k] = static_cast<double>(px[k]) / 255.0;
  set.labels.resize(n);
  auto lb = lab.raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (lb[i] > 9) throw FormatError(labels_path.string() + ": label out of range");
    set.labels[i] = lb[i];
  }
  return set;
}

std::optional<MnistFiles> find_mnist_files(const std::filesystem::path& dir) {
  auto pick = [&](const std::string& stem) -> std::optional<std::filesystem::path> {
    for (const auto& name : {stem, stem + ".gz"}) {
      auto p = dir / name;
      if (std::filesystem::is_regular_file(p)) return p;
    }
    return std::nullopt;
  };
  auto ti = pick("train-images-idx3-ubyte");
  auto tl = pick("train-labels-idx1-ubyte");
  auto vi = pick("t10k-images-idx3-ubyte");
  auto vl = pick("t10k-labels-idx1-ubyte");
  if (!ti || !tl || !vi || !vl) return std::nullopt;
  return MnistFiles{*ti, *tl, *vi, *vl};
}

}  // namespace svfl::data
