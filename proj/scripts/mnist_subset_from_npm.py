#!/usr/bin/env python3
"""Build a small IDX-format MNIST subset from the `mnist` npm package.

The npm package (MIT, github.com/cazala/mnist) ships 10,000 MNIST digits as
per-class JSON arrays of pixel intensities in [0, 1] rounded to three
decimals. This script interleaves them with a fixed seed, converts the
intensities back to bytes and writes gzipped IDX files:

    train-images-idx3-ubyte.gz / train-labels-idx1-ubyte.gz   (8,000)
    t10k-images-idx3-ubyte.gz  / t10k-labels-idx1-ubyte.gz    (2,000)

Usage: mnist_subset_from_npm.py <npm package dir> <out dir>
"""

import gzip
import json
import random
import struct
import sys
from pathlib import Path


def write_idx(path, magic, dims, payload):
    header = struct.pack(">I", magic) + b"".join(struct.pack(">I", d) for d in dims)
    # mtime=0 keeps the output byte-identical across runs.
    with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as f:
        f.write(header + payload)


def main():
    pkg, out = Path(sys.argv[1]), Path(sys.argv[2])
    samples = []
    for digit in range(10):
        data = json.loads((pkg / "src" / "digits" / f"{digit}.json").read_text())["data"]
        for start in range(0, len(data) - len(data) % 784, 784):
            pixels = bytes(min(255, max(0, round(v * 255))) for v in data[start:start + 784])
            samples.append((pixels, digit))
    random.Random(20210304).shuffle(samples)
    out.mkdir(parents=True, exist_ok=True)
    split = 8000
    for prefix, part in (("train", samples[:split]), ("t10k", samples[split:])):
        write_idx(out / f"{prefix}-images-idx3-ubyte.gz", 0x803, (len(part), 28, 28),
                  b"".join(p for p, _ in part))
        write_idx(out / f"{prefix}-labels-idx1-ubyte.gz", 0x801, (len(part),),
                  bytes(label for _, label in part))
        print(f"{prefix}: {len(part)} images")


if __name__ == "__main__":
    main()
