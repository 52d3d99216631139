#!/usr/bin/env python3
# Copyright 2026 The svfl Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Centralised PyTorch reference for the MNIST accuracy thresholds.

Trains the same dual-headed network (two 392x64 ReLU segments on the left
and right image halves, a 128x500 ReLU + 500x10 head) in one process with
plain SGD, owner lr 0.01, head lr 0.1, batch 128, and prints train and test
accuracy for a few seeds.

Usage: central_reference.py <mnist dir> <train rows> <epochs> [test rows]
"""

import gzip
import sys

import numpy as np
import torch
from torch import nn


def load(images, labels, n):
    with gzip.open(images) as f:
        x = np.frombuffer(f.read(), np.uint8, offset=16).reshape(-1, 784)
    with gzip.open(labels) as f:
        y = np.frombuffer(f.read(), np.uint8, offset=8)
    return torch.tensor(x[:n] / 255.0, dtype=torch.float32), torch.tensor(y[:n], dtype=torch.long)


def main():
    root, rows, epochs = sys.argv[1], int(sys.argv[2]), int(sys.argv[3])
    test_rows = int(sys.argv[4]) if len(sys.argv) > 4 else 10000
    x, y = load(f"{root}/train-images-idx3-ubyte.gz", f"{root}/train-labels-idx1-ubyte.gz", rows)
    xv, yv = load(f"{root}/t10k-images-idx3-ubyte.gz", f"{root}/t10k-labels-idx1-ubyte.gz", test_rows)
    for seed in range(3):
        torch.manual_seed(seed)
        left = nn.Sequential(nn.Linear(392, 64), nn.ReLU())
        right = nn.Sequential(nn.Linear(392, 64), nn.ReLU())
        head = nn.Sequential(nn.Linear(128, 500), nn.ReLU(), nn.Linear(500, 10))
        opts = [torch.optim.SGD(left.parameters(), lr=0.01),
                torch.optim.SGD(right.parameters(), lr=0.01),
                torch.optim.SGD(head.parameters(), lr=0.1)]

        def forward(batch):
            img = batch.view(-1, 28, 28)
            return head(torch.cat([left(img[:, :, :14].reshape(-1, 392)),
                                   right(img[:, :, 14:].reshape(-1, 392))], 1))

        for _ in range(epochs):
            perm = torch.randperm(rows)
            for b in range(0, rows, 128):
                idx = perm[b:b + 128]
                loss = nn.functional.cross_entropy(forward(x[idx]), y[idx])
                for o in opts:
                    o.zero_grad()
                loss.backward()
                for o in opts:
                    o.step()
        with torch.no_grad():
            train = (forward(x).argmax(1) == y).float().mean().item()
            test = (forward(xv).argmax(1) == yv).float().mean().item()
        print(f"seed {seed}: train_acc {train:.4f} test_acc {test:.4f}")


if __name__ == "__main__":
    main()
