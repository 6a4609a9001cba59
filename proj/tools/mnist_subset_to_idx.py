#!/usr/bin/env python3
"""Build a desk-scale MNIST subset in canonical IDX format.

Reads the per-digit JSON files shipped with the `mnist` npm package
(https://www.npmjs.com/package/mnist, 10,000 real MNIST samples with
pixel values normalized to [0,1] and rounded to three decimals) and
writes two files:

    <out>/mnist10k-images-idx3-ubyte   magic 0x00000803, dims [N,28,28]
    <out>/mnist10k-labels-idx1-ubyte   magic 0x00000801, dims [N]

Pixels are recovered as round(v*255), which inverts the package's
normalization exactly. Sample order is a fixed-seed shuffle so any
prefix of the file is class-balanced.

Usage:
    npm install mnist --prefix /tmp/mnistpkg
    python3 tools/mnist_subset_to_idx.py \
        --package-dir /tmp/mnistpkg/node_modules/mnist --out data/mnist10k
"""

import argparse
import json
import random
import struct
from pathlib import Path

ROWS = COLS = 28
SHUFFLE_SEED = 20240817


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--package-dir", required=True, help="root of the installed mnist npm package")
    ap.add_argument("--out", required=True, help="output directory for the IDX files")
    args = ap.parse_args()

    samples = []  # (label, bytes)
    for digit in range(10):
        path = Path(args.package_dir) / "src" / "digits" / f"{digit}.json"
        flat = json.loads(path.read_text())["data"]
        assert len(flat) % (ROWS * COLS) == 0, f"{path}: not a multiple of 784"
        for i in range(0, len(flat), ROWS * COLS):
            pixels = bytes(round(v * 255) for v in flat[i : i + ROWS * COLS])
            samples.append((digit, pixels))

    rng = random.Random(SHUFFLE_SEED)
    rng.shuffle(samples)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = len(samples)

    with open(out / "mnist10k-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">iiii", 0x00000803, n, ROWS, COLS))
        for _, pixels in samples:
            f.write(pixels)

    with open(out / "mnist10k-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">ii", 0x00000801, n))
        f.write(bytes(label for label, _ in samples))

    print(f"wrote {n} samples to {out}/")


if __name__ == "__main__":
    main()
