"""Write the bundled binary-classification CSV (non-separable, 500 x 8)."""
import argparse
import csv
from pathlib import Path

import numpy as np


def make(n: int = 500, d: int = 8, seed: int = 2024):
    rng = np.random.default_rng(seed)
    mix = rng.standard_normal((d, d)) / np.sqrt(d)
    x = rng.standard_normal((n, d)) @ (np.eye(d) + 0.5 * mix)
    x = x * rng.uniform(0.5, 3.0, size=d) + rng.uniform(-2.0, 2.0, size=d)
    w = rng.standard_normal(d)
    z = (x - x.mean(axis=0)) / x.std(axis=0) @ w * 0.8 + 0.3
    y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-z))).astype(int)
    return x, y


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    default = Path(__file__).resolve().parents[1] / "src" / "accel" / "data" / "synthetic_binary.csv"
    ap.add_argument("--out", type=Path, default=default)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    x, y = make(seed=args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{k + 1}" for k in range(x.shape[1])] + ["y"])
        for row, label in zip(x, y):
            w.writerow([f"{v:.6f}" for v in row] + [int(label)])
    print(f"wrote {args.out} ({x.shape[0]} rows, {x.shape[1]} features, {y.mean():.2f} positive)")


if __name__ == "__main__":
    main()
