"""Writes a synthetic Bayesian linear-regression dataset y = A u* + gamma * eps."""
import argparse

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--truth", type=float, nargs="+", default=[1.0, -0.5])
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    truth = np.asarray(args.truth)
    a = rng.standard_normal((args.n, truth.size))
    y = a @ truth + args.gamma * rng.standard_normal(args.n)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(",".join([f"x_{i}" for i in range(truth.size)] + ["y"]) + "\n")
        for row, obs in zip(a, y):
            f.write(",".join(repr(float(v)) for v in [*row, obs]) + "\n")


if __name__ == "__main__":
    main()
