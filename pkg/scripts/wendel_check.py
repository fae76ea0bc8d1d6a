"""Empirical probability that n+1 uniform points on the sphere surround 0."""
import argparse

import numpy as np

from recombination.datasets import uniform_sphere
from recombination.oracle import contains_zero


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for n in range(1, 5):
        rng = np.random.default_rng([args.seed, n])
        hits = sum(contains_zero(uniform_sphere(n + 1, n, rng)) for _ in range(args.trials))
        print(f"n={n}: empirical {hits / args.trials:.4f}  exact {2.0 ** -n:.4f}")


if __name__ == "__main__":
    main()
