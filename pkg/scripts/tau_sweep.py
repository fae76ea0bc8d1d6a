"""Iteration counts of the basic and greedy reducers as N grows.

Writes one CSV row per (algo, N, repetition) and prints the median tau per
(algo, N). The greedy medians should sit below the basic ones throughout.
"""
import argparse
import csv
import sys
from collections import defaultdict

import numpy as np

from recombination.cli import BENCH_FIELDS, bench_rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gen", default="gauss15")
    parser.add_argument("--Ns", default="30,50,100,300,1000,3000,10000")
    parser.add_argument("--reps", type=int, default=70)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="tau_sweep.csv")
    args = parser.parse_args()

    Ns = [int(v) for v in args.Ns.split(",")]
    taus = defaultdict(list)
    with open(args.out, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=BENCH_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in bench_rows(args.gen, ["basic", "greedy"], Ns, args.reps, args.seed, timing=True):
            writer.writerow(row)
            taus[row["algo"], row["N"]].append(row["tau"])

    print(f"{'N':>8} {'basic':>8} {'greedy':>8}")
    for N in Ns:
        print(f"{N:>8} {np.median(taus['basic', N]):>8.1f} {np.median(taus['greedy', N]):>8.1f}")
    print(f"rows written to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
