"""Least-squares coreset on synthetic regression data of growing size."""
import argparse
import time

import numpy as np

from recombination import build_coreset, solve_reduced
from recombination.datasets import synthetic_regression
from recombination.lsq import normal_matrix_error


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--Ns", default="1000,10000,100000,1000000")
    parser.add_argument("--algo", default="hybrid")
    args = parser.parse_args()
    print(f"{'N':>9} {'rows':>5} {'normal err':>11} {'argmin err':>11} {'coreset s':>10} {'full lstsq s':>13}")
    for N in (int(v) for v in args.Ns.split(",")):
        X, Y, _ = synthetic_regression(N, args.d, seed=N)
        start = time.perf_counter()
        cs = build_coreset(X, Y, args.algo, seed=0)
        theta = solve_reduced(X, Y, cs)
        t_core = time.perf_counter() - start
        start = time.perf_counter()
        full = np.linalg.lstsq(X, Y, rcond=None)[0]
        t_full = time.perf_counter() - start
        err = np.linalg.norm(theta - full) / np.linalg.norm(full)
        print(f"{N:>9} {cs.row_indices.size:>5} {normal_matrix_error(X, Y, cs):>11.1e} {err:>11.1e} "
              f"{t_core:>10.3f} {t_full:>13.3f}")


if __name__ == "__main__":
    main()
