"""Command-line interface: ``reduce``, ``lsq`` and ``bench``.

Exit codes: 0 success, 1 input/output problem, 2 the reducer escalated (or
its answer failed validation). Outputs are byte-identical for identical flags
and seed; wall-clock fields stay empty unless ``--timing`` is given.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import datasets
from .errors import Escalation, RecombinationError
from .lsq import build_coreset, normal_matrix_error, residual, solve_reduced
from .measure import DiscreteMeasure, validate_reduction
from .pipeline import ALIASES, recombine

ALGOS = ("basic", "greedy", "greedy-reset", "det", "dnc", "hybrid")
SEED_ENV = "RECOMBINE_SEED"


class InputError(Exception):
    """Bad input file or flag value; maps to exit code 1."""


def read_table(path: str, header: bool = False):
    """Parse a numeric CSV; returns ``(matrix, column_names or None)``."""
    try:
        with open(path, newline="") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    names = None
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if header and names is None:
            names = [cell.strip() for cell in row]
            width = len(names)
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
        if width is None:
            width = len(values)
        if len(values) != width:
            raise InputError(f"{path}:{lineno}: expected {width} columns, got {len(values)}")
        if not all(np.isfinite(values)):
            raise InputError(f"{path}:{lineno}: non-finite value")
        rows.append(values)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.array(rows), names


def column_index(spec: str, names, width: int) -> int:
    """Resolve a column given by header name or by 0-based position."""
    if names is not None and spec in names:
        return names.index(spec)
    try:
        index = int(spec)
    except ValueError:
        raise InputError(f"unknown column {spec!r}") from None
    if not -width <= index < width:
        raise InputError(f"column {index} out of range for {width} columns")
    return index % width


def resolve_seed(seed):
    if seed is not None:
        return seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} is not a u64")
    return value


def _options(args) -> dict:
    return dict(
        max_iterations=args.max_iter,
        reset_c=args.reset_c,
        groups=args.groups,
        trials=args.trials,
    )


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise InputError(f"{out}: {exc.strerror}") from None


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_reduce(args) -> int:
    table, names = read_table(args.input, args.header)
    if args.weights is not None:
        wcol = column_index(args.weights, names, table.shape[1])
        masses = table[:, wcol]
        points = np.delete(table, wcol, axis=1)
        if points.shape[1] == 0:
            raise InputError("no point columns besides the weight column")
        if np.any(masses < 0) or masses.sum() <= 0:
            raise InputError("weights must be nonnegative with a positive total")
        measure = DiscreteMeasure.from_masses(points, masses)
    else:
        measure = DiscreteMeasure.uniform(table)

    seed = resolve_seed(args.seed)
    start = time.perf_counter()
    solution = recombine(measure, ALIASES.get(args.algo, args.algo), seed, **_options(args))
    elapsed = (time.perf_counter() - start) * 1e3
    report = validate_reduction(measure, solution, args.tol)
    payload = {
        "method": solution.method,
        "n": measure.n,
        "N": measure.N,
        "indices": [int(i) for i in solution.indices],
        "weights": [float(w) for w in solution.weights],
        "tau": int(solution.tau),
        "resets": int(solution.resets),
        "fallback_used": bool(solution.fallback_used),
        "wall_time_ms": round(elapsed, 3) if args.timing else None,
        "max_moment_error": report.max_error,
    }
    if not report.passed:
        print(f"error: reduction failed validation: {report.summary()}", file=sys.stderr)
        return 2
    _emit(_dump(payload), args.out)
    return 0


def _parse_synth(items) -> dict:
    spec = {"N": 100_000, "d": 2, "seed": 0}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or key not in spec:
            raise InputError(f"bad --synth entry {item!r}; use N=..., d=..., seed=...")
        try:
            spec[key] = int(value)
        except ValueError:
            raise InputError(f"bad --synth value {item!r}") from None
    return spec


def cmd_lsq(args) -> int:
    if args.synth is not None:
        spec = _parse_synth(args.synth)
        X, Y, _ = datasets.synthetic_regression(spec["N"], spec["d"], spec["seed"])
    elif args.input is not None:
        table, names = read_table(args.input, args.header)
        target = column_index(args.target, names, table.shape[1]) if args.target else table.shape[1] - 1
        Y = table[:, target]
        X = np.delete(table, target, axis=1)
        if X.shape[1] == 0:
            raise InputError("need at least one feature column besides the target")
    else:
        raise InputError("give a CSV path or --synth")

    seed = resolve_seed(args.seed)
    start = time.perf_counter()
    coreset = build_coreset(X, Y, ALIASES.get(args.algo, args.algo), seed,
                            reset_c=args.reset_c, groups=args.groups, trials=args.trials)
    elapsed = (time.perf_counter() - start) * 1e3
    theta = solve_reduced(X, Y, coreset)
    theta_full = np.linalg.lstsq(X, Y, rcond=None)[0]
    payload = {
        "method": coreset.reduction.method if coreset.reduction else "trivial",
        "N": int(X.shape[0]),
        "d": int(X.shape[1]),
        "coreset_indices": [int(i) for i in coreset.row_indices],
        "scales": [float(s) for s in coreset.row_scales],
        "solution": [float(t) for t in theta],
        "solution_full": [float(t) for t in theta_full],
        "residual_full": residual(X, Y, theta_full),
        "residual_coreset": residual(X, Y, theta),
        "normal_matrix_error": normal_matrix_error(X, Y, coreset),
        "wall_time_ms": round(elapsed, 3) if args.timing else None,
    }
    _emit(_dump(payload), args.out)
    return 0


def _int_list(text: str):
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def bench_rows(gen: str, algos, Ns, reps: int, seed: int, timing: bool = False):
    """Yield one result dict per (N, repetition, algo).

    Every algorithm sees the same instance for a given (N, repetition), and
    the row seed is derived from ``(seed, N, repetition)`` only.
    """
    for N in Ns:
        for rep in range(reps):
            row_seed = int(np.random.SeedSequence([seed, N, rep]).generate_state(1)[0])
            points = datasets.generate(gen, N, np.random.default_rng(row_seed))
            measure = DiscreteMeasure.uniform(points)
            for algo in algos:
                start = time.perf_counter()
                try:
                    solution = recombine(measure, ALIASES.get(algo, algo), row_seed)
                    tau, resets = solution.tau, solution.resets
                    valid = validate_reduction(measure, solution).passed
                except Escalation as exc:
                    tau, resets, valid = exc.tau, 0, False
                elapsed = (time.perf_counter() - start) * 1e3
                yield {
                    "algo": algo,
                    "N": N,
                    "n": measure.n,
                    "seed": row_seed,
                    "tau": int(tau),
                    "resets": int(resets),
                    "wall_time_ms": f"{elapsed:.3f}" if timing else "",
                    "valid": str(valid).lower(),
                }


BENCH_FIELDS = ["algo", "N", "n", "seed", "tau", "resets", "wall_time_ms", "valid"]


def cmd_bench(args) -> int:
    unknown = [a for a in args.algos if a not in ALGOS]
    if unknown:
        raise InputError(f"unknown algorithms {unknown}; choose from {list(ALGOS)}")
    seed = resolve_seed(args.seed)
    buffer = io.StringIO()
    buffer.write(f"# gen={args.gen} ({datasets.GENERATORS[args.gen]}); seed={seed}; reps={args.reps}\n")
    writer = csv.DictWriter(buffer, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in bench_rows(args.gen, args.algos, args.Ns, args.reps, seed, args.timing):
        writer.writerow(row)
    _emit(buffer.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recombination", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=_u64, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--timing", action="store_true", help="record wall-clock time")

    def tuning(p):
        p.add_argument("--reset-c", type=int, default=None, help="Luby scale (default 2n)")
        p.add_argument("--groups", type=int, default=None, help="divide-and-conquer groups (default 50(n+1))")
        p.add_argument("--trials", type=int, default=10, help="greedy trials per hybrid round")

    red = sub.add_parser("reduce", help="reduce a point cloud read from CSV")
    red.add_argument("input")
    red.add_argument("--header", action="store_true", help="first row holds column names")
    red.add_argument("--weights", default=None, help="weight column (name or 0-based index)")
    red.add_argument("--algo", choices=ALGOS + ("deterministic", "divide-conquer"), default="hybrid")
    red.add_argument("--tol", type=float, default=1e-8, help="relative moment tolerance for validation")
    red.add_argument("--max-iter", type=int, default=None, help="iteration cap for basic/greedy")
    common(red)
    tuning(red)
    red.set_defaults(func=cmd_reduce)

    lsq = sub.add_parser("lsq", help="least-squares coreset from CSV or synthetic data")
    lsq.add_argument("input", nargs="?")
    lsq.add_argument("--header", action="store_true")
    lsq.add_argument("--target", default=None, help="response column (default: last)")
    lsq.add_argument("--synth", nargs="+", metavar="KEY=VALUE", help="synthetic data: N=..., d=..., seed=...")
    lsq.add_argument("--algo", choices=ALGOS + ("deterministic", "divide-conquer"), default="hybrid")
    common(lsq)
    tuning(lsq)
    lsq.set_defaults(func=cmd_lsq)

    bench = sub.add_parser("bench", help="iteration-count sweep on a synthetic generator")
    bench.add_argument("--gen", choices=sorted(datasets.GENERATORS), default="gauss15")
    bench.add_argument("--algos", type=lambda s: [a.strip() for a in s.split(",") if a.strip()],
                       default=["basic", "greedy"])
    bench.add_argument("--reps", type=int, default=70)
    bench.add_argument("--Ns", type=_int_list, default=[1000, 10000])
    common(bench)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Escalation as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (RecombinationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
