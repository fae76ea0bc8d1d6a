"""Brute-force feasibility by enumerating small supports.

Only meant for tiny instances: every subset of at most ``n + 1`` points is
tried, solving the bordered system ``[x^T; 1^T] w = (0, 1)`` on it.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import TooLarge

MAX_POINTS = 12
MAX_DIM = 4
WEIGHT_TOL = 1e-10
RESIDUAL_TOL = 1e-9


def _cloud_points(cloud) -> np.ndarray:
    points = getattr(cloud, "points", cloud)
    return np.atleast_2d(np.asarray(points, dtype=float))


def _solutions(points, max_support):
    N, n = points.shape
    if N > MAX_POINTS or n > MAX_DIM:
        raise TooLarge(f"oracle handles N <= {MAX_POINTS}, n <= {MAX_DIM}; got N={N}, n={n}")
    rhs = np.append(np.zeros(n), 1.0)
    for k in range(1, min(max_support, N) + 1):
        for subset in combinations(range(N), k):
            system = np.vstack([points[list(subset)].T, np.ones(k)])
            w = np.linalg.lstsq(system, rhs, rcond=None)[0]
            if w.min() >= -WEIGHT_TOL and np.abs(system @ w - rhs).max() <= RESIDUAL_TOL:
                yield subset, w


def enumerate_solutions(cloud, max_support: int | None = None) -> list:
    """All supports (as sorted index tuples) carrying a convex combination equal to 0."""
    points = _cloud_points(cloud)
    max_support = points.shape[1] + 1 if max_support is None else max_support
    return list(_solutions(points, max_support))


def contains_zero(cloud) -> bool:
    """Is the origin in the convex hull of the cloud?"""
    points = _cloud_points(cloud)
    return next(_solutions(points, points.shape[1] + 1), None) is not None
