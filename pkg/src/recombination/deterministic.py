"""Deterministic Caratheodory reduction by kernel-vector elimination.

While the support has more than ``n + 1`` atoms, the bordered system
``[points^T; 1^T] v = 0`` has a nonzero solution ``v``; it is taken on
``n + 2`` live atoms at a time. Moving the weights
along ``-v`` by the largest step that keeps them nonnegative zeroes at least
one atom and leaves both the mean and the total mass unchanged.

Large supports are processed in blocks: atoms are split into ``2(n + 1)``
contiguous groups and a kernel vector of the group barycenters is lifted to
the atoms (each atom of group ``g`` gets ``v_g * w_i / W_g``). That lifted
vector is itself in the kernel of the full system, so every step is still an
exact elimination, but it removes whole groups at a time.
"""
from __future__ import annotations

import numpy as np

from .measure import DiscreteMeasure, center, drop_null_atoms
from .recombine import RecombinationSolution

ZERO_WEIGHT_TOL = 1e-14


def kernel_vector(points: np.ndarray) -> np.ndarray:
    """A unit vector ``v`` with ``points.T @ v = 0`` and ``sum(v) = 0``.

    Taken from the last right singular vector of the bordered matrix and
    oriented so that its first non-negligible entry is positive.
    """
    bordered = np.vstack([points.T, np.ones(points.shape[0])])
    v = np.linalg.svd(bordered, full_matrices=True)[2][-1]
    lead = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())[0]
    return v if v[lead] > 0 else -v


def eliminate(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Reduce ``weights`` on ``points`` to at most ``n + 1`` nonzero entries.

    Each step takes a kernel vector of the first ``n + 2`` live atoms (padded
    with zeros it is a kernel vector of the whole system), so a step costs
    ``O(n^3)`` whatever the support size. Returns a new weight vector of the
    same length; eliminated atoms get 0.
    """
    weights = np.array(weights, dtype=float)
    n = points.shape[1]
    alive = np.flatnonzero(weights > 0)
    while alive.size > n + 1:
        window = alive[: n + 2]
        v = kernel_vector(points[window])
        w = weights[window]
        pos = v > 0
        ratios = np.full(window.size, np.inf)
        ratios[pos] = w[pos] / v[pos]
        hit = int(np.argmin(ratios))
        w = w - ratios[hit] * v
        w[hit] = 0.0
        w[np.abs(w) <= ZERO_WEIGHT_TOL] = 0.0
        weights[window] = w
        alive = np.flatnonzero(weights > 0)
    return weights


def _group_starts(size: int, groups: int) -> np.ndarray:
    base, extra = divmod(size, groups)
    sizes = np.full(groups, base)
    sizes[:extra] += 1
    return np.concatenate([[0], np.cumsum(sizes)[:-1]])


def reduce_deterministic(measure: DiscreteMeasure, block: int | None = None) -> RecombinationSolution:
    """Kernel-elimination reducer; always succeeds, including on rank-deficient clouds.

    ``block`` is the number of groups eliminated together (default ``2(n+1)``).
    """
    reduced, keep = drop_null_atoms(measure)
    N, n = reduced.N, reduced.n
    if N <= n + 1:
        return RecombinationSolution(keep, np.array(reduced.weights), method="trivial")
    block = 2 * (n + 1) if block is None else max(block, n + 2)
    X = center(reduced).points
    w = np.array(reduced.weights)
    support = np.arange(N)
    while support.size > n + 1:
        groups = min(block, support.size)
        starts = _group_starts(support.size, groups)
        ws = w[support]
        masses = np.add.reduceat(ws, starts)
        bary = np.add.reduceat(ws[:, None] * X[support], starts, axis=0) / masses[:, None]
        new_masses = eliminate(bary, masses)
        factor = new_masses / masses
        scaled = ws * np.repeat(factor, np.diff(np.append(starts, support.size)))
        alive = scaled > 0
        support = support[alive]
        w[support] = scaled[alive]
    weights = w[support] / w[support].sum()
    return RecombinationSolution(keep[support], weights, method="deterministic")
