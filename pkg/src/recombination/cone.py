"""Cone bases and sign tests.

A basis is ``n`` cloud points ``x_1..x_n`` spanning ``R^n``. With ``A`` the
inverse of the matrix whose columns are the basis points, the coordinates
``A x`` of any point decide cone membership by sign alone:

* ``A x >= 0``  -- ``x`` lies in the cone spanned by the basis,
* ``A x <= 0``  -- ``x`` lies in the negative cone, and then the basis plus
  ``x`` carry a convex combination equal to the origin.

The table ``A @ points.T`` is cached for the whole cloud and kept current
across single-vector swaps with rank-one (Sherman-Morrison) updates.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateSwap, NotInNegativeCone, SingularBasis

EPS_CONE = 1e-10
SINGULAR_RTOL = 1e-12
DEGENERATE_TOL = 1e-12


def _points(cloud) -> np.ndarray:
    return cloud if isinstance(cloud, np.ndarray) else cloud.points


@dataclass(eq=False)
class ConeBasis:
    """Mutable workspace for one reduction run.

    ``projections[:, j] == A @ points[j]``. ``rebuild_every`` swaps trigger a
    fresh inversion (``None`` disables it, which only tests should do).
    """

    basis_indices: np.ndarray
    A: np.ndarray
    projections: np.ndarray
    swap_count: int = 0
    rebuild_every: int | None = None

    @property
    def n(self) -> int:
        return self.A.shape[0]


def invert_basis(columns: np.ndarray) -> np.ndarray:
    """Inverse of the basis matrix; raises SingularBasis on a tiny pivot ratio."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(columns, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if not pivots.max() > 0 or pivots.min() < SINGULAR_RTOL * pivots.max():
        raise SingularBasis(f"pivot ratio {pivots.min() / max(pivots.max(), 1e-300):.2e}")
    return scipy.linalg.lu_solve((lu, piv), np.eye(columns.shape[0]), check_finite=False)


def build_basis(cloud, indices, rebuild_every: int | None = -1) -> ConeBasis:
    """Invert the basis matrix directly and tabulate projections of every point.

    ``rebuild_every`` defaults to ``n``.
    """
    points = _points(cloud)
    indices = np.array(indices, dtype=int).reshape(-1)
    n = points.shape[1]
    if indices.size != n or np.unique(indices).size != n:
        raise ValueError(f"need {n} distinct basis indices, got {indices.tolist()}")
    A = invert_basis(points[indices].T)
    return ConeBasis(indices, A, A @ points.T, 0, n if rebuild_every == -1 else rebuild_every)


def refresh(basis: ConeBasis, cloud) -> ConeBasis:
    """Recompute ``A`` and the projection table from scratch, in place."""
    points = _points(cloud)
    basis.A = invert_basis(points[basis.basis_indices].T)
    basis.projections = basis.A @ points.T
    basis.swap_count = 0
    return basis


def _index_array(active) -> np.ndarray:
    active = np.asarray(active)
    if active.dtype == bool:
        return np.flatnonzero(active)
    return np.sort(active.astype(int).reshape(-1))


def negative_cone_hits(basis: ConeBasis, active) -> np.ndarray:
    """Active points whose every basis coordinate is ``<= EPS_CONE``."""
    idx = _index_array(active)
    if idx.size == 0:
        return idx
    return idx[basis.projections[:, idx].max(axis=0) <= EPS_CONE]


def interior_cone_hits(basis: ConeBasis, active) -> np.ndarray:
    """Active points strictly inside the cone (every coordinate ``> EPS_CONE``)."""
    idx = _index_array(active)
    if idx.size == 0:
        return idx
    return idx[basis.projections[:, idx].min(axis=0) > EPS_CONE]


def swap_basis_vector(basis: ConeBasis, slot: int, new_index: int, cloud) -> ConeBasis:
    """Replace basis vector ``slot`` by point ``new_index`` with a rank-one update.

    With ``u = A (x_new - x_old)`` the new inverse is
    ``A - u (e_slot^T A) / (1 + u[slot])`` and the projection table follows
    the same formula. The denominator equals the ``slot`` coordinate of the
    new point, so a vanishing one means the new basis is singular.
    """
    points = _points(cloud)
    old_index = int(basis.basis_indices[slot])
    if new_index == old_index:
        return basis
    if new_index in basis.basis_indices:
        raise ValueError(f"point {new_index} is already in the basis")

    u = basis.A @ (points[new_index] - points[old_index])
    denom = 1.0 + u[slot]
    if abs(denom) < DEGENERATE_TOL:
        raise DegenerateSwap(f"swapping {old_index} -> {new_index} makes the basis singular")
    u /= denom
    basis.A -= np.outer(u, basis.A[slot])
    basis.projections -= np.outer(u, basis.projections[slot])
    basis.basis_indices[slot] = new_index
    basis.swap_count += 1

    if basis.rebuild_every and basis.swap_count >= basis.rebuild_every:
        try:
            refresh(basis, points)
        except SingularBasis:
            # keep the rank-one state; the next periodic rebuild tries again
            pass
    return basis


def solve_weights(basis: ConeBasis, star_index: int, cloud=None) -> np.ndarray:
    """Convex weights on ``basis + [star]`` that put the barycenter at 0.

    For ``p = A x_star <= 0`` and ``c = 1 - sum(p)`` the weights are
    ``(-p / c, 1 / c)``; ``c >= 1`` so they are nonnegative and sum to one.
    """
    p = basis.projections[:, star_index]
    if np.any(p > EPS_CONE):
        raise NotInNegativeCone(f"point {star_index} has coordinates {p}")
    c = 1.0 - p.sum()
    return np.append(-p / c, 1.0 / c)
