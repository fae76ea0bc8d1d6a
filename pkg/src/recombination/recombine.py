"""Randomized reducers.

``reduce_basic`` samples whole cone bases uniformly until some point falls in
the negative cone. ``reduce_greedy`` samples one basis and then swaps single
vectors towards the direction that opens the cone widest, pruning points that
sit strictly inside the cone. ``reduce_with_resets`` restarts either of them
on a Luby schedule so that the run terminates with probability one.

All three take a :class:`~recombination.measure.CenteredCloud` and return
indices into it; :func:`solve_measure` wraps them for a
:class:`~recombination.measure.DiscreteMeasure`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .cone import (
    EPS_CONE,
    ConeBasis,
    build_basis,
    invert_basis,
    refresh,
    solve_weights,
    swap_basis_vector,
)
from .errors import (
    ActiveExhausted,
    DegenerateSwap,
    EmptyActive,
    GiveUp,
    InfeasibleInput,
    NotFound,
    SingularBasis,
    SingularBasisPersistent,
    SingularPerturbation,
)
from .measure import (
    CenteredCloud,
    DiscreteMeasure,
    center,
    drop_null_atoms,
    normalize_sphere,
    recover_weights,
    zero_rows,
)

METHODS = ("basic", "greedy", "greedy-reset", "deterministic", "divide-conquer", "hybrid", "trivial")
MAX_SINGULAR_DRAWS = 100
MAX_RESETS = 10_000


@dataclass(frozen=True)
class RecombinationSolution:
    """Surviving atoms and their weights plus run diagnostics.

    ``tau`` counts main-loop iterations (cone bases examined), ``resets``
    restarts, ``fallbacks`` rounds solved by the deterministic reducer and
    ``basis_attempts`` basis inversions tried by the randomized ones.
    ``round_masses`` holds the total weight after every divide-and-conquer
    round.
    """

    indices: np.ndarray
    weights: np.ndarray
    tau: int = 0
    resets: int = 0
    method: str = "trivial"
    fallbacks: int = 0
    basis_attempts: int = 0
    round_masses: tuple = field(default=())

    @property
    def fallback_used(self) -> bool:
        return self.fallbacks > 0

    @property
    def support_size(self) -> int:
        return int(np.asarray(self.indices).size)


def rng_for(seed, *keys) -> np.random.Generator:
    """Generator for ``seed`` (an int or tuple of ints) extended by ``keys``."""
    if isinstance(seed, np.random.Generator):
        return seed
    base = list(seed) if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.default_rng(base + [int(k) for k in keys])


def child_seed(seed, *keys) -> tuple:
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)
    return base + tuple(int(k) for k in keys)


def luby(i: int) -> int:
    """The ``i``-th term (1-based) of 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, ..."""
    if i < 1:
        raise ValueError("the Luby sequence starts at i = 1")
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


@dataclass
class ResetSchedule:
    """Iteration budgets ``c * luby(1), c * luby(2), ...``."""

    c: int
    luby_position: int = 0

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("reset scale must be a positive integer")

    @classmethod
    def for_dimension(cls, n: int) -> "ResetSchedule":
        return cls(c=2 * n)

    def next_budget(self) -> int:
        self.luby_position += 1
        return self.c * luby(self.luby_position)

    def budgets(self, k: int) -> list:
        return [self.next_budget() for _ in range(k)]


def _finish(cloud: CenteredCloud, basis: ConeBasis, star: int, tau: int, method: str, attempts: int):
    weights = solve_weights(basis, star, cloud)
    indices = np.append(basis.basis_indices, star)
    weights = recover_weights(weights, indices, cloud.kappas, cloud.zero_rows)
    keep = weights > 0
    order = np.argsort(indices[keep])
    return RecombinationSolution(
        indices=indices[keep][order],
        weights=weights[keep][order],
        tau=tau,
        method=method,
        basis_attempts=attempts,
    )


def _deepest(projections: np.ndarray, hits: np.ndarray) -> int:
    # hit whose largest coordinate is most negative, i.e. furthest from the faces
    depth = projections[:, hits].max(axis=0)
    return int(hits[np.argmin(depth)])


def _negative_candidates(points_t, A, basis_indices, head=6, chunk=4096):
    # screen each cache-sized chunk on a few coordinates, finish the survivors;
    # points_t is the n x N transposed cloud
    found = []
    for start in range(0, points_t.shape[1], chunk):
        block = points_t[:, start:start + chunk]
        idx = np.flatnonzero((A[:head] @ block).max(axis=0) <= EPS_CONE)
        if idx.size and A.shape[0] > head:
            idx = idx[(A[head:] @ block[:, idx]).max(axis=0) <= EPS_CONE]
        if idx.size:
            found.append(idx + start)
    if not found:
        return np.empty(0, dtype=int)
    idx = np.concatenate(found)
    return idx[~np.isin(idx, basis_indices)]


def _restrict(basis, hits, star):
    # projection table holding only the chosen star, for solve_weights
    column = np.zeros((basis.n, star + 1))
    column[:, star] = basis.projections[:, int(np.flatnonzero(hits == star)[0])]
    return ConeBasis(basis.basis_indices, basis.A, column)


def _check_size(cloud: CenteredCloud):
    if cloud.N < cloud.n + 1:
        raise InfeasibleInput(f"{cloud.N} points cannot carry a basis plus a negative-cone point in R^{cloud.n}")


def reduce_basic(
    cloud: CenteredCloud,
    rng_seed=0,
    max_iterations: int | None = None,
    max_singular: int = MAX_SINGULAR_DRAWS,
) -> RecombinationSolution:
    """Resample uniform random bases until the negative cone contains a point."""
    _check_size(cloud)
    N, n = cloud.N, cloud.n
    max_iterations = 50 * n if max_iterations is None else max_iterations
    rng = rng_for(rng_seed)
    points_t = np.ascontiguousarray(cloud.points.T)
    tau = attempts = singular_run = 0
    while tau < max_iterations:
        tau += 1
        attempts += 1
        idx = rng.choice(N, size=n, replace=False)
        try:
            A = invert_basis(cloud.points[idx].T)
        except SingularBasis:
            singular_run += 1
            if singular_run >= max_singular:
                raise SingularBasisPersistent(
                    f"{singular_run} singular bases in a row", tau=tau, basis_attempts=attempts
                ) from None
            continue
        singular_run = 0
        hits = _negative_candidates(points_t, A, idx)
        if hits.size:
            basis = ConeBasis(idx, A, A @ cloud.points[hits].T)
            star = hits[_deepest(basis.projections, np.arange(hits.size))]
            return _finish(cloud, _restrict(basis, hits, star), star, tau, "basic", attempts)
    raise NotFound(f"no negative-cone point after {tau} bases", tau=tau, basis_attempts=attempts)


def greedy_select(
    cloud: CenteredCloud,
    basis: ConeBasis,
    i: int,
    active,
    direction: np.ndarray | None = None,
) -> int:
    """Active point maximising ``|<x, s> - 1|`` for the partial basis sum ``s``.

    On the first pass (``i == 0``) ``s`` sums basis slots ``1..n-1``; otherwise
    it sums slots ``0..i-1``, the vectors already refreshed in this sweep.
    Ties go to the lowest index.
    """
    points = cloud.points if isinstance(cloud, CenteredCloud) else np.asarray(cloud)
    active = np.asarray(active)
    if active.dtype != bool:
        mask = np.zeros(points.shape[0], dtype=bool)
        mask[active.astype(int)] = True
        active = mask
    if not active.any():
        raise EmptyActive("no candidate points left")
    if direction is None:
        slots = basis.basis_indices[1:] if i == 0 else basis.basis_indices[:i]
        direction = points[slots].sum(axis=0)
    scores = np.abs(points @ direction - 1.0)
    scores[~active] = -np.inf
    return int(np.argmax(scores))


def _initial_basis(cloud, rng, initial, max_attempts):
    attempts = 0
    if initial is not None:
        attempts += 1
        try:
            return build_basis(cloud, initial), attempts
        except (SingularBasis, ValueError):
            pass
    while attempts < max_attempts:
        attempts += 1
        try:
            return build_basis(cloud, rng.choice(cloud.N, size=cloud.n, replace=False)), attempts
        except SingularBasis:
            continue
    raise SingularBasisPersistent(f"{attempts} singular initial bases", basis_attempts=attempts)


def reduce_greedy(
    cloud: CenteredCloud,
    rng_seed=0,
    max_iterations: int | None = None,
    initial_basis=None,
    max_basis_attempts: int = MAX_SINGULAR_DRAWS,
) -> RecombinationSolution:
    """Greedy geometric sampling on a (unit-normalised) centred cloud.

    One random basis is inverted; afterwards each iteration drops points
    strictly inside the cone and swaps basis slot ``i`` for the point making
    the widest angle with the partial basis sum, cycling ``i`` through the
    slots. Each swap costs ``O(n^2 + nN)``.
    """
    _check_size(cloud)
    N, n = cloud.N, cloud.n
    points = cloud.points
    max_iterations = 50 * n if max_iterations is None else max_iterations
    rng = rng_for(rng_seed)
    basis, attempts = _initial_basis(cloud, rng, initial_basis, max_basis_attempts)

    active = np.ones(N, dtype=bool)
    active[basis.basis_indices] = False
    basis_sum = points[basis.basis_indices].sum(axis=0)
    prefix = np.zeros(n)
    tau = 0
    i = 0
    while True:
        tau += 1
        P = basis.projections
        hits = np.flatnonzero(active & (P.max(axis=0) <= EPS_CONE))
        if hits.size and basis.swap_count:
            refresh(basis, cloud)
            P = basis.projections
            hits = np.flatnonzero(active & (P.max(axis=0) <= EPS_CONE))
        if hits.size:
            return _finish(cloud, basis, _deepest(P, hits), tau, "greedy", attempts)
        if tau >= max_iterations:
            raise NotFound(f"no negative-cone point after {tau} iterations", tau=tau, basis_attempts=attempts)

        active &= ~(P.min(axis=0) > EPS_CONE)
        if not active.any():
            raise ActiveExhausted("every candidate was pruned", tau=tau, basis_attempts=attempts)

        if i == 0:
            prefix[:] = 0.0
            direction = basis_sum - points[basis.basis_indices[0]]
        else:
            direction = prefix
        candidates = active.copy()
        while True:
            if not candidates.any():
                raise ActiveExhausted("no candidate gives an invertible basis", tau=tau, basis_attempts=attempts)
            new = greedy_select(cloud, basis, i, candidates, direction)
            old = int(basis.basis_indices[i])
            try:
                swap_basis_vector(basis, i, new, cloud)
                break
            except DegenerateSwap:
                candidates[new] = False
                if basis.swap_count:
                    refresh(basis, cloud)
        active[old] = True
        active[new] = False
        basis_sum += points[new] - points[old]
        prefix += points[new]
        i = (i + 1) % n


def reduce_with_resets(
    cloud: CenteredCloud,
    rng_seed=0,
    schedule: ResetSchedule | None = None,
    inner: str = "greedy",
    max_resets: int = MAX_RESETS,
) -> RecombinationSolution:
    """Restart ``inner`` with a fresh random basis whenever its budget runs out.

    Attempt 0 uses ``rng_seed`` itself, attempt ``r`` the stream
    ``(rng_seed, r)``, so a run that succeeds first time matches the inner
    reducer exactly.
    """
    schedule = ResetSchedule.for_dimension(cloud.n) if schedule is None else schedule
    reducer = {"greedy": reduce_greedy, "basic": reduce_basic}[inner]
    method = "greedy-reset" if inner == "greedy" else "basic"
    total_tau = attempts = 0
    for reset in range(max_resets + 1):
        seed = rng_seed if reset == 0 else child_seed(rng_seed, reset)
        try:
            solution = reducer(cloud, seed, max_iterations=schedule.next_budget())
        except (NotFound, ActiveExhausted) as exc:
            if isinstance(exc, InfeasibleInput):
                raise
            total_tau += exc.tau
            attempts += exc.basis_attempts
            continue
        return replace(
            solution,
            tau=total_tau + solution.tau,
            resets=reset,
            method=method,
            basis_attempts=attempts + solution.basis_attempts,
        )
    raise GiveUp(f"no solution after {max_resets} resets", tau=total_tau, basis_attempts=attempts)


def warm_start_basis(cloud_new, previous_solution_points, rng_seed=0) -> np.ndarray:
    """Indices of the points of ``cloud_new`` nearest to a previous solution.

    Each of the first ``n`` previous points claims its nearest still-unused
    point; missing slots are filled with random unused indices.
    """
    points = cloud_new.points if isinstance(cloud_new, CenteredCloud) else np.asarray(cloud_new, dtype=float)
    previous = np.atleast_2d(np.asarray(previous_solution_points, dtype=float))
    N, n = points.shape
    used = np.zeros(N, dtype=bool)
    chosen = []
    for target in previous[:n]:
        dist = np.einsum("ij,ij->i", points - target, points - target)
        dist[used] = np.inf
        j = int(np.argmin(dist))
        if not np.isfinite(dist[j]):
            break
        used[j] = True
        chosen.append(j)
    if len(chosen) < n:
        spare = np.flatnonzero(~used)
        fill = rng_for(rng_seed).choice(spare, size=min(n - len(chosen), spare.size), replace=False)
        chosen.extend(int(j) for j in fill)
    return np.array(chosen, dtype=int)


def woodbury_feasibility(solution_points, R, E, basis_inverse=None) -> bool:
    """Does a perturbed previous solution still solve the new problem?

    ``solution_points`` holds the ``n + 1`` atoms of a previous solution as
    rows, the last one being the negative-cone point. The candidate atoms
    for the new problem are ``solution_points @ R + E``. The inverse of the
    perturbed basis is obtained from the stored ``basis_inverse`` of the old
    one by a Woodbury update whose inner system has one row per perturbed
    basis atom, then the sign test is applied to the transformed point.
    """
    X = np.asarray(solution_points, dtype=float)
    R = np.asarray(R, dtype=float)
    E = np.asarray(E, dtype=float)
    n = X.shape[1]
    old_basis, old_star = X[:n], X[n]
    A1 = np.linalg.inv(old_basis.T) if basis_inverse is None else np.asarray(basis_inverse, dtype=float)

    R_inv_T = np.linalg.inv(R).T
    # new basis columns: R^T (old_basis^T + R^{-T} E_basis^T)
    rows = np.flatnonzero(np.any(E[:n] != 0, axis=1))
    if rows.size:
        U = R_inv_T @ E[rows].T  # n x k
        A1U = A1 @ U
        inner = np.eye(rows.size) + A1U[rows]
        sigma = np.linalg.svd(inner, compute_uv=False)
        if sigma[-1] <= 1e-12 * (1.0 + np.abs(A1U[rows]).max()):
            raise SingularPerturbation("Woodbury inner matrix is singular")
        correction = A1U @ np.linalg.solve(inner, A1[rows])
        core = A1 - correction
    else:
        core = A1
    new_inverse = core @ R_inv_T
    new_star = old_star @ R + E[n]
    return bool(np.all(new_inverse @ new_star <= EPS_CONE))


def solve_measure(
    measure: DiscreteMeasure,
    reducer: Callable[[CenteredCloud], RecombinationSolution],
    normalize: bool = True,
) -> RecombinationSolution:
    """Apply a cloud reducer to a measure.

    Zero-weight atoms are dropped, measures with at most ``n + 1`` atoms are
    returned as they are, and an atom sitting exactly at the barycenter is
    returned alone with weight 1. Indices refer to the input measure.
    """
    reduced, keep = drop_null_atoms(measure)
    if reduced.N <= reduced.n + 1:
        return RecombinationSolution(keep, np.array(reduced.weights), method="trivial")
    cloud = center(reduced)
    if normalize:
        cloud, flagged = normalize_sphere(cloud)
    else:
        flagged = zero_rows(cloud)
    if len(flagged):
        return RecombinationSolution(keep[[int(flagged[0])]], np.ones(1), method="trivial")
    solution = reducer(cloud)
    return replace(solution, indices=keep[solution.indices])
