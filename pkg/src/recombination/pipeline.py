"""Divide-and-conquer scaling and the hybrid randomized/deterministic reducer.

Each round splits the current support into ``G`` groups, reduces the measure
of group barycenters to at most ``n + 1`` atoms, discards every atom whose
group did not survive and rescales the rest by ``w*_g / W_g`` so the total
mass stays 1. Rounds repeat until at most ``n + 1`` atoms remain.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .deterministic import reduce_deterministic
from .errors import ActiveExhausted, BadGroupCount, GiveUp, NotFound, SingularBasisPersistent
from .measure import DiscreteMeasure, drop_null_atoms
from .recombine import (
    MAX_RESETS,
    RecombinationSolution,
    ResetSchedule,
    child_seed,
    reduce_basic,
    reduce_greedy,
    reduce_with_resets,
    rng_for,
    solve_measure,
)

InnerReducer = Callable[[DiscreteMeasure, object], RecombinationSolution]


@dataclass(frozen=True)
class GroupPlan:
    """Assignment of atoms to groups; weights and barycenters once summarised."""

    assignments: np.ndarray
    group_count: int
    group_weights: np.ndarray | None = None
    group_barycenters: np.ndarray | None = None


def default_groups(n: int) -> int:
    return 50 * (n + 1)


def partition_groups(N: int, G: int) -> GroupPlan:
    """Contiguous chunks of sizes ``ceil(N/G)`` then ``floor(N/G)``."""
    if not 1 <= G <= N:
        raise BadGroupCount(f"cannot split {N} atoms into {G} groups")
    base, extra = divmod(N, G)
    sizes = np.full(G, base)
    sizes[:extra] += 1
    return GroupPlan(np.repeat(np.arange(G), sizes), G)


def summarize_groups(measure: DiscreteMeasure, plan: GroupPlan) -> GroupPlan:
    order = np.argsort(plan.assignments, kind="stable")
    starts = np.searchsorted(plan.assignments[order], np.arange(plan.group_count))
    weights = measure.weights[order]
    masses = np.add.reduceat(weights, starts)
    sums = np.add.reduceat(weights[:, None] * measure.points[order], starts, axis=0)
    return replace(plan, group_weights=masses, group_barycenters=sums / masses[:, None])


def barycenter_measure(measure: DiscreteMeasure, plan: GroupPlan) -> DiscreteMeasure:
    """One atom per group at its weighted mean, carrying the group's mass."""
    plan = plan if plan.group_weights is not None else summarize_groups(measure, plan)
    return DiscreteMeasure.from_masses(plan.group_barycenters, plan.group_weights)


def greedy_reset_inner(measure: DiscreteMeasure, seed, reset_c: int | None = None,
                       max_resets: int = MAX_RESETS) -> RecombinationSolution:
    def run(cloud):
        schedule = ResetSchedule(reset_c) if reset_c else None
        return reduce_with_resets(cloud, seed, schedule, max_resets=max_resets)

    return solve_measure(measure, run)


def _divide_and_conquer(measure, inner, G, seed, shuffle, method):
    reduced, keep = drop_null_atoms(measure)
    N, n = reduced.N, reduced.n
    if N <= n + 1:
        return RecombinationSolution(keep, np.array(reduced.weights), method="trivial")
    G = default_groups(n) if G is None else G
    if G < n + 2:
        raise BadGroupCount(f"need more than n+1 = {n + 1} groups, got {G}")
    X = reduced.points
    w = np.array(reduced.weights)
    support = np.arange(N)
    order_rng = rng_for(seed, 0x5EED) if shuffle else None
    tau = resets = fallbacks = attempts = 0
    masses = []
    round_no = 0
    while support.size > n + 1:
        if order_rng is not None:
            support = support[order_rng.permutation(support.size)]
        total = w[support].sum()
        sub = DiscreteMeasure(X[support], w[support] / total)
        plan = summarize_groups(sub, partition_groups(support.size, min(G, support.size)))
        bary = DiscreteMeasure.from_masses(plan.group_barycenters, plan.group_weights)
        round_seed = seed if round_no == 0 else child_seed(seed, round_no)
        solution = inner(bary, round_seed)
        tau += solution.tau
        resets += solution.resets
        fallbacks += solution.fallbacks
        attempts += solution.basis_attempts

        factor = np.zeros(plan.group_count)
        factor[solution.indices] = solution.weights / plan.group_weights[solution.indices]
        scaled = sub.weights * factor[plan.assignments]
        alive = scaled > 0
        support = support[alive]
        w[support] = scaled[alive]
        masses.append(float(w[support].sum()))
        round_no += 1

    order = np.argsort(support)
    support = support[order]
    return RecombinationSolution(
        indices=keep[support],
        weights=w[support] / w[support].sum(),
        tau=tau,
        resets=resets,
        method=method,
        fallbacks=fallbacks,
        basis_attempts=attempts,
        round_masses=tuple(masses),
    )


def reduce_divide_conquer(
    measure: DiscreteMeasure,
    inner_reducer: InnerReducer | None = None,
    G: int | None = None,
    seed=0,
    shuffle: bool = False,
) -> RecombinationSolution:
    """Divide and conquer with ``inner_reducer(measure, seed)`` on each round.

    The default inner reducer is greedy sampling with Luby resets; ``G``
    defaults to ``50(n + 1)``. Round ``r > 0`` gets the seed ``(seed, r)``.
    """
    inner = greedy_reset_inner if inner_reducer is None else inner_reducer
    return _divide_and_conquer(measure, inner, G, seed, shuffle, "divide-conquer")


def hybrid_round(measure: DiscreteMeasure, seed, trials: int = 10,
                 budget_per_trial: int | None = None) -> RecombinationSolution:
    """Up to ``trials`` greedy runs, then the deterministic reducer.

    Each trial inverts exactly one random basis and runs without resets for
    ``budget_per_trial`` iterations (default ``2 n^2``).
    """
    def run(cloud):
        budget = 2 * cloud.n * cloud.n if budget_per_trial is None else budget_per_trial
        tau = attempts = 0
        for trial in range(trials):
            try:
                solution = reduce_greedy(cloud, child_seed(seed, trial), max_iterations=budget,
                                         max_basis_attempts=1)
            except (NotFound, ActiveExhausted, SingularBasisPersistent) as exc:
                tau += exc.tau
                attempts += exc.basis_attempts
                continue
            return replace(solution, tau=tau + solution.tau, basis_attempts=attempts + solution.basis_attempts)
        raise GiveUp(f"{trials} greedy trials failed", tau=tau, basis_attempts=attempts)

    try:
        return solve_measure(measure, run)
    except GiveUp as exc:
        return replace(reduce_deterministic(measure), fallbacks=1, tau=exc.tau, basis_attempts=exc.basis_attempts)


def reduce_hybrid(
    measure: DiscreteMeasure,
    trials: int = 10,
    G: int | None = None,
    budget_per_trial: int | None = None,
    seed=0,
    shuffle: bool = False,
) -> RecombinationSolution:
    """Divide and conquer whose rounds fall back to the deterministic reducer."""
    inner = functools.partial(hybrid_round, trials=trials, budget_per_trial=budget_per_trial)
    return _divide_and_conquer(measure, inner, G, seed, shuffle, "hybrid")


ALIASES = {"det": "deterministic", "dnc": "divide-conquer"}


def recombine(measure: DiscreteMeasure, method: str = "hybrid", seed=0, *,
              max_iterations: int | None = None, reset_c: int | None = None,
              groups: int | None = None, trials: int = 10,
              budget_per_trial: int | None = None, max_resets: int = MAX_RESETS) -> RecombinationSolution:
    """Reduce ``measure`` to at most ``n + 1`` atoms with the named method.

    ``method`` is one of ``basic``, ``greedy``, ``greedy-reset``,
    ``deterministic`` (``det``), ``divide-conquer`` (``dnc``) or ``hybrid``.
    Randomized methods raise an :class:`~recombination.errors.Escalation`
    when they give up; the deterministic and hybrid methods always succeed.
    """
    method = ALIASES.get(method, method)
    if method == "basic":
        return solve_measure(measure, lambda c: reduce_basic(c, seed, max_iterations))
    if method == "greedy":
        return solve_measure(measure, lambda c: reduce_greedy(c, seed, max_iterations))
    if method == "greedy-reset":
        return greedy_reset_inner(measure, seed, reset_c, max_resets)
    if method == "deterministic":
        return reduce_deterministic(measure)
    if method == "divide-conquer":
        inner = functools.partial(greedy_reset_inner, reset_c=reset_c, max_resets=max_resets)
        return reduce_divide_conquer(measure, inner, groups, seed)
    if method == "hybrid":
        return reduce_hybrid(measure, trials, groups, budget_per_trial, seed)
    raise ValueError(f"unknown method {method!r}")
