"""Randomized recombination of discrete measures via cone geometry."""
from .cone import (
    ConeBasis,
    build_basis,
    interior_cone_hits,
    negative_cone_hits,
    solve_weights,
    swap_basis_vector,
)
from .deterministic import reduce_deterministic
from .errors import Escalation, RecombinationError
from .lsq import LsqCoreset, build_coreset, moment_features, solve_reduced
from .measure import (
    CenteredCloud,
    DiscreteMeasure,
    center,
    normalize_sphere,
    recover_weights,
    validate_reduction,
)
from .pipeline import recombine, reduce_divide_conquer, reduce_hybrid
from .recombine import (
    RecombinationSolution,
    ResetSchedule,
    luby,
    reduce_basic,
    reduce_greedy,
    reduce_with_resets,
    solve_measure,
)

__all__ = [
    "CenteredCloud",
    "ConeBasis",
    "DiscreteMeasure",
    "Escalation",
    "LsqCoreset",
    "RecombinationError",
    "RecombinationSolution",
    "ResetSchedule",
    "build_basis",
    "build_coreset",
    "center",
    "interior_cone_hits",
    "luby",
    "moment_features",
    "negative_cone_hits",
    "normalize_sphere",
    "recombine",
    "recover_weights",
    "reduce_basic",
    "reduce_deterministic",
    "reduce_divide_conquer",
    "reduce_greedy",
    "reduce_hybrid",
    "reduce_with_resets",
    "solve_measure",
    "solve_reduced",
    "solve_weights",
    "swap_basis_vector",
    "validate_reduction",
]
