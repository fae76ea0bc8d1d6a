"""Discrete measures, recentering and the sphere-scaling trick.

Every reducer in the package works on a *cloud*: the atoms of a measure
shifted so that the weighted mean sits at the origin. Reducing the measure
then means finding at most ``n + 1`` cloud points whose convex hull contains
the origin, together with the convex weights that realise it.

Because a cone only depends on the directions of its generators, the cloud
can additionally be projected to the unit sphere. Weights found on the
projected cloud are mapped back with :func:`recover_weights`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, NegativeWeight, ZeroKappa

WEIGHT_SUM_TOL = 1e-12
CLIP_TOL = 1e-10
# rows shorter than this fraction of the longest row count as the barycenter itself
ZERO_ROW_RTOL = 1e-13


def _frozen(array):
    array.setflags(write=False)
    return array


def _owned(value):
    # reuse read-only float arrays (already frozen by this module), copy anything else
    if isinstance(value, np.ndarray) and value.dtype == float and not value.flags.writeable:
        return value
    return _frozen(np.array(value, dtype=float))


@dataclass(frozen=True)
class DiscreteMeasure:
    """``N`` atoms in ``R^n`` (rows of ``points``) with probability ``weights``."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError(f"points must be a non-empty N x n matrix, got shape {points.shape}")
        if weights.shape[0] != points.shape[0]:
            raise ValueError(f"{weights.shape[0]} weights for {points.shape[0]} atoms")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {weights.sum()!r}, expected 1")
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def uniform(cls, points):
        points = np.asarray(points, dtype=float)
        return cls(points, np.full(points.shape[0], 1.0 / points.shape[0]))

    @classmethod
    def from_masses(cls, points, masses):
        """Build a measure from nonnegative masses, normalising them to sum 1."""
        masses = np.asarray(masses, dtype=float)
        return cls(points, masses / masses.sum())

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.points


@dataclass(frozen=True)
class CenteredCloud:
    """Recentred atoms, optionally scaled to unit length.

    ``points[i] * kappas[i]`` is the centred atom ``i``. ``source_weights`` are
    the weights of the measure the cloud came from; they are ``None`` for a raw
    point cloud whose target is simply the origin (used for infeasible
    controls in tests). ``zero_rows`` lists atoms that coincide with the
    barycenter.
    """

    points: np.ndarray
    kappas: np.ndarray
    barycenter: np.ndarray
    source_weights: np.ndarray | None = None
    normalized: bool = False
    zero_rows: tuple = field(default=())

    def __post_init__(self):
        # arrays are copied only when they are not already private float arrays
        for name in ("points", "kappas", "barycenter", "source_weights"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _owned(value))
        object.__setattr__(self, "zero_rows", tuple(int(i) for i in self.zero_rows))

    @classmethod
    def from_points(cls, points):
        """Wrap a raw cloud whose recombination target is the origin."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(points, np.ones(points.shape[0]), np.zeros(points.shape[1]))

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def unscaled_points(self) -> np.ndarray:
        if np.all(self.kappas == 1.0):
            return self.points
        return self.points * self.kappas[:, None]


def center(measure: DiscreteMeasure) -> CenteredCloud:
    barycenter = measure.weights @ measure.points
    points = _frozen(measure.points - barycenter)
    return CenteredCloud(points, _frozen(np.ones(measure.N)), _frozen(barycenter), measure.weights)


def _zero_row_mask(norms):
    scale = norms.max(initial=0.0)
    return norms <= ZERO_ROW_RTOL * max(scale, 1.0)


def normalize_sphere(cloud: CenteredCloud) -> tuple[CenteredCloud, np.ndarray]:
    """Project every nonzero row onto the unit sphere.

    Returns the scaled cloud and the indices of rows equal to the barycenter,
    which are left untouched with ``kappa = 1``.
    """
    raw = cloud.unscaled_points()
    norms = np.sqrt(np.einsum("ij,ij->i", raw, raw))
    zero = _zero_row_mask(norms)
    kappas = np.where(zero, 1.0, norms)
    points = _frozen(raw / kappas[:, None])
    flagged = np.flatnonzero(zero)
    scaled = CenteredCloud(
        points,
        _frozen(kappas),
        cloud.barycenter,
        cloud.source_weights,
        normalized=True,
        zero_rows=tuple(flagged),
    )
    return scaled, flagged


def zero_rows(cloud: CenteredCloud) -> np.ndarray:
    if cloud.normalized:
        return np.asarray(cloud.zero_rows, dtype=int)
    return np.flatnonzero(_zero_row_mask(np.linalg.norm(cloud.points, axis=1)))


def clip_weights(weights) -> np.ndarray:
    """Snap round-off negatives to zero and renormalise.

    Entries in ``[-CLIP_TOL, 0)`` become 0; anything more negative is a real
    failure and raises :class:`NegativeWeight`.
    """
    weights = np.array(weights, dtype=float)
    if np.any(weights < -CLIP_TOL):
        raise NegativeWeight(f"weight {weights.min()!r} below -{CLIP_TOL}")
    weights[weights < 0] = 0.0
    return weights / weights.sum()


def recover_weights(solution_weights, selected_indices, kappas, zero_rows=()) -> np.ndarray:
    """Map weights found on the sphere-scaled cloud back to the centred cloud.

    A convex combination ``sum w*_i x_i / kappa_i = 0`` is turned into
    ``sum w_i x_i = 0`` with ``w_i`` proportional to ``w*_i / kappa_i``.
    """
    selected = np.asarray(selected_indices, dtype=int)
    kappas = np.asarray(kappas, dtype=float)[selected]
    flagged = set(int(i) for i in zero_rows)
    if flagged.intersection(selected.tolist()) or np.any(kappas <= 0):
        raise ZeroKappa(f"selected atoms {sorted(flagged.intersection(selected.tolist()))} have no direction")
    weights = clip_weights(solution_weights) / kappas
    return clip_weights(weights)


def drop_null_atoms(measure: DiscreteMeasure) -> tuple[DiscreteMeasure, np.ndarray]:
    """Remove zero-weight atoms; returns the reduced measure and the kept indices."""
    keep = np.flatnonzero(measure.weights > 0)
    if keep.size == measure.N:
        return measure, keep
    return DiscreteMeasure.from_masses(measure.points[keep], measure.weights[keep]), keep


@dataclass(frozen=True)
class ValidationReport:
    coordinate_errors: np.ndarray
    max_error: float
    worst_coordinate: int
    support_size: int
    min_weight: float
    weight_sum_deviation: float
    tolerance: float
    passed: bool
    failures: tuple = ()

    def summary(self) -> str:
        status = "ok" if self.passed else "FAILED: " + "; ".join(self.failures)
        return (
            f"support={self.support_size} max_moment_error={self.max_error:.3e} "
            f"(coord {self.worst_coordinate}) min_weight={self.min_weight:.3e} "
            f"|sum-1|={self.weight_sum_deviation:.3e} {status}"
        )


def validate_reduction(measure: DiscreteMeasure, solution, tol: float = 1e-8) -> ValidationReport:
    """Check that ``solution`` (indices + weights) reproduces the measure's means."""
    indices = np.asarray(solution.indices, dtype=int)
    weights = np.asarray(solution.weights, dtype=float)
    if indices.size and (indices.min() < 0 or indices.max() >= measure.N):
        raise IndexOutOfRange(f"solution index outside 0..{measure.N - 1}")
    moments = measure.weights @ measure.points
    reduced = weights @ measure.points[indices] if indices.size else np.zeros(measure.n)
    errors = np.abs(moments - reduced)
    worst = int(np.argmax(errors))
    max_error = float(errors[worst])
    min_weight = float(weights.min()) if weights.size else float("nan")
    deviation = abs(float(weights.sum()) - 1.0)

    failures = []
    if max_error > tol * (1.0 + np.abs(moments).max()):
        failures.append(f"moment error {max_error:.3e} at coordinate {worst}")
    if not weights.size or min_weight < -tol:
        failures.append(f"min weight {min_weight:.3e}")
    if deviation > tol:
        failures.append(f"weight sum off by {deviation:.3e}")
    if indices.size > measure.n + 1:
        failures.append(f"support {indices.size} > n+1 = {measure.n + 1}")
    if np.unique(indices).size != indices.size:
        failures.append("repeated indices")
    return ValidationReport(
        coordinate_errors=errors,
        max_error=max_error,
        worst_coordinate=worst,
        support_size=int(indices.size),
        min_weight=min_weight,
        weight_sum_deviation=deviation,
        tolerance=tol,
        passed=not failures,
        failures=tuple(failures),
    )
