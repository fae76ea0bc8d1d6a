"""Exact least-squares coresets.

The normal-equations matrix ``(X|Y)^T (X|Y)`` is ``N`` times the mean of the
outer products ``z z^T`` over the rows ``z`` of ``(X|Y)``. Its distinct
entries are the means of ``(d+1)(d+2)/2`` product features, so recombining
the uniform measure on those features keeps at most ``(d+1)(d+2)/2 + 1``
rows and reproduces the matrix exactly. Every objective ``||X w - Y||^2`` is
then identical on the coreset.

No intercept is added; append a column of ones to ``X`` if one is wanted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient
from .measure import DiscreteMeasure
from .pipeline import recombine
from .recombine import RecombinationSolution


@dataclass(frozen=True)
class LsqCoreset:
    row_indices: np.ndarray
    row_scales: np.ndarray
    reduction: RecombinationSolution | None = None

    def apply(self, X, Y):
        """Scaled selected rows ``(X*, Y*)``."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        Y = np.asarray(Y, dtype=float)
        s = self.row_scales
        return X[self.row_indices] * s[:, None], Y[self.row_indices] * s


def feature_dimension(d: int) -> int:
    return (d + 1) * (d + 2) // 2


def moment_features(z) -> np.ndarray:
    """Products ``z_a z_b`` for ``a <= b`` in lexicographic order.

    Works on a single row or row-wise on a matrix.
    """
    z = np.asarray(z, dtype=float)
    a, b = np.triu_indices(z.shape[-1])
    return z[..., a] * z[..., b]


def _stack(X, Y):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([X, np.asarray(Y, dtype=float).reshape(-1)])


def build_coreset(X, Y, reducer="hybrid", seed=0, **options) -> LsqCoreset:
    """Select and rescale rows of ``(X|Y)`` preserving ``(X|Y)^T (X|Y)``.

    ``reducer`` is a method name understood by
    :func:`~recombination.pipeline.recombine` or a callable
    ``(measure, seed) -> RecombinationSolution``.
    """
    Z = _stack(X, Y)
    N, d1 = Z.shape
    if N <= feature_dimension(d1 - 1) + 1:
        return LsqCoreset(np.arange(N), np.ones(N))
    measure = DiscreteMeasure.uniform(moment_features(Z))
    if callable(reducer):
        solution = reducer(measure, seed)
    else:
        solution = recombine(measure, reducer, seed, **options)
    return LsqCoreset(np.asarray(solution.indices), np.sqrt(N * np.asarray(solution.weights)), solution)


def normal_matrix_error(X, Y, coreset: LsqCoreset) -> float:
    """Relative Frobenius distance between full and coreset normal matrices."""
    Z = _stack(X, Y)
    Zs = Z[coreset.row_indices] * coreset.row_scales[:, None]
    full = Z.T @ Z
    return float(np.linalg.norm(full - Zs.T @ Zs) / np.linalg.norm(full))


def solve_reduced(X, Y, coreset: LsqCoreset) -> np.ndarray:
    """Least-squares minimiser computed on the coreset rows only."""
    Xs, Ys = coreset.apply(X, Y)
    if np.linalg.matrix_rank(Xs.T @ Xs) < Xs.shape[1]:
        raise RankDeficient("coreset normal matrix is singular")
    return np.linalg.lstsq(Xs, Ys, rcond=None)[0]


def residual(X, Y, w) -> float:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    r = X @ np.asarray(w, dtype=float) - np.asarray(Y, dtype=float)
    return float(r @ r)
