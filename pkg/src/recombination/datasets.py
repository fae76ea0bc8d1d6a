"""Synthetic point clouds for benchmarks and experiments."""
from __future__ import annotations

import numpy as np

GENERATORS = {
    "gauss15": "standard normal in R^15",
    "gauss20": "standard normal in R^20",
    "expmix20": "Exp(1) coordinates in R^20, each coordinate multiplied by a sign drawn once per run",
}


def generate(name: str, N: int, rng: np.random.Generator) -> np.ndarray:
    if name == "gauss15":
        return rng.standard_normal((N, 15))
    if name == "gauss20":
        return rng.standard_normal((N, 20))
    if name == "expmix20":
        signs = rng.choice([-1.0, 1.0], size=20)
        return rng.exponential(1.0, size=(N, 20)) * signs
    raise ValueError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")


def dimension(name: str) -> int:
    return {"gauss15": 15, "gauss20": 20, "expmix20": 20}[name]


def uniform_sphere(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def synthetic_regression(N: int, d: int, seed: int = 0):
    """``Y = X theta + noise`` with standard normal ``X``, ``theta`` and noise."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, d))
    theta = rng.standard_normal(d)
    Y = X @ theta + rng.standard_normal(N)
    return X, Y, theta
