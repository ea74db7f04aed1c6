"""Argument checking helpers shared across the package.

Everything raises ``ValueError`` with a message naming the offending
argument, so CLI and library callers get the same diagnostics.
"""

from __future__ import annotations

import numpy as np

_SEED_MAX = 2**64 - 1


def check_seed(seed: int, name: str = "seed") -> int:
    """Validate a 64-bit unsigned seed and return it as a plain int."""
    seed = int(seed)
    if not 0 <= seed <= _SEED_MAX:
        raise ValueError(f"{name} must be a 64-bit unsigned integer, got {seed}")
    return seed


def check_positive_int(value: int, name: str) -> int:
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


def check_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if not value >= 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be strictly positive, got {value}")
    return value


def as_vector(x, n: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float64 array, optionally enforcing its length."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {n}")
    return x


def as_design_matrix(a, name: str = "a") -> np.ndarray:
    """Extract the dense matrix from an operator-like object.

    Accepts a raw 2-D array or any object with a ``matrix`` attribute
    (measurement operators, demodulator matrices).
    """
    m = getattr(a, "matrix", a)
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    return m


def readonly(a: np.ndarray) -> np.ndarray:
    """Mark an array immutable so records can be shared across workers."""
    a.setflags(write=False)
    return a
