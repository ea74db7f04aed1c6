"""Discrete compressive measurement: y = Phi f with random L-by-N matrices.

Measurement matrices compress (L < N) and are generated with unit expected
column norm (Gaussian variance 1/L, Bernoulli entries +-1/sqrt(L)), which
keeps residual thresholds solver-friendly. Operators compose with a basis
to give the coefficient-domain design matrix Phi @ Psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .signals import Basis
from .validation import (
    as_vector,
    check_nonnegative,
    check_positive_int,
    check_seed,
    readonly,
)

MATRIX_KINDS = ("gaussian", "bernoulli")
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementOperator:
    """An L-by-N linear acquisition operator plus its provenance.

    ``kind`` records how the matrix was produced (gaussian, bernoulli,
    demodulator, pscs); ``meta`` carries extra provenance such as the basis
    a composed operator absorbed.
    """

    matrix: np.ndarray
    kind: str
    l: int
    n: int
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.shape != (self.l, self.n):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match (l={self.l}, n={self.n})"
            )
        if not self.l < self.n:
            raise ValueError(f"compression requires l < n, got l={self.l}, n={self.n}")

    def describe(self) -> dict:
        d = {"kind": self.kind, "l": self.l, "n": self.n, "seed": self.seed}
        if self.meta:
            d["meta"] = self.meta
        return d


@dataclass(frozen=True)
class AcquisitionRecord:
    """A measurement vector together with everything that produced it."""

    y: np.ndarray
    operator: MeasurementOperator
    basis_meta: dict | None = None
    noise_sigma: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if self.y.shape != (self.operator.l,):
            raise ValueError(
                f"y has length {self.y.shape[0]}, expected {self.operator.l}"
            )


def make_measurement_matrix(
    kind: str, l: int, n: int, seed: int = 0
) -> MeasurementOperator:
    """Seeded random L-by-N measurement matrix with full row rank.

    Gaussian entries are N(0, 1/L); Bernoulli entries are +-1/sqrt(L) with
    equal probability. If the draw is rank deficient (probability
    negligible) the seed is bumped by one and the draw repeated.
    """
    check_positive_int(l, "l")
    check_positive_int(n, "n")
    check_seed(seed)
    if not l < n:
        raise ValueError(f"compression requires l < n, got l={l}, n={n}")
    if kind not in MATRIX_KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}, expected one of {MATRIX_KINDS}")
    s = int(seed)
    while True:
        rng = np.random.default_rng(s)
        if kind == "gaussian":
            m = rng.normal(0.0, 1.0 / math.sqrt(l), size=(l, n))
        else:
            m = (rng.integers(0, 2, size=(l, n)) * 2 - 1) / math.sqrt(l)
        if np.linalg.matrix_rank(m, tol=_RANK_TOL) == l:
            break
        s += 1
    meta = {} if s == seed else {"requested_seed": int(seed)}
    return MeasurementOperator(
        matrix=readonly(m), kind=kind, l=l, n=n, seed=s, meta=meta
    )


def measure(
    op: MeasurementOperator,
    f,
    noise_sigma: float = 0.0,
    seed: int = 0,
    basis_meta: dict | None = None,
) -> AcquisitionRecord:
    """Acquire y = Phi f (+ white Gaussian noise when noise_sigma > 0)."""
    f = as_vector(f, op.n, "f")
    check_nonnegative(noise_sigma, "noise_sigma")
    check_seed(seed)
    y = op.matrix @ f
    if noise_sigma > 0.0:
        y = y + np.random.default_rng(seed).normal(0.0, noise_sigma, op.l)
    return AcquisitionRecord(
        y=readonly(y),
        operator=op,
        basis_meta=basis_meta,
        noise_sigma=float(noise_sigma),
        noise_seed=int(seed),
    )


def compose(op: MeasurementOperator, basis: Basis) -> MeasurementOperator:
    """Coefficient-domain operator Phi @ Psi, provenance preserved."""
    if op.n != basis.n:
        raise ValueError(f"operator n={op.n} does not match basis n={basis.n}")
    meta = dict(op.meta)
    meta["composed_with"] = basis.describe()
    return MeasurementOperator(
        matrix=readonly(op.matrix @ basis.matrix),
        kind=op.kind,
        l=op.l,
        n=op.n,
        seed=op.seed,
        meta=meta,
    )


def coherence(op: MeasurementOperator, basis: Basis) -> float:
    """Diagnostic: max |<row_i/|row_i|, psi_j>| over all rows and columns."""
    if op.n != basis.n:
        raise ValueError(f"operator n={op.n} does not match basis n={basis.n}")
    rows = op.matrix / np.linalg.norm(op.matrix, axis=1, keepdims=True)
    return float(np.max(np.abs(rows @ basis.matrix)))
